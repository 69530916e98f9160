//! Exact laws of noisy fitness values and of the comparisons the (1+1)-EA
//! makes with them.
//!
//! Everything here is deterministic `f64` arithmetic; nothing is sampled
//! except in [`mc_sampled_comparison`], which exists as a fallback for
//! supports beyond the convolution guard.

mod pmf;

pub use pmf::{comparison_probability, m_fold_sum_pmf, Comparison, Pmf, SUPPORT_LIMIT};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::noise::{sampled_fitness_sum, NoiseSpec, SamplingSpec};
use crate::problem::{true_fitness, BitString, ProblemKind};

/// Exact law of `f^n(x)`.
///
/// Built as the mixture `(1 - p) * delta_{f(x)} + p * law(f(x'))`. Under
/// bit-wise noise the OneMax part is a Poisson-binomial computed by
/// per-bit dynamic programming (1-bits survive with `1 - q`, 0-bits turn on
/// with `q`); the LeadingOnes part uses the prefix survival product
/// `P(LO(x') >= j) = prod_{i <= j} r_i`. Under one-bit noise `law(f(x'))`
/// is the uniform average over the `n` single-bit flips.
pub fn noisy_pmf(problem: ProblemKind, x: &BitString, noise: NoiseSpec) -> Pmf {
    let n = x.len();
    let exact = Pmf::point(true_fitness(problem, x), n);
    match noise.normalized() {
        NoiseSpec::Noiseless => exact,
        NoiseSpec::OneBit { p } => {
            let mut mass = vec![0.0; n + 1];
            let w = 1.0 / n as f64;
            let mut y = x.clone();
            for i in 0..n {
                y.flip(i);
                mass[true_fitness(problem, &y)] += w;
                y.flip(i);
            }
            exact.mix(&Pmf::from_masses(mass), p)
        }
        NoiseSpec::BitWise { p, q } => {
            let noisy = match problem {
                ProblemKind::OneMax => onemax_bitwise(x, q),
                ProblemKind::LeadingOnes => leadingones_bitwise(x, q),
            };
            exact.mix(&noisy, p)
        }
    }
}

fn onemax_bitwise(x: &BitString, q: f64) -> Pmf {
    let n = x.len();
    let mut dist = vec![0.0; n + 1];
    dist[0] = 1.0;
    for (seen, bit) in x.bits().enumerate() {
        let on = if bit { 1.0 - q } else { q };
        for c in (0..=seen + 1).rev() {
            let stay = dist[c] * (1.0 - on);
            let from_below = if c > 0 { dist[c - 1] * on } else { 0.0 };
            dist[c] = stay + from_below;
        }
    }
    Pmf::from_masses(dist)
}

fn leadingones_bitwise(x: &BitString, q: f64) -> Pmf {
    let n = x.len();
    let keep = |i: usize| if x.get(i) { 1.0 - q } else { q };
    let mut mass = vec![0.0; n + 1];
    let mut survive = 1.0;
    for (j, slot) in mass.iter_mut().enumerate() {
        // survive = P(LO(x') >= j)
        *slot = if j < n { survive * (1.0 - keep(j)) } else { survive };
        if j < n {
            survive *= keep(j);
        }
    }
    Pmf::from_masses(mass)
}

pub fn expected_noisy_fitness(problem: ProblemKind, x: &BitString, noise: NoiseSpec) -> f64 {
    noisy_pmf(problem, x, noise).mean()
}

/// `P(f^n(offspring) >= f^n(parent))` with independent noise.
pub fn acceptance_probability(
    problem: ProblemKind,
    parent: &BitString,
    offspring: &BitString,
    noise: NoiseSpec,
) -> Result<f64> {
    check_lengths(parent, offspring)?;
    let a = noisy_pmf(problem, offspring, noise);
    let b = noisy_pmf(problem, parent, noise);
    Ok(comparison_probability(&a, &b).p_ge)
}

/// `P(f̂(offspring) >= f̂(parent))` with `m` evaluations each, computed as
/// `P(sum of offspring draws >= sum of parent draws)`.
pub fn sampled_acceptance_probability(
    problem: ProblemKind,
    parent: &BitString,
    offspring: &BitString,
    noise: NoiseSpec,
    m: u64,
) -> Result<f64> {
    check_lengths(parent, offspring)?;
    let a = m_fold_sum_pmf(&noisy_pmf(problem, offspring, noise), m)?;
    let b = m_fold_sum_pmf(&noisy_pmf(problem, parent, noise), m)?;
    Ok(comparison_probability(&a, &b).p_ge)
}

/// Monte-Carlo estimate of `P(f̂(x) >= f̂(y))` with a normal-approximation
/// 95% half-width. Each trial samples `x` first, then `y`.
pub fn mc_sampled_comparison<R: RngCore + ?Sized>(
    problem: ProblemKind,
    x: &BitString,
    y: &BitString,
    noise: NoiseSpec,
    m: u64,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_lengths(x, y)?;
    if trials == 0 {
        return Err(Error::InvalidRunConfig("trials must be >= 1".into()));
    }
    let sampling = SamplingSpec::new(m)?;
    let hits = (0..trials)
        .filter(|_| {
            let fx = sampled_fitness_sum(problem, x, noise, sampling, rng);
            let fy = sampled_fitness_sum(problem, y, noise, sampling, rng);
            fx.ge(&fy)
        })
        .count();
    let est = hits as f64 / trials as f64;
    let ci = 1.96 * (est * (1.0 - est) / trials as f64).sqrt();
    Ok((est, ci))
}

fn check_lengths(a: &BitString, b: &BitString) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Brute-force law of f^n(x) by enumerating every perturbation.
    fn enumerate_pmf(problem: ProblemKind, x: &BitString, noise: NoiseSpec) -> Vec<f64> {
        let n = x.len();
        let mut mass = vec![0.0; n + 1];
        let f = true_fitness(problem, x);
        match noise {
            NoiseSpec::Noiseless => mass[f] = 1.0,
            NoiseSpec::OneBit { p } => {
                mass[f] += 1.0 - p;
                for i in 0..n {
                    let mut y = x.clone();
                    y.flip(i);
                    mass[true_fitness(problem, &y)] += p / n as f64;
                }
            }
            NoiseSpec::BitWise { p, q } => {
                mass[f] += 1.0 - p;
                for pattern in 0..(1u64 << n) {
                    let mut y = x.clone();
                    let mut w = p;
                    for i in 0..n {
                        if pattern >> i & 1 == 1 {
                            y.flip(i);
                            w *= q;
                        } else {
                            w *= 1.0 - q;
                        }
                    }
                    mass[true_fitness(problem, &y)] += w;
                }
            }
        }
        mass
    }

    #[test]
    fn pmf_examples() {
        let noise = NoiseSpec::BitWise { p: 1.0, q: 0.5 };
        assert_eq!(
            noisy_pmf(ProblemKind::OneMax, &bs("11"), noise).masses(),
            &[0.25, 0.5, 0.25]
        );
        assert_eq!(
            noisy_pmf(ProblemKind::LeadingOnes, &bs("10"), noise).masses(),
            &[0.5, 0.25, 0.25]
        );
        let x = bs("10110");
        for p in [ProblemKind::OneMax, ProblemKind::LeadingOnes] {
            let d = noisy_pmf(p, &x, NoiseSpec::Noiseless);
            assert_eq!(d.prob(true_fitness(p, &x)), 1.0);
        }
        let e = expected_noisy_fitness(ProblemKind::LeadingOnes, &bs("10"), noise);
        assert!((e - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pmf_matches_enumeration() {
        let noises = [
            NoiseSpec::Noiseless,
            NoiseSpec::OneBit { p: 0.7 },
            NoiseSpec::OneBit { p: 1.0 },
            NoiseSpec::BitWise { p: 0.3, q: 0.2 },
            NoiseSpec::BitWise { p: 1.0, q: 0.5 },
            NoiseSpec::BitWise { p: 0.6, q: 1.0 },
        ];
        for n in 1..=7 {
            for v in 0..(1u64 << n) {
                let x = BitString::from_u64(n, v);
                for problem in [ProblemKind::OneMax, ProblemKind::LeadingOnes] {
                    for noise in noises {
                        let got = noisy_pmf(problem, &x, noise);
                        assert!(got.is_normalized(1e-12));
                        let want = enumerate_pmf(problem, &x, noise);
                        for (g, w) in got.masses().iter().zip(&want) {
                            assert!((g - w).abs() < 1e-12, "{problem} {x} {noise}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn onemax_pmf_depends_only_on_ones_count() {
        let noises = [
            NoiseSpec::OneBit { p: 0.4 },
            NoiseSpec::BitWise { p: 0.7, q: 0.15 },
        ];
        for n in 1..=10 {
            for noise in noises {
                let canon: Vec<Pmf> = (0..=n)
                    .map(|k| noisy_pmf(ProblemKind::OneMax, &BitString::prefix_ones(n, k), noise))
                    .collect();
                for v in 0..(1u64 << n) {
                    let x = BitString::from_u64(n, v);
                    let d = noisy_pmf(ProblemKind::OneMax, &x, noise);
                    for (a, b) in d.masses().iter().zip(canon[x.count_ones()].masses()) {
                        assert!((a - b).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn onemax_expectation_closed_forms() {
        for n in 1..=64usize {
            let nf = n as f64;
            for k in 0..=n {
                let x = BitString::prefix_ones(n, k);
                let kf = k as f64;
                for p in [0.0, 0.1, 0.25, 0.5, 1.0] {
                    let onebit = expected_noisy_fitness(ProblemKind::OneMax, &x, NoiseSpec::OneBit { p });
                    let bitwise = expected_noisy_fitness(
                        ProblemKind::OneMax,
                        &x,
                        NoiseSpec::BitWise { p, q: 1.0 / nf },
                    );
                    let closed = (1.0 - 2.0 * p / nf) * kf + p;
                    assert!((onebit - bitwise).abs() < 1e-10);
                    assert!((bitwise - closed).abs() < 1e-10);
                }
                for q in [0.0, 0.1, 0.5, 0.9] {
                    let e = expected_noisy_fitness(ProblemKind::OneMax, &x, NoiseSpec::BitWise { p: 1.0, q });
                    assert!((e - ((1.0 - 2.0 * q) * kf + nf * q)).abs() < 1e-10);
                }
            }
            let q = 0.3;
            let e = expected_noisy_fitness(
                ProblemKind::OneMax,
                &BitString::ones(n),
                NoiseSpec::BitWise { p: 1.0, q },
            );
            assert!((e - (nf - nf * q)).abs() < 1e-10);
        }
    }

    #[test]
    fn leadingones_prefix_point_masses() {
        // x = 1^j 0 ..., BitWise{1, q}: P(f = l) = (1-q)^l q for l < j
        for n in 2..=12 {
            for j in 1..=n {
                let x = BitString::prefix_ones(n, j);
                for q in [0.05, 0.3, 0.5, 0.8] {
                    let d = noisy_pmf(ProblemKind::LeadingOnes, &x, NoiseSpec::BitWise { p: 1.0, q });
                    for l in 0..j {
                        let want = (1.0 - q).powi(l as i32) * q;
                        assert!((d.prob(l) - want).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn acceptance_examples() {
        let noise = NoiseSpec::Noiseless;
        assert_eq!(
            acceptance_probability(ProblemKind::OneMax, &bs("1000"), &bs("1100"), noise).unwrap(),
            1.0
        );
        // P(f^n(1000) >= 2) = 0.5 * 0.75 * 0.25 under BitWise{0.5, 0.25}
        let noise = NoiseSpec::BitWise { p: 0.5, q: 0.25 };
        let parent = bs("1000");
        let d = noisy_pmf(ProblemKind::LeadingOnes, &parent, noise);
        let brute = enumerate_pmf(ProblemKind::LeadingOnes, &parent, noise);
        let brute_ge2: f64 = brute[2..].iter().sum();
        assert!((d.tail_ge(2) - 0.09375).abs() < 1e-15);
        assert!((brute_ge2 - 0.09375).abs() < 1e-15);
        assert!(acceptance_probability(ProblemKind::OneMax, &bs("10"), &bs("101"), noise).is_err());
    }

    #[test]
    fn leadingones_acceptance_lower_bound() {
        // 1 - acceptance <= p (1 - (1 - 1/n)^(i+1)) for LO(parent) = i, LO(offspring) > i
        for n in 2..=10usize {
            let q = 1.0 / n as f64;
            let all: Vec<BitString> = (0..(1u64 << n)).map(|v| BitString::from_u64(n, v)).collect();
            for p in [0.1, 0.5, 1.0] {
                let noise = NoiseSpec::BitWise { p, q };
                let pmfs: Vec<Pmf> = all
                    .iter()
                    .map(|x| noisy_pmf(ProblemKind::LeadingOnes, x, noise))
                    .collect();
                for (pi, parent) in all.iter().enumerate() {
                    let i = parent.leading_ones();
                    if i == n {
                        continue;
                    }
                    let bound = p * (1.0 - (1.0 - q).powi(i as i32 + 1));
                    for (oi, off) in all.iter().enumerate() {
                        if off.leading_ones() <= i {
                            continue;
                        }
                        let acc = comparison_probability(&pmfs[oi], &pmfs[pi]).p_ge;
                        assert!(1.0 - acc <= bound + 1e-12, "n={n} p={p} {parent} {off}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_acceptance_examples() {
        let noise = NoiseSpec::BitWise { p: 0.4, q: 0.3 };
        let (x, y) = (bs("110100"), bs("111100"));
        for problem in [ProblemKind::OneMax, ProblemKind::LeadingOnes] {
            let a = acceptance_probability(problem, &x, &y, noise).unwrap();
            let s = sampled_acceptance_probability(problem, &x, &y, noise, 1).unwrap();
            assert_eq!(a, s);
        }
        let s = sampled_acceptance_probability(ProblemKind::OneMax, &y, &x, NoiseSpec::Noiseless, 7).unwrap();
        assert_eq!(s, 0.0);
        let s = sampled_acceptance_probability(ProblemKind::OneMax, &x, &y, NoiseSpec::Noiseless, 7).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn sampling_sharpens_onebit_comparison() {
        let n = 20;
        let parent = BitString::prefix_ones(n, 19);
        let off = BitString::ones(n);
        let noise = NoiseSpec::OneBit { p: 1.0 };
        let vals: Vec<f64> = [1, 10, 100]
            .iter()
            .map(|&m| sampled_acceptance_probability(ProblemKind::OneMax, &parent, &off, noise, m).unwrap())
            .collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2], "{vals:?}");
    }

    #[test]
    fn mc_comparison_noiseless_is_exact() {
        let mut rng = stream(1);
        let (est, ci) = mc_sampled_comparison(
            ProblemKind::OneMax,
            &bs("1110"),
            &bs("1100"),
            NoiseSpec::Noiseless,
            3,
            500,
            &mut rng,
        )
        .unwrap();
        assert_eq!((est, ci), (1.0, 0.0));
    }

    #[test]
    fn mc_comparison_agrees_with_exact_oracle() {
        use crate::problem::uniform_random_solution;
        use rand::Rng;

        let mut rng = stream(2024);
        let trials = 20_000u64;
        let mut agree = 0;
        let cases = 40;
        for case in 0..cases {
            let n = 8;
            let x = uniform_random_solution(n, &mut rng);
            let y = uniform_random_solution(n, &mut rng);
            let problem = if case % 2 == 0 { ProblemKind::OneMax } else { ProblemKind::LeadingOnes };
            let noise = if case % 3 == 0 {
                NoiseSpec::OneBit { p: rng.random::<f64>() }
            } else {
                NoiseSpec::BitWise { p: rng.random::<f64>(), q: rng.random::<f64>() * 0.5 }
            };
            let m = [1u64, 2, 3][case % 3];
            let exact = sampled_acceptance_probability(problem, &y, &x, noise, m).unwrap();
            let (est, _) = mc_sampled_comparison(problem, &x, &y, noise, m, trials, &mut rng).unwrap();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            if (est - exact).abs() <= 3.0 * sigma {
                agree += 1;
            }
        }
        assert!(agree >= cases - 2, "{agree}/{cases}");
    }
}
