//! Numerical checks of runtime-analysis hypotheses at a fixed problem size.
//!
//! Reports state whether an inequality family holds at the given `n` and by
//! how much; they never claim an asymptotic conclusion.
//!
//! OneMax comparisons use the level representatives `x^k = 1^k 0^(n-k)`:
//! the noisy OneMax value of a solution depends only on its number of
//! 1-bits, so one pmf per level covers every solution.

use std::fmt;
use std::ops::RangeInclusive;

use rand::RngCore;
use rayon::prelude::*;

use crate::engine::step;
use crate::error::{Error, Result};
use crate::noise::{NoiseSpec, SamplingSpec};
use crate::oracle::{expected_noisy_fitness, m_fold_sum_pmf, noisy_pmf, Pmf};
use crate::problem::{BitString, ProblemKind};
use crate::rng::{self, splitmix64};

/// Tolerance for closed-form agreement with the exact oracle.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionReport {
    pub name: String,
    pub n: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub m: Option<u64>,
    pub c: Option<f64>,
    pub l: Option<f64>,
    /// `margin >= 0`.
    pub satisfied: bool,
    /// Where the tightest margin was found.
    pub worst_case: String,
    pub margin: f64,
    /// Whether `c` and `l` lie in the ranges the hypothesis is stated for.
    pub parameters_in_range: bool,
    /// Largest absolute formula-vs-oracle deviation, for closed-form checks.
    pub max_deviation: Option<f64>,
}

impl ConditionReport {
    fn new(name: &str, n: usize, noise: NoiseSpec) -> Self {
        ConditionReport {
            name: name.to_string(),
            n,
            p: Some(noise.p()),
            q: noise.q(),
            parameters_in_range: true,
            ..Default::default()
        }
    }

    fn finish(mut self, margin: f64, worst: String) -> Self {
        self.margin = margin;
        self.satisfied = margin >= 0.0;
        self.worst_case = worst;
        self
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "name={} n={}", self.name, self.n)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        write!(f, " p={} q={}", opt(self.p), opt(self.q))?;
        if let Some(m) = self.m {
            write!(f, " m={m}")?;
        }
        if let Some(c) = self.c {
            write!(f, " c={c}")?;
        }
        if let Some(l) = self.l {
            write!(f, " l={l}")?;
        }
        write!(
            f,
            " satisfied={} margin={:e} worst_case=\"{}\" in_range={}",
            self.satisfied, self.margin, self.worst_case, self.parameters_in_range
        )?;
        if let Some(d) = self.max_deviation {
            write!(f, " max_deviation={d:e}")?;
        }
        Ok(())
    }
}

/// Laws of the `m`-sample sums `m * f̂(x^k)` for a range of OneMax levels,
/// with their CDFs, so any strict comparison `P(f̂(x^j) < f̂(x^k))` is one
/// dot product.
pub struct ComparisonTable {
    n: usize,
    noise: NoiseSpec,
    m: u64,
    first: usize,
    sums: Vec<Pmf>,
    cdfs: Vec<Vec<f64>>,
}

impl ComparisonTable {
    pub fn new(n: usize, noise: NoiseSpec, m: u64, levels: RangeInclusive<usize>) -> Result<Self> {
        if n == 0 || *levels.end() > n {
            return Err(Error::InvalidRunConfig(format!("levels {levels:?} outside 0..={n}")));
        }
        noise.validate()?;
        let first = *levels.start();
        let sums = levels
            .map(|k| {
                let x = BitString::prefix_ones(n, k);
                m_fold_sum_pmf(&noisy_pmf(ProblemKind::OneMax, &x, noise), m)
            })
            .collect::<Result<Vec<_>>>()?;
        let cdfs = sums.iter().map(Pmf::cdf).collect();
        Ok(ComparisonTable {
            n,
            noise,
            m,
            first,
            sums,
            cdfs,
        })
    }

    pub fn full(n: usize, noise: NoiseSpec, m: u64) -> Result<Self> {
        Self::new(n, noise, m, 0..=n)
    }

    pub fn levels(&self) -> RangeInclusive<usize> {
        self.first..=self.first + self.sums.len() - 1
    }

    /// `P(f̂(x^j) < f̂(x^k))` with independent samples.
    pub fn p_lt(&self, j: usize, k: usize) -> f64 {
        let a_cdf = &self.cdfs[j - self.first];
        let b = &self.sums[k - self.first];
        b.masses()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(v, &w)| w * a_cdf[(v - 1).min(a_cdf.len() - 1)])
            .sum()
    }

    fn report(&self, name: &str, c: f64, l: f64) -> ConditionReport {
        let mut r = ConditionReport::new(name, self.n, self.noise);
        r.m = Some(self.m);
        r.c = Some(c);
        r.l = Some(l);
        r
    }
}

/// Upper-bound hypothesis for noisy OneMax, checked for every `j <= k`:
///
/// ```text
/// for all j <= k < n:      P(f̂(x^j) < f̂(x^(k+1))) >= 1 - l/n
/// for all j <= k < n - l:  P(f̂(x^j) < f̂(x^(k+1))) >= 1 - c (n-k)/n
/// ```
///
/// The stated ranges are `0 < c <= 1/15` and `2 < l <= n/2`; values outside
/// them are evaluated anyway and flagged via `parameters_in_range`.
pub fn check_lemma4(n: usize, noise: NoiseSpec, m: u64, c: f64, l: f64) -> Result<ConditionReport> {
    let table = ComparisonTable::full(n, noise, m)?;
    Ok(check_lemma4_with(&table, c, l))
}

pub fn check_lemma4_with(table: &ComparisonTable, c: f64, l: f64) -> ConditionReport {
    let n = table.n;
    let nf = n as f64;
    let mut report = table.report("lemma4", c, l);
    report.parameters_in_range = c > 0.0 && c <= 1.0 / 15.0 && l > 2.0 && l <= nf / 2.0;
    let mut worst = (f64::INFINITY, String::from("vacuous"));
    for k in 0..n {
        for j in 0..=k {
            let p = table.p_lt(j, k + 1);
            let m1 = p - (1.0 - l / nf);
            if m1 < worst.0 {
                worst = (m1, format!("family=1 j={j} k={k} p_lt={p:e}"));
            }
            if (k as f64) < nf - l {
                let m2 = p - (1.0 - c * (nf - k as f64) / nf);
                if m2 < worst.0 {
                    worst = (m2, format!("family=2 j={j} k={k} p_lt={p:e}"));
                }
            }
        }
    }
    report.finish(worst.0, worst.1)
}

/// Lower-bound hypothesis for noisy OneMax:
///
/// ```text
/// for all n - l <= k < n:  P(f̂(x^k) < f̂(x^(k+1))) <= 1 - c (n-k)/n
/// ```
///
/// Stated ranges: `l <= n/4`, `c >= 16`.
pub fn check_lemma5(n: usize, noise: NoiseSpec, m: u64, c: f64, l: f64) -> Result<ConditionReport> {
    let lo = lemma5_first_level(n, l);
    let table = ComparisonTable::new(n, noise, m, lo..=n)?;
    Ok(check_lemma5_with(&table, c, l))
}

fn lemma5_first_level(n: usize, l: f64) -> usize {
    let lo = (n as f64 - l).ceil();
    if lo <= 0.0 {
        0
    } else {
        (lo as usize).min(n)
    }
}

pub fn check_lemma5_with(table: &ComparisonTable, c: f64, l: f64) -> ConditionReport {
    let n = table.n;
    let nf = n as f64;
    let mut report = table.report("lemma5", c, l);
    report.parameters_in_range = l <= nf / 4.0 && c >= 16.0;
    let mut worst = (f64::INFINITY, String::from("vacuous"));
    for k in lemma5_first_level(n, l)..n {
        let p = table.p_lt(k, k + 1);
        let margin = (1.0 - c * (nf - k as f64) / nf) - p;
        if margin < worst.0 {
            worst = (margin, format!("k={k} p_lt={p:e}"));
        }
    }
    report.finish(worst.0, worst.1)
}

/// `min_{j <= k < n} E(f^n(x^(k+1))) - E(f^n(x^j))` for noisy OneMax.
pub fn sampling_gap(n: usize, noise: NoiseSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidRunConfig("n must be >= 1".into()));
    }
    noise.validate()?;
    let means: Vec<f64> = (0..=n)
        .map(|k| expected_noisy_fitness(ProblemKind::OneMax, &BitString::prefix_ones(n, k), noise))
        .collect();
    let mut best_below = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    for k in 0..n {
        best_below = best_below.max(means[k]);
        gap = gap.min(means[k + 1] - best_below);
    }
    Ok(gap)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftEstimate {
    /// Mean of `X_t - X_(t+1)` where `X` counts 0-bits.
    pub drift: f64,
    pub ci95: f64,
    pub trials: u64,
}

/// Monte-Carlo estimate of `E(X_t - X_(t+1) | X_t = level)` with `X = |x|_0`.
///
/// Each trial places `level` 0-bits uniformly at random, runs one EA
/// iteration and records the change. Trials run in parallel, each on a
/// stream derived from one draw of `rng` and the trial index; sums are
/// integer, so the estimate does not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn empirical_drift<R: RngCore + ?Sized>(
    problem: ProblemKind,
    n: usize,
    noise: NoiseSpec,
    m: u64,
    level: usize,
    trials: u64,
    rng: &mut R,
) -> Result<DriftEstimate> {
    if trials == 0 {
        return Err(Error::InvalidRunConfig("trials must be >= 1".into()));
    }
    if n == 0 || level > n {
        return Err(Error::InvalidRunConfig(format!("level {level} outside 0..={n}")));
    }
    noise.validate()?;
    let sampling = SamplingSpec::new(m)?;
    let base = rng.next_u64();
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(splitmix64(base ^ splitmix64(t)));
            let x = with_zeros(n, level, &mut r);
            let next = step(problem, &x, noise, sampling, &mut r);
            let delta = level as i64 - next.count_zeros() as i64;
            (delta, (delta * delta) as i128)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = trials as f64;
    let mean = sum as f64 / t;
    let ci95 = if trials < 2 {
        f64::INFINITY
    } else {
        let var = (sum_sq as f64 - sum as f64 * mean) / (t - 1.0);
        1.96 * (var.max(0.0) / t).sqrt()
    };
    Ok(DriftEstimate {
        drift: mean,
        ci95,
        trials,
    })
}

/// `1^n` with `zeros` positions cleared, chosen by partial Fisher-Yates.
fn with_zeros<R: RngCore + ?Sized>(n: usize, zeros: usize, rng: &mut R) -> BitString {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut x = BitString::ones(n);
    for i in 0..zeros {
        let j = i + rng::index(rng, n - i);
        idx.swap(i, j);
        x.set(idx[i], false);
    }
    x
}

/// Noise settings the closed-form ledger is evaluated on.
pub fn closed_form_grid(n: usize) -> Vec<NoiseSpec> {
    let ps = [0.0, 0.1, 0.5, 1.0];
    let qs = [0.0, 0.1, 0.5, 1.0, 1.0 / n as f64];
    let mut grid = vec![NoiseSpec::Noiseless];
    grid.extend(ps.iter().map(|&p| NoiseSpec::OneBit { p }));
    for &p in &ps {
        grid.extend(qs.iter().map(|&q| NoiseSpec::BitWise { p, q }));
    }
    grid
}

/// Largest deviation seen by one closed-form family.
struct Deviation {
    name: &'static str,
    max: f64,
    at: String,
    cases: usize,
}

impl Deviation {
    fn new(name: &'static str) -> Self {
        Deviation {
            name,
            max: 0.0,
            at: String::from("none"),
            cases: 0,
        }
    }

    fn record(&mut self, formula: f64, oracle: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        let d = (formula - oracle).abs();
        // NaN deviations must surface as failures
        if d.is_nan() || d > self.max {
            self.max = d;
            self.at = at();
        }
    }

    fn into_report(self, n: usize, noise: NoiseSpec) -> ConditionReport {
        let mut r = ConditionReport::new(self.name, n, noise);
        r.max_deviation = Some(self.max);
        let worst = format!("{} cases; max at {}", self.cases, self.at);
        let margin = if self.max.is_nan() { f64::NEG_INFINITY } else { CLOSED_FORM_TOLERANCE - self.max };
        r.finish(margin, worst)
    }
}

/// Compares the event probabilities and expectations used in the runtime
/// proofs against the exact oracle, exhaustively over `{0,1}^n`, for every
/// noise setting of [`closed_form_grid`].
pub fn verify_closed_forms(n: usize) -> Result<Vec<ConditionReport>> {
    verify_closed_forms_with(n, &closed_form_grid(n))
}

pub fn verify_closed_forms_with(n: usize, grid: &[NoiseSpec]) -> Result<Vec<ConditionReport>> {
    if !(1..=12).contains(&n) {
        return Err(Error::InvalidRunConfig(format!(
            "closed-form ledger enumerates {{0,1}}^n and needs 1 <= n <= 12, got {n}"
        )));
    }
    let mut reports = Vec::new();
    for &noise in grid {
        noise.validate()?;
        reports.extend(leadingones_forms(n, noise));
        reports.extend(onemax_forms(n, noise));
    }
    Ok(reports)
}

fn leadingones_forms(n: usize, noise: NoiseSpec) -> Vec<ConditionReport> {
    let nf = n as f64;
    let (p, q) = match noise {
        NoiseSpec::Noiseless => (0.0, Some(0.0)),
        NoiseSpec::OneBit { p } => (p, None),
        NoiseSpec::BitWise { p, q } => (p, Some(q)),
    };
    let mut drop = Deviation::new(if q.is_some() { "lo_drop_below_prefix_bitwise" } else { "lo_drop_below_prefix_onebit" });
    let mut gain = Deviation::new(if q.is_some() { "lo_gain_past_prefix_bitwise" } else { "lo_gain_past_prefix_onebit" });
    let mut survive = Deviation::new(if q.is_some() { "lo_prefix_survival_bitwise" } else { "lo_prefix_survival_onebit" });
    let mut point = Deviation::new("lo_prefix_point_mass_bitwise");

    for v in 0..(1u64 << n) {
        let x = BitString::from_u64(n, v);
        let i = x.leading_ones();
        let d = noisy_pmf(ProblemKind::LeadingOnes, &x, noise);
        let oracle_drop = if i == 0 { 0.0 } else { d.tail_le(i - 1) };
        match q {
            Some(q) => {
                let keep = |l: usize| (1.0 - q).powi(l as i32);
                drop.record(p * (1.0 - keep(i)), oracle_drop, || format!("x={x}"));
                if i < n {
                    gain.record(p * keep(i) * q, d.tail_ge(i + 1), || format!("x={x}"));
                }
                for l in 0..=i {
                    survive.record(1.0 - p + p * keep(l), d.tail_ge(l), || format!("x={x} l={l}"));
                }
                for l in 0..i {
                    point.record(p * keep(l) * q, d.prob(l), || format!("x={x} l={l}"));
                }
            }
            None => {
                drop.record(p * i as f64 / nf, oracle_drop, || format!("x={x}"));
                if i < n {
                    gain.record(p / nf, d.tail_ge(i + 1), || format!("x={x}"));
                }
                for l in 0..=i {
                    survive.record(1.0 - p * l as f64 / nf, d.tail_ge(l), || format!("x={x} l={l}"));
                }
            }
        }
    }
    let mut out = vec![
        drop.into_report(n, noise),
        gain.into_report(n, noise),
        survive.into_report(n, noise),
    ];
    if q.is_some() {
        out.push(point.into_report(n, noise));
    }
    out
}

fn onemax_forms(n: usize, noise: NoiseSpec) -> Vec<ConditionReport> {
    let nf = n as f64;
    let mut expectation = Deviation::new("onemax_expectation");
    let mut equality = Deviation::new("onemax_onebit_equals_bitwise_1_over_n");
    for v in 0..(1u64 << n) {
        let x = BitString::from_u64(n, v);
        let k = x.count_ones() as f64;
        let e = expected_noisy_fitness(ProblemKind::OneMax, &x, noise);
        let closed = match noise {
            NoiseSpec::Noiseless => k,
            NoiseSpec::OneBit { p } => (1.0 - 2.0 * p / nf) * k + p,
            NoiseSpec::BitWise { p, q } => (1.0 - p) * k + p * ((1.0 - 2.0 * q) * k + nf * q),
        };
        expectation.record(closed, e, || format!("x={x}"));
        if let NoiseSpec::OneBit { p } = noise {
            let bw = expected_noisy_fitness(ProblemKind::OneMax, &x, NoiseSpec::BitWise { p, q: 1.0 / nf });
            equality.record(bw, e, || format!("x={x}"));
        }
    }
    let mut out = vec![expectation.into_report(n, noise)];
    if matches!(noise, NoiseSpec::OneBit { .. }) {
        out.push(equality.into_report(n, noise));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma4_noiseless_holds() {
        for n in [8, 20] {
            let r = check_lemma4(n, NoiseSpec::Noiseless, 1, 1.0 / 15.0, 3.0).unwrap();
            assert!(r.satisfied, "{r}");
            assert!(r.parameters_in_range);
        }
    }

    #[test]
    fn lemma4_range_violation_is_reported_not_rejected() {
        let r = check_lemma4(10, NoiseSpec::Noiseless, 1, 0.5, 8.0).unwrap();
        assert!(!r.parameters_in_range);
        assert!(r.satisfied);
    }

    #[test]
    fn lemma5_noiseless_fails() {
        let r = check_lemma5(64, NoiseSpec::Noiseless, 1, 16.0, 2.0).unwrap();
        assert!(!r.satisfied);
        // k = 62: (1 - 16 * 2 / 64) - 1
        assert_eq!(r.margin, -0.5);
    }

    #[test]
    fn lemma5_half_flip_noise_near_optimum() {
        let noise = NoiseSpec::BitWise { p: 1.0, q: 0.5 };
        // both noisy values are Binomial(n, 1/2), so P(tie) = C(2n, n) / 4^n
        let tie: f64 = (1..=128).map(|i| (2 * i - 1) as f64 / (2 * i) as f64).product();
        let p_lt = (1.0 - tie) / 2.0;

        let r = check_lemma5(128, noise, 1, 16.0, 1.0).unwrap();
        assert!(r.satisfied, "{r}");
        assert!((r.margin - (1.0 - 16.0 / 128.0 - p_lt)).abs() < 1e-12);
        assert!(check_lemma5(128, noise, 51, 16.0, 1.0).unwrap().satisfied);

        // with l = n/8 the bound 1 - c(n-k)/n is negative at k = n - l
        let r = check_lemma5(128, noise, 1, 16.0, 16.0).unwrap();
        assert!(!r.satisfied);
        assert!((r.margin - (-1.0 - p_lt)).abs() < 1e-12);
    }

    #[test]
    fn table_is_shared_between_checks() {
        let noise = NoiseSpec::BitWise { p: 0.7, q: 0.2 };
        let n = 12;
        let full = ComparisonTable::full(n, noise, 3).unwrap();
        let tail = ComparisonTable::new(n, noise, 3, 8..=n).unwrap();
        for k in 8..n {
            assert_eq!(full.p_lt(k, k + 1), tail.p_lt(k, k + 1));
        }
        let a = check_lemma5_with(&full, 16.0, 3.0);
        let b = check_lemma5(n, noise, 3, 16.0, 3.0).unwrap();
        assert_eq!(a, b);
        let c = check_lemma4_with(&full, 1.0 / 15.0, 3.0);
        assert_eq!(c, check_lemma4(n, noise, 3, 1.0 / 15.0, 3.0).unwrap());
    }

    #[test]
    fn sampling_gap_forms() {
        for n in [4usize, 9, 33, 64] {
            let nf = n as f64;
            for p in [0.0, 0.25, 0.5, 1.0] {
                let g = sampling_gap(n, NoiseSpec::BitWise { p, q: 1.0 / nf }).unwrap();
                assert!((g + 2.0 * p / nf - 1.0).abs() < 1e-10);
                assert!(g >= 0.5);
            }
            for q in [0.0, 0.1, 0.3, 0.49] {
                let g = sampling_gap(n, NoiseSpec::BitWise { p: 1.0, q }).unwrap();
                assert!((g - (1.0 - 2.0 * q)).abs() < 1e-10);
            }
            let g = sampling_gap(n, NoiseSpec::BitWise { p: 1.0, q: 0.5 }).unwrap();
            assert!(g.abs() < 1e-10);
        }
    }

    #[test]
    fn drift_at_optimum_is_zero() {
        let mut r = rng::stream(1);
        let d = empirical_drift(ProblemKind::LeadingOnes, 16, NoiseSpec::Noiseless, 1, 0, 2000, &mut r).unwrap();
        assert_eq!(d.drift, 0.0);
        assert_eq!(d.ci95, 0.0);
    }

    #[test]
    fn drift_noiseless_onemax_near_optimum_is_positive() {
        let mut r = rng::stream(2);
        let d = empirical_drift(ProblemKind::OneMax, 16, NoiseSpec::Noiseless, 1, 1, 100_000, &mut r).unwrap();
        // 1.96 * sigma / sqrt(t) is the 95% half-width; 3 sigma is ~1.53x that
        assert!(d.drift - 3.0 / 1.96 * d.ci95 > 0.0, "{d:?}");
    }

    #[test]
    fn drift_is_reproducible() {
        let noise = NoiseSpec::BitWise { p: 0.5, q: 0.1 };
        let a = empirical_drift(ProblemKind::OneMax, 20, noise, 2, 5, 3000, &mut rng::stream(4)).unwrap();
        let b = empirical_drift(ProblemKind::OneMax, 20, noise, 2, 5, 3000, &mut rng::stream(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn drift_argument_errors() {
        let mut r = rng::stream(3);
        assert!(empirical_drift(ProblemKind::OneMax, 8, NoiseSpec::Noiseless, 1, 2, 0, &mut r).is_err());
        assert!(empirical_drift(ProblemKind::OneMax, 8, NoiseSpec::Noiseless, 1, 9, 10, &mut r).is_err());
    }

    #[test]
    fn with_zeros_places_exactly_that_many() {
        let mut r = rng::stream(5);
        for z in 0..=10 {
            assert_eq!(with_zeros(10, z, &mut r).count_zeros(), z);
        }
    }

    #[test]
    fn closed_forms_n6_examples() {
        let reports = verify_closed_forms_with(
            6,
            &[
                NoiseSpec::BitWise { p: 0.3, q: 1.0 / 6.0 },
                NoiseSpec::OneBit { p: 0.7 },
                NoiseSpec::Noiseless,
            ],
        )
        .unwrap();
        for r in &reports {
            assert!(r.satisfied, "{r}");
            assert!(r.max_deviation.unwrap() <= 1e-10);
        }
        let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
        assert!(names.contains(&"lo_gain_past_prefix_bitwise"));
        assert!(names.contains(&"lo_drop_below_prefix_onebit"));
        assert!(names.contains(&"onemax_onebit_equals_bitwise_1_over_n"));
    }

    #[test]
    fn closed_forms_guard_size() {
        assert!(verify_closed_forms(13).is_err());
        assert!(verify_closed_forms(0).is_err());
    }
}
