use proptest::prelude::*;

use noisy_ea::engine::{run, RunConfig};
use noisy_ea::noise::{NoiseSpec, SamplingSpec};
use noisy_ea::oracle::{acceptance_probability, expected_noisy_fitness, noisy_pmf};
use noisy_ea::problem::{true_fitness, BitString, ProblemKind};

fn problem() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![Just(ProblemKind::OneMax), Just(ProblemKind::LeadingOnes)]
}

fn noise() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![
        Just(NoiseSpec::Noiseless),
        (0.0..=1.0f64).prop_map(|p| NoiseSpec::OneBit { p }),
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(p, q)| NoiseSpec::BitWise { p, q }),
    ]
}

fn bits(max: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max).prop_map(|v| BitString::from_bits(&v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_form_round_trips(x in bits(150)) {
        let back: BitString = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn noisy_law_is_a_distribution(problem in problem(), x in bits(40), noise in noise()) {
        let d = noisy_pmf(problem, &x, noise);
        prop_assert!(d.is_normalized(1e-12));
        prop_assert!(d.masses().iter().all(|&w| w >= -1e-15));
        prop_assert_eq!(d.max_value(), x.len());
    }

    #[test]
    fn no_noise_means_no_change(problem in problem(), x in bits(40), p in 0.0..=1.0f64) {
        let f = true_fitness(problem, &x) as f64;
        for spec in [NoiseSpec::Noiseless, NoiseSpec::OneBit { p: 0.0 }, NoiseSpec::BitWise { p, q: 0.0 }] {
            prop_assert!((expected_noisy_fitness(problem, &x, spec) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn acceptance_is_a_probability(problem in problem(), n in 1usize..12, a in any::<u64>(), b in any::<u64>(), noise in noise()) {
        let x = BitString::from_u64(n, a);
        let y = BitString::from_u64(n, b);
        let v = acceptance_probability(problem, &x, &y, noise).unwrap();
        let w = acceptance_probability(problem, &y, &x, noise).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        // P(A >= B) + P(B >= A) = 1 + P(A == B) >= 1
        prop_assert!(v + w >= 1.0 - 1e-12);
    }

    #[test]
    fn runs_are_replayable(problem in problem(), n in 1usize..20, noise in noise(), m in 1u64..4, seed in any::<u64>()) {
        let cfg = RunConfig::new(problem, n, noise)
            .with_sampling(SamplingSpec::new(m).unwrap())
            .with_max_evaluations(5_000)
            .with_seed(seed);
        let a = run(&cfg).unwrap();
        prop_assert_eq!(&a, &run(&cfg).unwrap());
        prop_assert!(a.hit != a.censored);
        prop_assert!(a.evaluations <= 5_000);
        if a.hit {
            prop_assert_eq!(a.final_true_fitness, n);
        }
    }
}
