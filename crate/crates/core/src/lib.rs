//! The (1+1) evolutionary algorithm on OneMax and LeadingOnes under prior
//! noise, with and without sampling.
//!
//! - [`problem`]: bitstrings and the two benchmark functions.
//! - [`noise`]: one-bit and bit-wise prior noise, noisy and sampled evaluation.
//! - [`oracle`]: exact laws of noisy fitness values and acceptance events.
//! - [`engine`]: the EA itself, with evaluation accounting and censoring.
//! - [`experiment`]: seeded, parallel parameter sweeps written as CSV.
//! - [`theory`]: fixed-`n` checks of runtime-proof hypotheses and drift.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod noise;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod schedule;
pub mod theory;

pub use engine::{accept, mutate, run, HitCriterion, RunConfig, RunResult};
pub use error::{Error, Result};
pub use experiment::{run_experiment, write_csv, ExperimentConfig, ResultRow, SampleSize};
pub use noise::{
    noisy_fitness, perturb, sampled_fitness_sum, NoiseFamily, NoiseSpec, SampledFitness, SamplingSpec,
};
pub use oracle::{
    acceptance_probability, comparison_probability, expected_noisy_fitness, m_fold_sum_pmf,
    mc_sampled_comparison, noisy_pmf, sampled_acceptance_probability, Comparison, Pmf,
};
pub use problem::{is_optimal, true_fitness, uniform_random_solution, BitString, ProblemKind};
pub use schedule::Schedule;
pub use theory::{
    check_lemma4, check_lemma5, empirical_drift, sampling_gap, verify_closed_forms, ConditionReport,
    DriftEstimate,
};
