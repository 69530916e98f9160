//! The (1+1)-EA with reevaluation and optional sampling.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::noise::{decide, sampled_fitness_sum, NoiseSpec, SampledFitness, SamplingSpec};
use crate::problem::{is_optimal, true_fitness, uniform_random_solution, BitString, ProblemKind};
use crate::rng::{self, Threshold};

pub const DEFAULT_MAX_EVALUATIONS: u64 = 10_000_000;

/// When a run counts as having found the optimum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HitCriterion {
    /// The maintained solution (after selection) is `1^n`.
    #[default]
    State,
    /// `1^n` has been evaluated, whether or not selection kept it.
    Evaluation,
}

impl FromStr for HitCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "state" => Ok(HitCriterion::State),
            "evaluation" => Ok(HitCriterion::Evaluation),
            other => Err(Error::InvalidConfig(format!("unknown hit criterion `{other}`"))),
        }
    }
}

impl fmt::Display for HitCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HitCriterion::State => "state",
            HitCriterion::Evaluation => "evaluation",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub noise: NoiseSpec,
    pub sampling: SamplingSpec,
    /// Censoring cap on fitness evaluations.
    pub max_evaluations: u64,
    pub seed: u64,
    pub hit: HitCriterion,
}

impl RunConfig {
    pub fn new(problem: ProblemKind, n: usize, noise: NoiseSpec) -> Self {
        RunConfig {
            problem,
            n,
            noise,
            sampling: SamplingSpec::OFF,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            seed: 0,
            hit: HitCriterion::State,
        }
    }

    pub fn with_sampling(mut self, sampling: SamplingSpec) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_max_evaluations(mut self, cap: u64) -> Self {
        self.max_evaluations = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_hit(mut self, hit: HitCriterion) -> Self {
        self.hit = hit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidRunConfig("n must be >= 1".into()));
        }
        self.noise.validate()?;
        if self.max_evaluations < self.sampling.m() {
            return Err(Error::InvalidRunConfig(format!(
                "max_evaluations={} is below the sample size m={}",
                self.max_evaluations,
                self.sampling.m()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub iterations: u64,
    pub evaluations: u64,
    pub hit: bool,
    pub censored: bool,
    pub final_true_fitness: usize,
    pub seed: u64,
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iterations={} evaluations={} hit={} censored={} final_true_fitness={} seed={}",
            self.iterations, self.evaluations, self.hit, self.censored, self.final_true_fitness, self.seed
        )
    }
}

/// Standard bit mutation: every bit flips independently with probability
/// `1/n`. Consumes `n` draws, or none when `n = 1` (the flip is certain).
pub fn mutate<R: RngCore + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    let mut y = x.clone();
    mutate_in_place(&mut y, rng);
    y
}

fn mutate_in_place<R: RngCore + ?Sized>(y: &mut BitString, rng: &mut R) {
    let t = Threshold::new(1.0 / y.len() as f64);
    for i in 0..y.len() {
        if decide(rng, t) {
            y.flip(i);
        }
    }
}

/// Selection rule `f̂(x') >= f̂(x)` on exact sums; ties go to the offspring.
pub fn accept(parent_sum: u64, offspring_sum: u64, m_parent: u64, m_offspring: u64) -> bool {
    SampledFitness {
        sum: offspring_sum,
        m: m_offspring,
    }
    .ge(&SampledFitness {
        sum: parent_sum,
        m: m_parent,
    })
}

/// Observer for the per-iteration state, used by tests and diagnostics.
pub trait RunObserver {
    fn iteration(&mut self, parent: &BitString, offspring: &BitString, accepted: bool);
}

impl RunObserver for () {
    fn iteration(&mut self, _: &BitString, _: &BitString, _: bool) {}
}

/// Runs the EA to a hit or to the evaluation cap.
///
/// Accounting: the initial solution costs one block of `m` evaluations; each
/// iteration evaluates the offspring and re-evaluates the parent with fresh
/// noise, costing `2m`. An iteration is started only when all `2m` of its
/// evaluations fit under `max_evaluations`, so a hit run always satisfies
/// `evaluations = m * (1 + 2 * iterations)`.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    run_observed(config, &mut ())
}

pub fn run_observed<O: RunObserver + ?Sized>(config: &RunConfig, observer: &mut O) -> Result<RunResult> {
    config.validate()?;
    let mut stream = rng::stream(config.seed);
    let rng = &mut stream;
    let (problem, n, noise, sampling) = (config.problem, config.n, config.noise, config.sampling);
    let m = sampling.m();

    let mut x = uniform_random_solution(n, rng);
    // the initial evaluation block; its value is never used because the
    // parent is re-evaluated every iteration
    sampled_fitness_sum(problem, &x, noise, sampling, rng);
    let mut evaluations = m;
    let mut iterations = 0u64;
    let mut hit = is_optimal(problem, &x);
    let mut offspring = x.clone();

    while !hit {
        if evaluations.saturating_add(2 * m) > config.max_evaluations {
            return Ok(RunResult {
                iterations,
                evaluations,
                hit: false,
                censored: true,
                final_true_fitness: true_fitness(problem, &x),
                seed: config.seed,
            });
        }
        offspring.clone_from(&x);
        mutate_in_place(&mut offspring, rng);
        let off = sampled_fitness_sum(problem, &offspring, noise, sampling, rng);
        let par = sampled_fitness_sum(problem, &x, noise, sampling, rng);
        evaluations += 2 * m;
        iterations += 1;
        let accepted = off.ge(&par);
        observer.iteration(&x, &offspring, accepted);
        let offspring_optimal = is_optimal(problem, &offspring);
        if accepted {
            std::mem::swap(&mut x, &mut offspring);
        }
        hit = match config.hit {
            HitCriterion::State => is_optimal(problem, &x),
            HitCriterion::Evaluation => offspring_optimal || is_optimal(problem, &x),
        };
    }

    Ok(RunResult {
        iterations,
        evaluations,
        hit: true,
        censored: false,
        // under evaluation-based hitting this is the optimum that was evaluated
        final_true_fitness: n,
        seed: config.seed,
    })
}

/// One iteration of the EA from a given parent: mutate, evaluate both with
/// fresh noise, select. Returns the next maintained solution.
pub fn step<R: RngCore + ?Sized>(
    problem: ProblemKind,
    parent: &BitString,
    noise: NoiseSpec,
    sampling: SamplingSpec,
    rng: &mut R,
) -> BitString {
    let offspring = mutate(parent, rng);
    let off = sampled_fitness_sum(problem, &offspring, noise, sampling, rng);
    let par = sampled_fitness_sum(problem, parent, noise, sampling, rng);
    if off.ge(&par) {
        offspring
    } else {
        parent.clone()
    }
}
