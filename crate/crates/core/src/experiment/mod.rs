//! Replicated runs over an `n` grid, aggregated into figure-ready rows.
//!
//! Every run is seeded by `derive_seed(master_seed, n, run_index)` and the
//! results are placed in per-run slots before aggregation, so the output
//! does not depend on the worker count or on completion order.

mod config;
mod csv;

pub use config::{ExperimentConfig, SampleSize};
pub use csv::{render_csv, write_csv, CSV_HEADER};

use rayon::prelude::*;

use crate::engine::{run, RunConfig, RunResult};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub p: f64,
    /// `None` for one-bit noise, which has no per-bit rate.
    pub q: Option<f64>,
    pub m: u64,
    pub runs: u64,
    pub hits: u64,
    pub censored: u64,
    pub mean_evaluations: f64,
    pub median_evaluations: f64,
    pub stddev_evaluations: f64,
    /// `ln(mean_evaluations) / ln(n)`.
    pub normalized: f64,
    pub master_seed: u64,
}

/// One finished run and where it sits in the sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub n: usize,
    pub run_index: u64,
    pub result: RunResult,
}

struct Job {
    n: usize,
    run_index: u64,
    config: RunConfig,
}

fn jobs(config: &ExperimentConfig) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for &n in &config.n_grid {
        let noise = config.noise.resolve(n)?;
        let sampling = config.sampling.resolve(n)?;
        for run_index in 0..config.runs_per_n {
            let rc = RunConfig::new(config.problem, n, noise)
                .with_sampling(sampling)
                .with_max_evaluations(config.max_evaluations)
                .with_seed(derive_seed(config.master_seed, n as u64, run_index))
                .with_hit(config.hit);
            out.push(Job { n, run_index, config: rc });
        }
    }
    Ok(out)
}

/// Executes every run of the sweep on `workers` threads (1 = the calling
/// thread) and returns the records ordered by `(n, run_index)`.
pub fn run_all(config: &ExperimentConfig, workers: usize) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let jobs = jobs(config)?;
    let exec = |job: &Job| -> Result<RunRecord> {
        Ok(RunRecord {
            n: job.n,
            run_index: job.run_index,
            result: run(&job.config)?,
        })
    };
    if workers <= 1 {
        return jobs.iter().map(exec).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| jobs.par_iter().with_max_len(1).map(exec).collect())
}

pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Vec<ResultRow>> {
    let records = run_all(config, workers)?;
    aggregate(config, &records)
}

/// Builds one row per grid point from stored records.
///
/// Censored runs contribute `max_evaluations` to mean, median and standard
/// deviation and are counted in `censored`.
pub fn aggregate(config: &ExperimentConfig, records: &[RunRecord]) -> Result<Vec<ResultRow>> {
    config
        .n_grid
        .iter()
        .map(|&n| {
            let mut evals: Vec<u64> = records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| {
                    if r.result.censored {
                        config.max_evaluations
                    } else {
                        r.result.evaluations
                    }
                })
                .collect();
            let hits = records.iter().filter(|r| r.n == n && r.result.hit).count() as u64;
            let censored = records.iter().filter(|r| r.n == n && r.result.censored).count() as u64;
            let noise = config.noise.resolve(n)?;
            let m = config.sampling.resolve(n)?.m();
            let (mean, median, sd) = summarize(&mut evals);
            let (p, q) = match noise {
                NoiseSpec::Noiseless => (0.0, Some(0.0)),
                NoiseSpec::OneBit { p } => (p, None),
                NoiseSpec::BitWise { p, q } => (p, Some(q)),
            };
            Ok(ResultRow {
                n,
                p,
                q,
                m,
                runs: evals.len() as u64,
                hits,
                censored,
                mean_evaluations: mean,
                median_evaluations: median,
                stddev_evaluations: sd,
                normalized: mean.ln() / (n as f64).ln(),
                master_seed: config.master_seed,
            })
        })
        .collect()
}

/// Mean, median and sample standard deviation; sorts `values`.
fn summarize(values: &mut [u64]) -> (f64, f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let count = values.len();
    let total: u128 = values.iter().map(|&v| v as u128).sum();
    let mean = total as f64 / count as f64;
    values.sort_unstable();
    let median = if count % 2 == 1 {
        values[count / 2] as f64
    } else {
        (values[count / 2 - 1] as f64 + values[count / 2] as f64) / 2.0
    };
    let sd = if count < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
        (ss / (count - 1) as f64).sqrt()
    };
    (mean, median, sd)
}
