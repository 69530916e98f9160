use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use noisy_ea::engine::{run, HitCriterion, RunConfig, DEFAULT_MAX_EVALUATIONS};
use noisy_ea::experiment::{render_csv, run_experiment, write_csv, ExperimentConfig};
use noisy_ea::noise::{NoiseFamily, NoiseSpec, SamplingSpec};
use noisy_ea::oracle::{
    acceptance_probability, expected_noisy_fitness, mc_sampled_comparison, noisy_pmf,
    sampled_acceptance_probability,
};
use noisy_ea::problem::{BitString, ProblemKind};
use noisy_ea::rng;
use noisy_ea::theory::{
    check_lemma4, check_lemma5, empirical_drift, sampling_gap, verify_closed_forms, ConditionReport,
};
use noisy_ea::Error;

#[derive(Parser)]
#[command(name = "noisy-ea", version, about = "(1+1)-EA under prior noise: runs, sweeps, exact oracle, hypothesis checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run and print the result as key=value pairs.
    Run {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        /// none | onebit:p=<v> | bitwise:p=<v>,q=<v>  (q may be 1/n)
        #[arg(long, default_value = "none", value_parser = parse_noise)]
        noise: NoiseFamily,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_EVALUATIONS)]
        max_evaluations: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Hit::State)]
        hit: Hit,
    },
    /// Exact noisy-fitness laws and acceptance probabilities.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Run a parameter sweep from a key=value config file and emit CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Overrides `output` in the config file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override any config key, e.g. `--set runs_per_n=100`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check proof hypotheses and closed forms at a fixed n.
    Verify {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "none", value_parser = parse_noise)]
        noise: NoiseFamily,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        l: Option<f64>,
        /// drift: problem to step on
        #[arg(long, default_value = "onemax", value_parser = parse_problem)]
        problem: ProblemKind,
        /// drift: number of 0-bits of the sampled states
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// drift: require the drift to be positive/negative at 3 sigma
        #[arg(long, value_enum)]
        expect: Option<Sign>,
    },
}

#[derive(Subcommand)]
enum OracleQuery {
    /// Law of f^n(x) as `value,mass` CSV rows.
    Pmf {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long)]
        x: BitString,
        #[arg(long, default_value = "none", value_parser = parse_noise)]
        noise: NoiseFamily,
    },
    /// E(f^n(x)).
    Mean {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long)]
        x: BitString,
        #[arg(long, default_value = "none", value_parser = parse_noise)]
        noise: NoiseFamily,
    },
    /// P(f̂(offspring) >= f̂(parent)), exact; `--mc-trials` adds a Monte-Carlo estimate.
    Accept {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long)]
        parent: BitString,
        #[arg(long)]
        offspring: BitString,
        #[arg(long, default_value = "none", value_parser = parse_noise)]
        noise: NoiseFamily,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        mc_trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Hit {
    State,
    Evaluation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Lemma4,
    Lemma5,
    Gap,
    Forms,
    Drift,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Positive,
    Negative,
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_noise(s: &str) -> Result<NoiseFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every requested check passed.
fn execute(command: Command) -> noisy_ea::Result<bool> {
    match command {
        Command::Run {
            problem,
            n,
            noise,
            m,
            max_evaluations,
            seed,
            hit,
        } => {
            let cfg = RunConfig::new(problem, n, noise.resolve(n)?)
                .with_sampling(SamplingSpec::new(m)?)
                .with_max_evaluations(max_evaluations)
                .with_seed(seed)
                .with_hit(match hit {
                    Hit::State => HitCriterion::State,
                    Hit::Evaluation => HitCriterion::Evaluation,
                });
            println!("{}", run(&cfg)?);
            Ok(true)
        }
        Command::Oracle { query } => oracle(query).map(|_| true),
        Command::Experiment {
            config,
            workers,
            out,
            overrides,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            for kv in &overrides {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidConfig(format!("--set expects KEY=VALUE, got `{kv}`")))?;
                cfg.set(k, v)?;
            }
            if out.is_some() {
                cfg.output = out;
            }
            let rows = run_experiment(&cfg, workers)?;
            match &cfg.output {
                Some(path) => {
                    write_csv(&rows, path)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{}", render_csv(&rows)),
            }
            Ok(true)
        }
        Command::Verify {
            check,
            n,
            noise,
            m,
            c,
            l,
            problem,
            level,
            trials,
            seed,
            expect,
        } => verify(check, n, noise, m, c, l, problem, level, trials, seed, expect),
    }
}

fn oracle(query: OracleQuery) -> noisy_ea::Result<()> {
    match query {
        OracleQuery::Pmf { problem, x, noise } => {
            let d = noisy_pmf(problem, &x, noise.resolve(x.len())?);
            println!("value,mass");
            for (v, w) in d.masses().iter().enumerate() {
                println!("{v},{w:.17e}");
            }
        }
        OracleQuery::Mean { problem, x, noise } => {
            let e = expected_noisy_fitness(problem, &x, noise.resolve(x.len())?);
            println!("expected_noisy_fitness={e:.17e}");
        }
        OracleQuery::Accept {
            problem,
            parent,
            offspring,
            noise,
            m,
            mc_trials,
            seed,
        } => {
            let spec: NoiseSpec = noise.resolve(parent.len())?;
            let exact = if m == 1 {
                acceptance_probability(problem, &parent, &offspring, spec)?
            } else {
                sampled_acceptance_probability(problem, &parent, &offspring, spec, m)?
            };
            println!("acceptance_probability={exact:.17e}");
            if let Some(trials) = mc_trials {
                let mut r = rng::stream(seed);
                let (est, ci) = mc_sampled_comparison(problem, &offspring, &parent, spec, m, trials, &mut r)?;
                println!("mc_estimate={est:.17e} ci95={ci:.3e} trials={trials}");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    check: Check,
    n: usize,
    noise: NoiseFamily,
    m: u64,
    c: Option<f64>,
    l: Option<f64>,
    problem: ProblemKind,
    level: usize,
    trials: u64,
    seed: u64,
    expect: Option<Sign>,
) -> noisy_ea::Result<bool> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::InvalidConfig(format!("--check needs --{name}")))
    };
    let print_all = |reports: &[ConditionReport]| {
        for r in reports {
            println!("{r}");
        }
        reports.iter().all(|r| r.satisfied)
    };
    match check {
        Check::Lemma4 => {
            let r = check_lemma4(n, noise.resolve(n)?, m, need(c, "c")?, need(l, "l")?)?;
            Ok(print_all(&[r]))
        }
        Check::Lemma5 => {
            let r = check_lemma5(n, noise.resolve(n)?, m, need(c, "c")?, need(l, "l")?)?;
            Ok(print_all(&[r]))
        }
        Check::Gap => {
            let spec = noise.resolve(n)?;
            let gap = sampling_gap(n, spec)?;
            println!("name=sampling_gap n={n} noise={spec} gap={gap:.17e} satisfied={}", gap > 0.0);
            Ok(gap > 0.0)
        }
        Check::Forms => Ok(print_all(&verify_closed_forms(n)?)),
        Check::Drift => {
            let spec = noise.resolve(n)?;
            let mut r = rng::stream(seed);
            let d = empirical_drift(problem, n, spec, m, level, trials, &mut r)?;
            let sigma3 = 3.0 / 1.96 * d.ci95;
            let ok = match expect {
                None => true,
                Some(Sign::Positive) => d.drift - sigma3 > 0.0,
                Some(Sign::Negative) => d.drift + sigma3 < 0.0,
            };
            println!(
                "name=drift problem={problem} n={n} noise={spec} m={m} level={level} trials={trials} seed={seed} drift={:.6e} ci95={:.3e} satisfied={ok}",
                d.drift, d.ci95
            );
            Ok(ok)
        }
    }
}
