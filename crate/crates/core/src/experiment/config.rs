use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::engine::{HitCriterion, DEFAULT_MAX_EVALUATIONS};
use crate::error::{Error, Result};
use crate::noise::{NoiseFamily, SamplingSpec};
use crate::problem::ProblemKind;
use crate::schedule::Schedule;

/// Sample size, fixed or polynomial in `n` (`c * n^k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSize {
    Fixed(u64),
    Poly { coef: u64, exp: u32 },
}

impl SampleSize {
    pub fn resolve(self, n: usize) -> Result<SamplingSpec> {
        let m = match self {
            SampleSize::Fixed(m) => m,
            SampleSize::Poly { coef, exp } => (n as u64)
                .checked_pow(exp)
                .and_then(|v| v.checked_mul(coef))
                .ok_or_else(|| Error::InvalidConfig(format!("sample size {self} overflows at n={n}")))?,
        };
        SamplingSpec::new(m)
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Fixed(m) => write!(f, "{m}"),
            SampleSize::Poly { coef: 1, exp } => write!(f, "n^{exp}"),
            SampleSize::Poly { coef, exp } => write!(f, "{coef}n^{exp}"),
        }
    }
}

impl FromStr for SampleSize {
    type Err = Error;

    /// `5`, `n`, `n^3`, `4n^3`, `4*n^3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("invalid sample size `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(m) = t.parse::<u64>() {
            return if m >= 1 { Ok(SampleSize::Fixed(m)) } else { Err(bad()) };
        }
        let (coef, rest) = match t.find('n') {
            Some(0) => (1, &t[..]),
            Some(i) => {
                let c = t[..i].trim_end_matches('*');
                (c.parse::<u64>().map_err(|_| bad())?, &t[i..])
            }
            None => return Err(bad()),
        };
        let exp = match rest {
            "n" => 1,
            _ => rest
                .strip_prefix("n^")
                .and_then(|e| e.parse::<u32>().ok())
                .ok_or_else(bad)?,
        };
        if coef == 0 {
            return Err(bad());
        }
        Ok(SampleSize::Poly { coef, exp })
    }
}

/// A sweep over problem sizes.
///
/// File form is flat `key = value` lines; `#` starts a comment. Keys:
///
/// ```text
/// problem         = onemax | leadingones
/// noise           = none | onebit | bitwise      (or a full spec: bitwise:p=..,q=..)
/// p               = <number or schedule>         (onebit, bitwise)
/// q               = <number or schedule>         (bitwise)
/// m               = <integer> | <c>n^<k>         (default 1)
/// n_grid          = 5,10,15
/// runs_per_n      = 1000
/// max_evaluations = 10000000
/// master_seed     = 0
/// output          = results.csv                  (optional)
/// hit             = state | evaluation           (default state)
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub noise: NoiseFamily,
    pub sampling: SampleSize,
    pub n_grid: Vec<usize>,
    pub runs_per_n: u64,
    pub max_evaluations: u64,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub hit: HitCriterion,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, noise: NoiseFamily, n_grid: Vec<usize>) -> Self {
        ExperimentConfig {
            problem,
            noise,
            sampling: SampleSize::Fixed(1),
            n_grid,
            runs_per_n: 1000,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            master_seed: 0,
            output: None,
            hit: HitCriterion::State,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("n_grid is empty".into()));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "n_grid must be strictly increasing positive integers".into(),
            ));
        }
        if self.runs_per_n == 0 {
            return Err(Error::InvalidConfig("runs_per_n must be >= 1".into()));
        }
        for &n in &self.n_grid {
            self.noise.resolve(n)?;
            let m = self.sampling.resolve(n)?;
            if self.max_evaluations < m.m() {
                return Err(Error::InvalidConfig(format!(
                    "max_evaluations={} is below m={} at n={n}",
                    self.max_evaluations,
                    m.m()
                )));
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Applies one `key=value` setting (the same keys as the file form).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |what: &str| -> Result<u64> {
            value
                .trim()
                .replace('_', "")
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{what}: cannot parse `{value}`")))
        };
        match key.trim() {
            "problem" => self.problem = value.parse()?,
            "noise" => {
                let v = value.trim();
                self.noise = if v.contains(':') {
                    v.parse()?
                } else {
                    match v {
                        "none" | "noiseless" => NoiseFamily::Noiseless,
                        "onebit" => NoiseFamily::OneBit {
                            p: noise_p(&self.noise),
                        },
                        "bitwise" => NoiseFamily::BitWise {
                            p: noise_p(&self.noise),
                            q: noise_q(&self.noise),
                        },
                        other => return Err(Error::InvalidNoise(other.into())),
                    }
                };
            }
            "p" => {
                let p: Schedule = value.parse()?;
                match &mut self.noise {
                    NoiseFamily::OneBit { p: slot } | NoiseFamily::BitWise { p: slot, .. } => *slot = p,
                    NoiseFamily::Noiseless => {
                        return Err(Error::InvalidConfig("`p` given for noise = none".into()))
                    }
                }
            }
            "q" => {
                let q: Schedule = value.parse()?;
                match &mut self.noise {
                    NoiseFamily::BitWise { q: slot, .. } => *slot = q,
                    _ => return Err(Error::InvalidConfig("`q` only applies to bitwise noise".into())),
                }
            }
            "m" => self.sampling = value.parse()?,
            "n_grid" => {
                self.n_grid = value
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::InvalidConfig(format!("n_grid: bad entry `{t}`")))
                    })
                    .collect::<Result<_>>()?;
            }
            "runs_per_n" => self.runs_per_n = num("runs_per_n")?,
            "max_evaluations" => self.max_evaluations = num("max_evaluations")?,
            "master_seed" => self.master_seed = num("master_seed")?,
            "output" => {
                let v = value.trim();
                self.output = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "hit" => self.hit = value.parse()?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

// placeholders used while `noise` is given before `p`/`q`; a config whose
// schedules were never set still validates, with zero-probability noise
fn noise_p(f: &NoiseFamily) -> Schedule {
    match *f {
        NoiseFamily::OneBit { p } | NoiseFamily::BitWise { p, .. } => p,
        NoiseFamily::Noiseless => Schedule::Const(0.0),
    }
}

fn noise_q(f: &NoiseFamily) -> Schedule {
    match *f {
        NoiseFamily::BitWise { q, .. } => q,
        _ => Schedule::Const(0.0),
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::new(ProblemKind::OneMax, NoiseFamily::Noiseless, Vec::new());
        let mut seen_problem = false;
        // `noise` must be applied before `p` / `q`
        let mut deferred = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            if key == "problem" {
                seen_problem = true;
            }
            if key == "p" || key == "q" {
                deferred.push((key.to_string(), value.to_string()));
            } else {
                cfg.set(key, value)?;
            }
        }
        for (k, v) in deferred {
            cfg.set(&k, &v)?;
        }
        if !seen_problem {
            return Err(Error::InvalidConfig("missing key `problem`".into()));
        }
        Ok(cfg)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem = {}", self.problem)?;
        writeln!(f, "noise = {}", self.noise.kind())?;
        match self.noise {
            NoiseFamily::Noiseless => {}
            NoiseFamily::OneBit { p } => writeln!(f, "p = {p}")?,
            NoiseFamily::BitWise { p, q } => {
                writeln!(f, "p = {p}")?;
                writeln!(f, "q = {q}")?;
            }
        }
        writeln!(f, "m = {}", self.sampling)?;
        let grid: Vec<String> = self.n_grid.iter().map(|n| n.to_string()).collect();
        writeln!(f, "n_grid = {}", grid.join(","))?;
        writeln!(f, "runs_per_n = {}", self.runs_per_n)?;
        writeln!(f, "max_evaluations = {}", self.max_evaluations)?;
        writeln!(f, "master_seed = {}", self.master_seed)?;
        if let Some(out) = &self.output {
            writeln!(f, "output = {}", out.display())?;
        }
        writeln!(f, "hit = {}", self.hit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_forms() {
        assert_eq!("5".parse::<SampleSize>().unwrap(), SampleSize::Fixed(5));
        assert_eq!("4n^3".parse::<SampleSize>().unwrap(), SampleSize::Poly { coef: 4, exp: 3 });
        assert_eq!("4*n^3".parse::<SampleSize>().unwrap(), SampleSize::Poly { coef: 4, exp: 3 });
        assert_eq!("n".parse::<SampleSize>().unwrap(), SampleSize::Poly { coef: 1, exp: 1 });
        assert_eq!(SampleSize::Poly { coef: 4, exp: 3 }.resolve(5).unwrap().m(), 500);
        for bad in ["0", "x", "n^", "0n^2", "-3"] {
            assert!(bad.parse::<SampleSize>().is_err(), "{bad}");
        }
        assert!(SampleSize::Poly { coef: 2, exp: 40 }.resolve(1000).is_err());
    }

    #[test]
    fn parse_file_form() {
        let text = "\
# figure 1(c)
q = 1/n
problem = leadingones
noise = bitwise
p = ln(n)/n
n_grid = 5, 10, 15
runs_per_n = 200
max_evaluations = 10_000_000
master_seed = 7
output = out.csv
";
        let cfg: ExperimentConfig = text.parse().unwrap();
        assert_eq!(cfg.problem, ProblemKind::LeadingOnes);
        assert_eq!(
            cfg.noise,
            NoiseFamily::BitWise {
                p: Schedule::LogNOverN,
                q: Schedule::OneOverN
            }
        );
        assert_eq!(cfg.n_grid, vec![5, 10, 15]);
        assert_eq!(cfg.runs_per_n, 200);
        assert_eq!(cfg.max_evaluations, 10_000_000);
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
        cfg.validate().unwrap();

        let again: ExperimentConfig = cfg.to_string().parse().unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!("noise = none\nn_grid = 4".parse::<ExperimentConfig>().is_err());
        assert!("problem = onemax\nfoo = 1".parse::<ExperimentConfig>().is_err());
        assert!("problem = onemax\nn_grid = 4,x".parse::<ExperimentConfig>().is_err());
        assert!("problem = onemax\nnoise = none\np = 0.5".parse::<ExperimentConfig>().is_err());

        let mut cfg = ExperimentConfig::new(ProblemKind::OneMax, NoiseFamily::Noiseless, vec![8, 8]);
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![4, 8];
        cfg.runs_per_n = 0;
        assert!(cfg.validate().is_err());
        cfg.runs_per_n = 1;
        cfg.noise = NoiseFamily::OneBit { p: Schedule::LogNOverN };
        cfg.n_grid = vec![1, 8];
        assert!(matches!(cfg.validate(), Err(Error::ScheduleDomain { .. })));
    }

    #[test]
    fn full_noise_spec_in_one_key() {
        let cfg: ExperimentConfig = "problem=onemax\nnoise=onebit:p=0.25\nn_grid=4".parse().unwrap();
        assert_eq!(cfg.noise, NoiseFamily::OneBit { p: Schedule::Const(0.25) });
    }
}
