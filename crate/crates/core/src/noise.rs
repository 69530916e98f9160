//! Prior noise: the solution is perturbed before it is evaluated.
//!
//! Draw budget per perturbation (one `u64` per non-degenerate decision; a
//! probability of exactly 0 or 1 is decided without drawing):
//!
//! | model            | draws                                             |
//! |------------------|---------------------------------------------------|
//! | `Noiseless`      | 0                                                 |
//! | `OneBit{p}`      | 1 for "noise happens", +1 for the flipped position |
//! | `BitWise{p, q}`  | 1 for "noise happens", +n for the per-bit flips    |
//!
//! With the degenerate-decision rule, `OneBit{0}`, `BitWise{0, q}` and
//! `BitWise{p, 0}` consume no draws at all, so they replay exactly like
//! `Noiseless`.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::problem::{true_fitness, BitString, ProblemKind};
use crate::rng::{self, Threshold};
use crate::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Noiseless,
    /// With probability `p`, one uniformly chosen bit is flipped.
    OneBit { p: f64 },
    /// With probability `p`, every bit is flipped independently with probability `q`.
    BitWise { p: f64, q: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::ProbabilityOutOfRange { name, value })
            }
        };
        match *self {
            NoiseSpec::Noiseless => Ok(()),
            NoiseSpec::OneBit { p } => check("p", p),
            NoiseSpec::BitWise { p, q } => check("p", p).and(check("q", q)),
        }
    }

    /// Collapses the parameterisations that cannot change a solution.
    pub fn normalized(self) -> NoiseSpec {
        match self {
            NoiseSpec::OneBit { p: 0.0 } => NoiseSpec::Noiseless,
            NoiseSpec::BitWise { p, q } if p == 0.0 || q == 0.0 => NoiseSpec::Noiseless,
            other => other,
        }
    }

    pub fn p(&self) -> f64 {
        match *self {
            NoiseSpec::Noiseless => 0.0,
            NoiseSpec::OneBit { p } | NoiseSpec::BitWise { p, .. } => p,
        }
    }

    /// Per-bit flip probability when noise happens; `None` for one-bit noise.
    pub fn q(&self) -> Option<f64> {
        match *self {
            NoiseSpec::BitWise { q, .. } => Some(q),
            NoiseSpec::Noiseless => Some(0.0),
            NoiseSpec::OneBit { .. } => None,
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::Noiseless => f.write_str("none"),
            NoiseSpec::OneBit { p } => write!(f, "onebit:p={p}"),
            NoiseSpec::BitWise { p, q } => write!(f, "bitwise:p={p},q={q}"),
        }
    }
}

/// Noise model whose parameters may depend on `n` (e.g. `q = 1/n`).
///
/// Text form: `none`, `onebit:p=<sched>`, `bitwise:p=<sched>,q=<sched>`,
/// where `<sched>` is a number or a [`Schedule`] expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseFamily {
    Noiseless,
    OneBit { p: Schedule },
    BitWise { p: Schedule, q: Schedule },
}

impl NoiseFamily {
    pub fn resolve(&self, n: usize) -> Result<NoiseSpec> {
        let spec = match *self {
            NoiseFamily::Noiseless => NoiseSpec::Noiseless,
            NoiseFamily::OneBit { p } => NoiseSpec::OneBit { p: p.eval(n)? },
            NoiseFamily::BitWise { p, q } => NoiseSpec::BitWise {
                p: p.eval(n)?,
                q: q.eval(n)?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseFamily::Noiseless => "none",
            NoiseFamily::OneBit { .. } => "onebit",
            NoiseFamily::BitWise { .. } => "bitwise",
        }
    }
}

impl From<NoiseSpec> for NoiseFamily {
    fn from(spec: NoiseSpec) -> Self {
        match spec {
            NoiseSpec::Noiseless => NoiseFamily::Noiseless,
            NoiseSpec::OneBit { p } => NoiseFamily::OneBit {
                p: Schedule::Const(p),
            },
            NoiseSpec::BitWise { p, q } => NoiseFamily::BitWise {
                p: Schedule::Const(p),
                q: Schedule::Const(q),
            },
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseFamily::Noiseless => f.write_str("none"),
            NoiseFamily::OneBit { p } => write!(f, "onebit:p={p}"),
            NoiseFamily::BitWise { p, q } => write!(f, "bitwise:p={p},q={q}"),
        }
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidNoise(s.to_string());
        let s_trim = s.trim();
        let (kind, params) = match s_trim.split_once(':') {
            Some((k, rest)) => (k.trim().to_ascii_lowercase(), rest),
            None => (s_trim.to_ascii_lowercase(), ""),
        };
        let mut p = None;
        let mut q = None;
        for part in params.split(',').filter(|t| !t.trim().is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let sched: Schedule = value.parse()?;
            match key.trim() {
                "p" if p.is_none() => p = Some(sched),
                "q" if q.is_none() => q = Some(sched),
                _ => return Err(bad()),
            }
        }
        match kind.as_str() {
            "none" | "noiseless" if p.is_none() && q.is_none() => Ok(NoiseFamily::Noiseless),
            "onebit" if q.is_none() => Ok(NoiseFamily::OneBit {
                p: p.ok_or_else(bad)?,
            }),
            "bitwise" => Ok(NoiseFamily::BitWise {
                p: p.ok_or_else(bad)?,
                q: q.ok_or_else(bad)?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Number of independent noisy evaluations averaged per fitness estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SamplingSpec(u64);

impl SamplingSpec {
    pub const OFF: SamplingSpec = SamplingSpec(1);

    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidRunConfig("sample size m must be >= 1".into()));
        }
        Ok(SamplingSpec(m))
    }

    pub fn m(self) -> u64 {
        self.0
    }
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self::OFF
    }
}

/// Bernoulli decision that skips the draw when the outcome is certain.
#[inline]
pub(crate) fn decide<R: RngCore + ?Sized>(rng: &mut R, t: Threshold) -> bool {
    if t.never() {
        false
    } else if t.always() {
        true
    } else {
        rng::bernoulli(rng, t)
    }
}

/// Flips bits of `x` in place according to one noise event. Returns whether
/// noise occurred (which may still leave `x` unchanged under bit-wise noise).
fn apply<R: RngCore + ?Sized>(x: &mut BitString, noise: NoiseSpec, rng: &mut R) -> bool {
    match noise {
        NoiseSpec::Noiseless => false,
        NoiseSpec::OneBit { p } => {
            if !decide(rng, Threshold::new(p)) {
                return false;
            }
            let i = rng::index(rng, x.len());
            x.flip(i);
            true
        }
        NoiseSpec::BitWise { p, q } => {
            let tq = Threshold::new(q);
            if tq.never() || !decide(rng, Threshold::new(p)) {
                return false;
            }
            for i in 0..x.len() {
                if decide(rng, tq) {
                    x.flip(i);
                }
            }
            true
        }
    }
}

/// The evaluation copy `x'` of `x`; `x` itself is untouched.
pub fn perturb<R: RngCore + ?Sized>(x: &BitString, noise: NoiseSpec, rng: &mut R) -> BitString {
    let mut copy = x.clone();
    apply(&mut copy, noise, rng);
    copy
}

/// One noisy evaluation, `f(perturb(x))`, with fresh noise.
pub fn noisy_fitness<R: RngCore + ?Sized>(
    problem: ProblemKind,
    x: &BitString,
    noise: NoiseSpec,
    rng: &mut R,
) -> usize {
    if matches!(noise.normalized(), NoiseSpec::Noiseless) {
        return true_fitness(problem, x);
    }
    let mut copy = x.clone();
    if apply(&mut copy, noise, rng) {
        true_fitness(problem, &copy)
    } else {
        true_fitness(problem, x)
    }
}

/// Exact representation of a sampled average `sum / m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampledFitness {
    pub sum: u64,
    pub m: u64,
}

impl SampledFitness {
    /// `self >= other` as averages, by cross-multiplication.
    pub fn ge(&self, other: &SampledFitness) -> bool {
        (self.sum as u128) * (other.m as u128) >= (other.sum as u128) * (self.m as u128)
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.m as f64
    }
}

/// Sum of `m` independent noisy evaluations of `x`.
pub fn sampled_fitness_sum<R: RngCore + ?Sized>(
    problem: ProblemKind,
    x: &BitString,
    noise: NoiseSpec,
    sampling: SamplingSpec,
    rng: &mut R,
) -> SampledFitness {
    let m = sampling.m();
    let sum = (0..m)
        .map(|_| noisy_fitness(problem, x, noise, rng) as u64)
        .sum();
    SampledFitness { sum, m }
}
