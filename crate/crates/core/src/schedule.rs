//! Noise-parameter schedules as functions of the problem size.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A probability given as a function of `n`. All logarithms are natural.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    Const(f64),
    /// `(ln n / n)^2`
    LogNOverN2Sq,
    /// `ln n / n^(3/2)`
    LogNOverN32,
    /// `ln n / n`
    LogNOverN,
    /// `(ln n)^2 / n^3`
    LogN2OverN3,
    /// `ln n / n^(5/2)`
    LogNOverN52,
    /// `ln n / n^2`
    LogNOverN2,
    /// `1 / n`
    OneOverN,
}

impl Schedule {
    /// Value at problem size `n`, clamped to `[0, 1]`.
    ///
    /// Only `Const` is defined for `n < 2`; every other schedule reports a
    /// domain error there.
    pub fn eval(self, n: usize) -> Result<f64> {
        if let Schedule::Const(v) = self {
            return Ok(v.clamp(0.0, 1.0));
        }
        if n < 2 {
            return Err(Error::ScheduleDomain {
                schedule: self.to_string(),
                n,
            });
        }
        let nf = n as f64;
        let ln = nf.ln();
        let v = match self {
            Schedule::Const(_) => unreachable!(),
            Schedule::LogNOverN2Sq => (ln / nf).powi(2),
            Schedule::LogNOverN32 => ln / nf.powf(1.5),
            Schedule::LogNOverN => ln / nf,
            Schedule::LogN2OverN3 => ln * ln / nf.powi(3),
            Schedule::LogNOverN52 => ln / nf.powf(2.5),
            Schedule::LogNOverN2 => ln / (nf * nf),
            Schedule::OneOverN => 1.0 / nf,
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Whether the schedule is a fixed number, independent of `n`.
    pub fn constant(self) -> Option<f64> {
        match self {
            Schedule::Const(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Const(v) => write!(f, "{v}"),
            Schedule::LogNOverN2Sq => f.write_str("(ln(n)/n)^2"),
            Schedule::LogNOverN32 => f.write_str("ln(n)/n^1.5"),
            Schedule::LogNOverN => f.write_str("ln(n)/n"),
            Schedule::LogN2OverN3 => f.write_str("ln(n)^2/n^3"),
            Schedule::LogNOverN52 => f.write_str("ln(n)/n^2.5"),
            Schedule::LogNOverN2 => f.write_str("ln(n)/n^2"),
            Schedule::OneOverN => f.write_str("1/n"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// Accepts a number, or one of the symbolic forms; `ln(n)`, `log(n)`,
    /// `logn` and `lnn` are interchangeable and whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        if let Ok(v) = compact.parse::<f64>() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ProbabilityOutOfRange {
                    name: "schedule",
                    value: v,
                });
            }
            return Ok(Schedule::Const(v));
        }
        let norm = compact
            .replace("log(n)", "L")
            .replace("ln(n)", "L")
            .replace("logn", "L")
            .replace("lnn", "L")
            .replace("(L)", "L");
        let sched = match norm.as_str() {
            "1/n" => Schedule::OneOverN,
            "L/n" => Schedule::LogNOverN,
            "(L/n)^2" => Schedule::LogNOverN2Sq,
            "L/n^1.5" | "L/n^(3/2)" => Schedule::LogNOverN32,
            "L^2/n^3" => Schedule::LogN2OverN3,
            "L/n^2.5" | "L/n^(5/2)" => Schedule::LogNOverN52,
            "L/n^2" => Schedule::LogNOverN2,
            _ => return Err(Error::InvalidSchedule(s.to_string())),
        };
        Ok(sched)
    }
}
