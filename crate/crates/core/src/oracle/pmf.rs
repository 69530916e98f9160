use crate::error::{Error, Result};

/// Largest support (number of points) a convolution may produce.
pub const SUPPORT_LIMIT: usize = 10_000_000;

/// Probability mass function over the contiguous integer range `0..len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    mass: Vec<f64>,
}

impl Pmf {
    /// Wraps raw masses. Callers are responsible for normalisation; see
    /// [`Pmf::total`] and [`Pmf::is_normalized`].
    pub fn from_masses(mass: Vec<f64>) -> Self {
        assert!(!mass.is_empty(), "pmf needs at least one support point");
        Pmf { mass }
    }

    pub fn point(value: usize, max_value: usize) -> Self {
        assert!(value <= max_value);
        let mut mass = vec![0.0; max_value + 1];
        mass[value] = 1.0;
        Pmf { mass }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Largest value in the support range.
    pub fn max_value(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn prob(&self, value: usize) -> f64 {
        self.mass.get(value).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.mass.iter().all(|&w| (0.0..=1.0 + tol).contains(&w)) && (self.total() - 1.0).abs() <= tol
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(v, &w)| v as f64 * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.mass
            .iter()
            .enumerate()
            .map(|(v, &w)| (v as f64 - mu).powi(2) * w)
            .sum()
    }

    /// `P(X <= v)` for every `v` in the support range.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.mass
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect()
    }

    /// `P(X >= v)`.
    pub fn tail_ge(&self, v: usize) -> f64 {
        self.mass.iter().skip(v).sum()
    }

    /// `P(X <= v)`.
    pub fn tail_le(&self, v: usize) -> f64 {
        self.mass.iter().take(v + 1).sum()
    }

    /// Mixture `(1 - w) * self + w * other` over the wider range.
    pub fn mix(&self, other: &Pmf, w: f64) -> Pmf {
        let len = self.mass.len().max(other.mass.len());
        let mass = (0..len)
            .map(|v| (1.0 - w) * self.prob(v) + w * other.prob(v))
            .collect();
        Pmf { mass }
    }

    fn nonzero_range(&self) -> (usize, usize) {
        let lo = self.mass.iter().position(|&w| w != 0.0).unwrap_or(0);
        let hi = self.mass.iter().rposition(|&w| w != 0.0).unwrap_or(0);
        (lo, hi)
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf) -> Result<Pmf> {
        let points = self.mass.len() + other.mass.len() - 1;
        if points > SUPPORT_LIMIT {
            return Err(Error::SupportTooLarge {
                points,
                limit: SUPPORT_LIMIT,
            });
        }
        let mut mass = vec![0.0; points];
        let (alo, ahi) = self.nonzero_range();
        let (blo, bhi) = other.nonzero_range();
        // ascending support on both sides
        for i in alo..=ahi {
            let wa = self.mass[i];
            if wa == 0.0 {
                continue;
            }
            for j in blo..=bhi {
                mass[i + j] += wa * other.mass[j];
            }
        }
        Ok(Pmf { mass })
    }
}

/// Law of the sum of `m` i.i.d. draws from `a`, by binary powering.
///
/// The support grows to `m * max_value + 1` points; exceeding
/// [`SUPPORT_LIMIT`] is reported before any work is done.
pub fn m_fold_sum_pmf(a: &Pmf, m: u64) -> Result<Pmf> {
    if m == 0 {
        return Err(Error::InvalidRunConfig("sample size m must be >= 1".into()));
    }
    let points = (a.max_value() as u128) * (m as u128) + 1;
    if points > SUPPORT_LIMIT as u128 {
        return Err(Error::SupportTooLarge {
            points: points.min(usize::MAX as u128) as usize,
            limit: SUPPORT_LIMIT,
        });
    }
    let mut result: Option<Pmf> = None;
    let mut base = a.clone();
    let mut k = m;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.convolve(&base)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = base.convolve(&base)?;
    }
    Ok(result.expect("m >= 1"))
}

/// Probabilities of `A >= B`, `A > B` and `A == B` for independent `A`, `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub p_ge: f64,
    pub p_gt: f64,
    pub p_eq: f64,
}

impl Comparison {
    /// `P(A < B)`.
    pub fn p_lt(&self) -> f64 {
        1.0 - self.p_ge
    }
}

pub fn comparison_probability(a: &Pmf, b: &Pmf) -> Comparison {
    let cdf_b = b.cdf();
    let mut p_gt = 0.0;
    let mut p_eq = 0.0;
    for (v, &wa) in a.masses().iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        p_eq += wa * b.prob(v);
        if v > 0 {
            let below = cdf_b[(v - 1).min(cdf_b.len() - 1)];
            p_gt += wa * below;
        }
    }
    Comparison {
        p_ge: p_gt + p_eq,
        p_gt,
        p_eq,
    }
}
