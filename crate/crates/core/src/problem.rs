//! Solutions and the two benchmark functions.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A fixed-length binary string.
///
/// Position 1 is the leftmost character of the textual form and is stored in
/// bit 0 of the first word. Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "bitstring length must be at least 1");
        BitString {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        s.words.iter_mut().for_each(|w| *w = u64::MAX);
        s.clear_tail();
        s
    }

    /// `1^ones 0^(len-ones)`, the canonical member of a OneMax level.
    pub fn prefix_ones(len: usize, ones: usize) -> Self {
        assert!(ones <= len);
        let mut s = Self::zeros(len);
        for i in 0..ones {
            s.set(i, true);
        }
        s
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidBitString("empty".into()));
        }
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        Ok(s)
    }

    /// Builds a string of length `len` from the low `len` bits of `value`
    /// (bit `i` of `value` becomes position `i + 1`). Requires `len <= 64`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!((1..=WORD).contains(&len));
        let mut s = Self::zeros(len);
        s.words[0] = value & tail_mask(len);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bit at zero-based index `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Length of the maximal all-ones prefix.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for &w in &self.words {
            let run = w.trailing_ones() as usize;
            total += run;
            if run < WORD {
                break;
            }
        }
        total.min(self.len)
    }

    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBitString(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    OneMax,
    LeadingOnes,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::OneMax => "onemax",
            ProblemKind::LeadingOnes => "leadingones",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "onemax" => Ok(ProblemKind::OneMax),
            "leadingones" | "lo" => Ok(ProblemKind::LeadingOnes),
            other => Err(Error::InvalidConfig(format!("unknown problem `{other}`"))),
        }
    }
}

pub fn true_fitness(problem: ProblemKind, x: &BitString) -> usize {
    match problem {
        ProblemKind::OneMax => x.count_ones(),
        ProblemKind::LeadingOnes => x.leading_ones(),
    }
}

/// Both problems have the single optimum `1^n`.
pub fn is_optimal(problem: ProblemKind, x: &BitString) -> bool {
    true_fitness(problem, x) == x.len()
}

/// Uniform sample from `{0,1}^n`.
///
/// Consumes exactly `ceil(n / 64)` draws: word `w` of the result is the
/// `w`-th draw, with bits past `n` masked off.
pub fn uniform_random_solution<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> BitString {
    let mut s = BitString::zeros(n);
    for w in s.words_mut() {
        *w = rng.next_u64();
    }
    s.clear_tail();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(true_fitness(ProblemKind::OneMax, &bs("1111")), 4);
        assert_eq!(true_fitness(ProblemKind::LeadingOnes, &bs("1101")), 2);
        assert_eq!(true_fitness(ProblemKind::LeadingOnes, &bs("0111")), 0);
    }

    #[test]
    fn optimality_examples() {
        assert!(is_optimal(ProblemKind::OneMax, &bs("111")));
        assert!(!is_optimal(ProblemKind::LeadingOnes, &bs("110")));
        assert!(!is_optimal(ProblemKind::OneMax, &bs("011")));
    }

    #[test]
    fn optimality_is_all_ones_exhaustive() {
        for n in 1..=12 {
            let ones = BitString::ones(n);
            for v in 0..(1u64 << n) {
                let x = BitString::from_u64(n, v);
                for p in [ProblemKind::OneMax, ProblemKind::LeadingOnes] {
                    assert_eq!(is_optimal(p, &x), x == ones);
                }
            }
        }
    }

    #[test]
    fn leading_ones_across_word_boundary() {
        let mut x = BitString::ones(130);
        assert_eq!(x.leading_ones(), 130);
        x.set(100, false);
        assert_eq!(x.leading_ones(), 100);
        x.set(64, false);
        assert_eq!(x.leading_ones(), 64);
        assert_eq!(BitString::ones(64).leading_ones(), 64);
        assert_eq!(BitString::ones(128).count_ones(), 128);
    }

    #[test]
    fn text_round_trip_and_rejects_garbage() {
        assert_eq!(bs("0101").to_string(), "0101");
        assert!(!bs("1000").get(1));
        assert!(bs("1000").get(0));
        assert!("01a".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }

    #[test]
    fn uniform_solution_n1_is_fair() {
        let mut rng = rng::stream(11);
        let trials = 100_000;
        let ones = (0..trials)
            .filter(|_| uniform_random_solution(1, &mut rng).get(0))
            .count();
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((ones as f64 - trials as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn uniform_solution_n3_chi_square() {
        let mut rng = rng::stream(12);
        let trials = 100_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..trials {
            let x = uniform_random_solution(3, &mut rng);
            let v = x.bits().enumerate().fold(0, |acc, (i, b)| acc | ((b as usize) << i));
            counts[v] += 1;
        }
        let expected = trials as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square, 7 degrees of freedom, upper 0.1% point
        assert!(chi2 < 24.32, "chi2 = {chi2}");
        let sigma = (trials as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() < 3.0 * sigma + 1.0);
        }
    }

    #[test]
    fn uniform_solution_is_deterministic_and_draw_counted() {
        let a = uniform_random_solution(2, &mut rng::stream(5));
        let b = uniform_random_solution(2, &mut rng::stream(5));
        assert_eq!(a, b);

        let mut r1 = rng::stream(6);
        let mut r2 = rng::stream(6);
        uniform_random_solution(130, &mut r1);
        for _ in 0..3 {
            r2.next_u64();
        }
        assert_eq!(r1.next_u64(), r2.next_u64());
    }
}
