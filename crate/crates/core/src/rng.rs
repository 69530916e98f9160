//! Random streams and the primitive draws everything else is built from.
//!
//! Every random decision in the crate goes through the three helpers below,
//! each of which consumes exactly one `u64` from the stream. That keeps the
//! draw budget of every operation countable, and ChaCha8 output is identical
//! on every platform, so a seed replays a run bit-for-bit anywhere.
//!
//! Per-run streams are seeded with [`derive_seed`], a SplitMix64 mix of the
//! master seed, the problem size and the run index:
//!
//! ```text
//! s0 = splitmix64(master_seed)
//! s1 = splitmix64(s0 ^ n)
//! seed = splitmix64(s1 ^ run_index)
//! ```
//!
//! External tools can recompute `seed` and replay any single run with
//! `noisy-ea run --seed <seed>`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The random stream type used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Opens the stream for a 64-bit seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_index` at problem size `n` under `master_seed`.
pub fn derive_seed(master_seed: u64, n: u64, run_index: u64) -> u64 {
    let s0 = splitmix64(master_seed);
    let s1 = splitmix64(s0 ^ n);
    splitmix64(s1 ^ run_index)
}

/// Fixed-point threshold for a probability: a draw `u` succeeds iff
/// `u < threshold`. `1.0` maps to 2^64, so it always succeeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold(u128);

impl Threshold {
    pub fn new(prob: f64) -> Self {
        let p = prob.clamp(0.0, 1.0);
        if p >= 1.0 {
            Threshold(1u128 << 64)
        } else {
            // exact: p * 2^64 < 2^64 is representable, truncation rounds toward zero
            Threshold((p * 18_446_744_073_709_551_616.0) as u128)
        }
    }

    pub fn never(self) -> bool {
        self.0 == 0
    }

    pub fn always(self) -> bool {
        self.0 == 1u128 << 64
    }
}

/// One Bernoulli trial; consumes one draw even when the outcome is certain.
#[inline]
pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, t: Threshold) -> bool {
    (rng.next_u64() as u128) < t.0
}

/// Index in `0..len` by multiply-shift; one draw. Bias is below `len / 2^64`.
#[inline]
pub fn index<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> usize {
    ((rng.next_u64() as u128 * len as u128) >> 64) as usize
}

/// Uniform real in `[0, 1)` with 53 random bits; one draw.
#[inline]
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_edges() {
        assert!(Threshold::new(0.0).never());
        assert!(Threshold::new(1.0).always());
        assert!(Threshold::new(-3.0).never());
        assert!(Threshold::new(7.0).always());
        assert_eq!(Threshold::new(0.5), Threshold(1u128 << 63));
    }

    #[test]
    fn certain_outcomes_still_consume_a_draw() {
        let mut a = stream(9);
        let mut b = stream(9);
        assert!(bernoulli(&mut a, Threshold::new(1.0)));
        assert!(!bernoulli(&mut a, Threshold::new(0.0)));
        b.next_u64();
        b.next_u64();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn derived_seeds_differ_across_coordinates() {
        let base = derive_seed(1, 16, 0);
        assert_ne!(base, derive_seed(2, 16, 0));
        assert_ne!(base, derive_seed(1, 17, 0));
        assert_ne!(base, derive_seed(1, 16, 1));
        assert_eq!(base, derive_seed(1, 16, 0));
    }

    #[test]
    fn index_stays_in_range() {
        let mut rng = stream(3);
        for len in 1..50 {
            for _ in 0..100 {
                assert!(index(&mut rng, len) < len);
            }
        }
    }
}
