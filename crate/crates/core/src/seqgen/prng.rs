//! Bit-exact splitmix64 stream and inverse-CDF symbol draws.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::alphabet::Symbol;

/// splitmix64 seeded with its raw 64-bit state.
#[derive(Debug, Clone)]
pub struct SplitMix {
    inner: SplitMix64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform real in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Draws an index by inverse CDF over `weights` in order. Rounding
    /// leftovers fall to the last positive weight.
    pub fn pick(&mut self, weights: &[f64]) -> Symbol {
        let u = self.next_unit();
        let mut acc = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if w > 0.0 && u < acc {
                return i;
            }
        }
        weights
            .iter()
            .rposition(|&w| w > 0.0)
            .expect("weights have positive mass")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference implementation of the mixing steps.
    fn reference(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    #[test]
    fn matches_reference_mixing() {
        for seed in [0u64, 1, 42, u64::MAX] {
            let mut rng = SplitMix::new(seed);
            let mut state = seed;
            for _ in 0..100 {
                assert_eq!(rng.next_u64(), reference(&mut state));
            }
        }
    }

    #[test]
    fn first_output_of_seed_zero() {
        assert_eq!(SplitMix::new(0).next_u64(), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn unit_interval() {
        let mut rng = SplitMix::new(7);
        for _ in 0..1000 {
            let u = rng.next_unit();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn pick_skips_zero_weights() {
        let mut rng = SplitMix::new(3);
        for _ in 0..1000 {
            assert_eq!(rng.pick(&[0.0, 1.0, 0.0]), 1);
        }
    }
}
