//! Seeded pseudo-random numbers with a pinned, portable algorithm.
//!
//! Simulations must reproduce bit-exactly from a seed, across platforms and
//! across reimplementations, so the generator is spelled out here rather than
//! delegated to an external crate whose stream could change:
//!
//! * state update: `s += 0x9E3779B97F4A7C15`
//! * output: `z = s; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;`
//!   `z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//!
//! (the SplitMix64 finalizer). Floats are drawn by taking the top 53 bits of
//! one output word, giving a uniform value in `[0, 1)`.

/// SplitMix64 generator. Cheap, seedable, and stable by construction.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        // 2^-53
        (self.next_u64() >> 11) as f64 * 1.110_223_024_625_156_5e-16
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_pinned() {
        // First outputs for seed 0, from the published SplitMix64 reference.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn floats_land_in_unit_interval() {
        let mut rng = SplitMix64::new(0xDEAD_BEEF);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn uniform_respects_bounds() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let x = rng.uniform(0.0, 5.0);
            assert!((0.0..5.0).contains(&x));
        }
    }
}
