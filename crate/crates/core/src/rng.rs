//! Seeded pseudo-random stream used everywhere randomness is needed.
//!
//! The generator is splitmix64 with its standard constants, spelled out
//! here so that a recorded seed replays the identical coordinate stream on
//! any build: each call advances the state by 0x9E3779B97F4A7C15 and
//! returns the finalized mix
//!
//! ```text
//! z  = state
//! z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//! z ^= z >> 27;  z *= 0x94D049BB133111EB
//! z ^= z >> 31
//! ```
//!
//! Field coordinates are drawn as `next_u64() % p`. The modulo bias is
//! below 2^-32 for any modulus under 2^32 and is accepted in exchange for
//! a one-line, portable drawing rule.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (bound > 0).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty draw range");
        self.next_u64() % bound
    }

    /// Uniform draw from `lo..=hi`.
    pub fn next_in(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.next_below(hi - lo + 1)
    }
}
