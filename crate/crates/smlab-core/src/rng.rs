//! SplitMix64: the fixed pseudo-random generator behind every seeded
//! corpus in the workspace.
//!
//! The algorithm is pinned so that seeded experiments are reproducible
//! bit-for-bit across platforms and implementations: state advances by
//! the odd constant 0x9E3779B97F4A7C15 and the output is the standard
//! 64-bit finalizer (xor-shift multiply with 0xBF58476D1CE4E5B9 and
//! 0x94D049BB133111EB).

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

    /// Uniform in `[0, 1)`, 53 bits of entropy.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform integer in `[0, bound)`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Desk-scale corpora: modulo bias at 2^-64 is irrelevant here.
        self.next_u64() % bound
    }
}
