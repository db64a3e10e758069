//! SplitMix64, the portable generator behind every seeded run.
//!
//! The sequence is fully specified so sample files can be reproduced in any
//! language:
//!
//! ```text
//! state  = state + 0x9E3779B97F4A7C15            (wrapping)
//! z      = state
//! z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (wrapping)
//! z      = (z ^ (z >> 27)) * 0x94D049BB133111EB  (wrapping)
//! output = z ^ (z >> 31)
//! ```
//!
//! Derived draws:
//!
//! * `next_f64`: `(output >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `next_sign`: `+1` if the top bit of `output` is clear, else `-1`.
//! * `below(n)`: `(output as u128 * n) >> 64`, uniform on `0..n` up to a bias
//!   of at most `n / 2^64`.

use crate::amplitude::Sign;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_sign(&mut self) -> Sign {
        Sign::from_parity(self.next_u64() >> 63 == 1)
    }

    /// Uniform index in `0..n`; `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }
}
