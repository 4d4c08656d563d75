//! Counter-based random substreams.
//!
//! Trial `i` of a run seeded with `s` draws from ChaCha8 keyed by
//! `ChaCha8Rng::seed_from_u64(s)` with its stream id set to `i`. The
//! substream is therefore a pure function of `(s, i)` and trials can be
//! generated in any order, or in parallel, with identical results.
//!
//! Uniform reals are built from the top 53 bits of one `u64` draw:
//! `u = (x >> 11) · 2⁻⁵³`, so `u ∈ [0, 1)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn from_seed(seed: u64) -> Self {
        Stream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n` by scaling one uniform draw.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Child stream seeded from the next draw of this one.
    pub fn fork(&mut self) -> Stream {
        Stream::from_seed(self.next_u64())
    }
}

/// Substream for one trial.
pub fn derive_substream(seed: u64, trial_index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    Stream(rng)
}

/// Mix a run seed with a sub-experiment index (splitmix64 finalizer), for
/// analyses that launch several runs from one user seed.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Walk `weights` in order and return the first index whose cumulative sum
/// exceeds `u`. If rounding leaves `u` past the final cumulative sum, the
/// last index with non-zero weight is returned, so zero-weight entries are
/// never selected.
pub fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("weights contain a positive entry")
}
