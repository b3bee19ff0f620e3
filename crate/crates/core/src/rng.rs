//! Counter-based random streams.
//!
//! Every draw is addressed by `(key, index)`: draw `i` of a stream consumes
//! the 32-bit words `[words_per_draw * i, words_per_draw * (i + 1))` of the
//! ChaCha8 keystream keyed by `key`. The value of a draw therefore does not
//! depend on how many other draws were made before it, or on which thread
//! made them.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent stream key from a master seed and a sub-index
/// (replication number, path number, ...).
pub fn derive_key(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// A keyed, seekable stream of uniforms.
#[derive(Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Positions the stream at the start of `draw` where each draw uses
    /// `2 * uniforms_per_draw` words.
    pub fn seek(&mut self, draw: u64, uniforms_per_draw: u64) {
        self.inner
            .set_word_pos(u128::from(draw) * u128::from(2 * uniforms_per_draw));
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    pub fn open01(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub(crate) fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}
