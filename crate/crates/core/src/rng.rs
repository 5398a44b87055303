//! Counter-based random streams.
//!
//! A stream is addressed by `(master_seed, stream_id)`. The master seed keys a
//! ChaCha8 block cipher and the stream id selects its nonce, so each stream is
//! an independent counter-mode sequence that can be opened from any thread in
//! any order and always yields the same values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream ids at or above this value are reserved for power-method restarts;
/// probe `i` uses stream id `i`.
pub const POWER_STREAM_BASE: u64 = 1 << 62;

/// Generators draw auxiliary quantities (diagonals, retries) above this base.
pub const AUX_STREAM_BASE: u64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Sibling stream under the same master seed.
    pub fn with_id(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Same stream id relative to `offset`.
    pub fn offset(self, offset: u64) -> Self {
        self.with_id(self.stream_id.wrapping_add(offset))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.master_seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// SplitMix64 step: advances `state` and returns a well-mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for repeat `index` of a run with master seed `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut state = master ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    splitmix64(&mut state)
}

/// Entries i.i.d. uniform on {+1, -1}.
pub fn rademacher_vector(n: usize, stream: RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut bits: u64 = rng.random();
        for _ in 0..64.min(n - out.len()) {
            out.push(if bits & 1 == 1 { 1.0 } else { -1.0 });
            bits >>= 1;
        }
    }
    out
}

/// Entries i.i.d. standard normal.
pub fn gaussian_vector(n: usize, stream: RngStream) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_gaussian(&mut out, stream);
    out
}

pub fn fill_gaussian(out: &mut [f64], stream: RngStream) {
    let mut rng = stream.rng();
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}
