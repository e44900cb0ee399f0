//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 keystream whose 256-bit key is derived from a
//! master seed and a path of integer labels, e.g. `(seed, trial, layer)`.
//! Streams for distinct paths are independent and can be created in any
//! order on any thread, so parallel experiments reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Label used for the stream that feeds sampling decisions (sources,
/// permutations) rather than vertex positions.
pub const SAMPLING_LABEL: u64 = u64::MAX;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A master seed plus a derivation path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamKey {
    seed: u64,
    path: Vec<u64>,
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            path: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Key for the child stream labelled `label`.
    pub fn child(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        Self {
            seed: self.seed,
            path,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        // Length-prefixed absorption so that (a, b) and (a, b, 0) differ.
        let mut state = self.seed ^ 0x005E_ED0F_5EED_u64;
        let mut acc = splitmix64(&mut state);
        for &label in &self.path {
            state ^= label.wrapping_mul(0xD6E8_FEB8_6659_FD93);
            acc ^= splitmix64(&mut state);
        }
        state ^= (self.path.len() as u64).rotate_left(32);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            acc = acc.wrapping_add(splitmix64(&mut state));
            chunk.copy_from_slice(&acc.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// Shorthand for `StreamKey::new(seed).child(a).child(b)...`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    path.iter()
        .fold(StreamKey::new(seed), |k, &l| k.child(l))
        .rng()
}
