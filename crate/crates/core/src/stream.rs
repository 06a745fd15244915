//! Counter-based random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha8 stream. The 256-bit key
//! is derived from `(master seed, scheme, point index)` and the trial index
//! selects the ChaCha stream, so a trial's draws depend only on its coordinates
//! and never on thread scheduling or on which other schemes are being run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Coordinates of one trial inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    /// Scheme tag; distinct schemes never share draws.
    pub scheme: u64,
    /// Index of the sweep point (e.g. transmit power).
    pub point: u64,
}

impl StreamKey {
    pub fn new(seed: u64, scheme: u64, point: u64) -> Self {
        Self { seed, scheme, point }
    }

    fn key_bytes(&self) -> [u8; 32] {
        let mut state = mix64(self.seed);
        state = mix64(state ^ mix64(self.scheme.wrapping_add(0x5851_f42d_4c95_7f2d)));
        state = mix64(state ^ mix64(self.point.wrapping_add(0x1405_7b7e_f767_814f)));
        let mut out = [0u8; 32];
        for (i, chunk) in out.chunks_exact_mut(8).enumerate() {
            state = mix64(state.wrapping_add(i as u64));
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        out
    }

    /// RNG for trial `trial` under this key.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key_bytes());
        rng.set_stream(trial);
        rng
    }
}

/// Shorthand for `StreamKey::new(seed, scheme, point).trial_rng(trial)`.
pub fn trial_rng(seed: u64, scheme: u64, point: u64, trial: u64) -> ChaCha8Rng {
    StreamKey::new(seed, scheme, point).trial_rng(trial)
}
