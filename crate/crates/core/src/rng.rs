//! Seeded, purpose-separated random streams.
//!
//! Every run owns one stream per purpose. Streams are ChaCha8 generators
//! keyed by `(seed, stream_id)`, so the draw sequence is identical on every
//! platform and switching one mechanism on or off never shifts the draws
//! consumed by another.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{Bounds, Position};

/// What a stream is used for. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    /// Initial population, mutation and crossover draws.
    Evolution = 1,
    /// Environment-change noise.
    Environment = 2,
    /// Random immigrants, restarts and hyper-mutation insertions.
    Diversity = 3,
    /// Network initialization, sample subsets, shuffling and neighbor noise.
    Predictor = 4,
    /// Restarts used to build best-known tables.
    Reference = 5,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn for_kind(seed: u64, kind: StreamKind) -> Self {
        Self::new(seed, kind as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw from `[low, high)`; returns `low` for a degenerate range.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        if high > low {
            low + (high - low) * self.rng.random::<f64>()
        } else {
            low
        }
    }

    pub fn random_position(&mut self, d: usize, bounds: Bounds) -> Position {
        (0..d)
            .map(|_| self.uniform(bounds.lower(), bounds.upper()))
            .collect::<Vec<_>>()
            .into()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of integers into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}
