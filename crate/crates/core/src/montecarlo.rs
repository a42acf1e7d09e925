//! Seed derivation and chunked, thread-count independent Monte-Carlo means.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Draws per chunk; each chunk owns its own ChaCha stream.
pub const CHUNK: usize = 4096;

/// Hashes a master seed, a label and numeric coordinates into a 64-bit seed.
///
/// Coordinates are hashed by their bit patterns, so `0.0` and `-0.0` differ.
pub fn derive_seed(master: u64, label: &str, coords: &[f64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    for c in coords {
        h.update(c.to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Generator for chunk `stream` of a run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Mean of `f(rng)` over `draws` samples.
///
/// Samples are split into fixed chunks of [`CHUNK`] draws with independent
/// streams, evaluated in parallel, and merged in chunk order, so the result
/// does not depend on the number of worker threads.
pub fn estimate_mean<F>(draws: usize, seed: u64, f: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = draws.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = CHUNK.min(draws - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..n {
                m.push(f(&mut rng));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = if total.count > 1.0 {
        total.m2 / (total.count - 1.0)
    } else {
        0.0
    };
    Estimate {
        mean: total.mean,
        std_err: (var / total.count.max(1.0)).sqrt(),
        draws,
    }
}

/// Entrywise mean and standard error of a vector-valued sample.
pub fn estimate_mean_vec<F>(draws: usize, dim: usize, seed: u64, f: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let chunks = draws.div_ceil(CHUNK);
    let parts: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = CHUNK.min(draws - c * CHUNK);
            let mut m = vec![Moments::default(); dim];
            for _ in 0..n {
                let x = f(&mut rng);
                for (acc, v) in m.iter_mut().zip(x) {
                    acc.push(v);
                }
            }
            m
        })
        .collect();
    let mut total = vec![Moments::default(); dim];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
    }
    let means = total.iter().map(|m| m.mean).collect();
    let errs = total
        .iter()
        .map(|m| {
            if m.count > 1.0 {
                (m.m2 / (m.count - 1.0) / m.count).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    (means, errs)
}
