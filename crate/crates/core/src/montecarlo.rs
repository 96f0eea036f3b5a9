//! Seeded, chunked Monte-Carlo plumbing.
//!
//! Work is split into chunks of [`CHUNK_SIZE`] samples. Chunk `k` draws from
//! `substream(seed, k)`, chunks run in parallel, and partial results are combined in
//! chunk order, so the output depends only on `(seed, samples)`.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::substream;

pub const CHUNK_SIZE: usize = 1024;

/// Runs `f(rng, count)` on every chunk and returns the partial results in chunk order.
pub fn run_chunks<A, F>(samples: usize, seed: u64, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> A + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    Ok((0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK_SIZE.min(samples - k * CHUNK_SIZE);
            f(&mut substream(seed, k as u64), count)
        })
        .collect())
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }

    /// Whether two independent estimates agree within `k` combined standard errors.
    pub fn agrees_with_estimate(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.std_error.hypot(other.std_error)
    }
}

/// Running sums for the mean and variance of a real sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: &Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance (zero for a single sample).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean(),
            std_error: (self.variance() / self.n as f64).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunk_results_do_not_depend_on_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    run_chunks(10_000, 42, |rng, count| {
                        (0..count).map(|_| rng.random::<f64>()).sum::<f64>()
                    })
                    .unwrap()
                })
        };
        let one = run(1);
        assert_eq!(one.len(), 10);
        assert_eq!(one, run(4));
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(run_chunks(0, 1, |_, _| ()).is_err());
    }

    #[test]
    fn moments_match_direct_formulas() {
        let data = [1.0, 2.0, 4.0, 7.0];
        let mut m = Moments::default();
        data.iter().for_each(|&x| m.push(x));
        assert_eq!(m.mean(), 3.5);
        // Σ(x − 3.5)² = 6.25 + 2.25 + 0.25 + 12.25 = 21
        assert!((m.variance() - 7.0).abs() < 1e-12);
        assert!((m.estimate().std_error - (7.0f64 / 4.0).sqrt()).abs() < 1e-12);
    }
}
