//! Sample moments with a reduction order fixed by sample index.

use std::ops::Range;

use rayon::prelude::*;

use crate::rng::{sample_stream, SampleRng};

/// Samples per work unit. Units are merged in index order, so results do
/// not depend on how rayon schedules them.
const CHUNK: usize = 64;

/// Running mean and variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Runs `observe` once per sample on that sample's stream and accumulates
/// `width` observables. `observe` must write exactly `width` values.
pub fn parallel_moments<F>(n_samples: usize, master_seed: u64, width: usize, observe: F) -> Vec<Moments>
where
    F: Fn(&mut SampleRng, &mut [f64]) + Sync,
{
    parallel_moments_batched(n_samples, width, |range, out| {
        for (i, row) in range.zip(out.chunks_exact_mut(width)) {
            let mut rng = sample_stream(master_seed, i as u64);
            observe(&mut rng, row);
        }
    })
}

/// Like [`parallel_moments`], but `observe` handles a whole block of sample
/// indices at once and fills `out` row by row (`range.len() × width`).
/// Streams are the caller's business; use [`sample_stream`] per index.
pub fn parallel_moments_batched<F>(n_samples: usize, width: usize, observe: F) -> Vec<Moments>
where
    F: Fn(Range<usize>, &mut [f64]) + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials: Vec<Vec<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n_samples);
            let mut buf = vec![0.0; (end - start) * width];
            observe(start..end, &mut buf);
            let mut acc = vec![Moments::default(); width];
            for row in buf.chunks_exact(width) {
                for (m, &x) in acc.iter_mut().zip(row) {
                    m.push(x);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, -2.0, 7.5, 3.25, 0.0, 11.0];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((m.mean() - mean).abs() < 1e-14);
        assert!((m.variance() - var).abs() < 1e-12);

        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..3].iter().for_each(|&x| a.push(x));
        xs[3..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean() - mean).abs() < 1e-14);
        assert!((a.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    parallel_moments(1000, 11, 2, |rng, out| {
                        let x: f64 = rng.random();
                        out[0] = x;
                        out[1] = x * x;
                    })
                })
        };
        let one = run(1);
        let many = run(7);
        assert_eq!(one, many);
        assert_eq!(one[0].count(), 1000);
        assert!((one[0].mean() - 0.5).abs() < 4.0 * one[0].std_error());

        let batched = parallel_moments_batched(1000, 2, |range, out| {
            for (i, row) in range.zip(out.chunks_exact_mut(2)) {
                let x: f64 = sample_stream(11, i as u64).random();
                row[0] = x;
                row[1] = x * x;
            }
        });
        assert_eq!(batched, one);
    }
}
