//! Chunked Monte Carlo expectation engine.
//!
//! Trials are split into fixed-size chunks, one derived substream per chunk,
//! and chunk statistics are merged in chunk order. The schedule depends only
//! on (trials, chunk size, stream), never on the thread count, so estimates
//! are bit-identical at any parallelism degree.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamRng};
use crate::scalar::Scalar;

/// Default chunk length for parallel sampling.
pub const DEFAULT_CHUNK: usize = 1024;

/// Default normal quantile for confidence intervals (95%).
pub const DEFAULT_Z: f64 = 1.96;

/// Monte Carlo estimate with a normal-approximation confidence interval.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate<T = f64> {
    pub mean: T,
    pub std_error: T,
    pub ci_low: T,
    pub ci_high: T,
    pub n_samples: usize,
}

impl<T: Scalar> McEstimate<T> {
    /// Build from a running mean and sum of squared deviations.
    pub fn from_moments(mean: T, m2: T, n: usize, z: T) -> Self {
        let var = (m2 / T::of((n - 1) as f64)).max(T::zero());
        let se = (var / T::of(n as f64)).sqrt();
        McEstimate {
            mean,
            std_error: se,
            ci_low: mean - z * se,
            ci_high: mean + z * se,
            n_samples: n,
        }
    }
}

#[derive(Clone, Copy)]
struct Welford<T, const M: usize> {
    n: usize,
    mean: [T; M],
    m2: [T; M],
}

impl<T: Scalar, const M: usize> Welford<T, M> {
    fn new() -> Self {
        Welford { n: 0, mean: [T::zero(); M], m2: [T::zero(); M] }
    }

    fn push(&mut self, x: [T; M]) {
        self.n += 1;
        let nf = T::of(self.n as f64);
        for (k, xk) in x.into_iter().enumerate() {
            let delta = xk - self.mean[k];
            self.mean[k] = self.mean[k] + delta / nf;
            self.m2[k] = self.m2[k] + delta * (xk - self.mean[k]);
        }
    }

    /// Chan's pairwise merge; exact for constant samples.
    fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let na = T::of(self.n as f64);
        let nb = T::of(other.n as f64);
        let n = na + nb;
        for k in 0..M {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] = self.mean[k] + delta * (nb / n);
            self.m2[k] = self.m2[k] + other.m2[k] + delta * delta * (na * nb / n);
        }
        self.n += other.n;
    }
}

fn run_chunks<T: Scalar, F, const M: usize>(
    trials: usize,
    chunk_size: usize,
    stream: RngStream,
    f: &F,
) -> Welford<T, M>
where
    F: Fn(&mut StreamRng) -> [T; M] + Sync,
{
    let n_chunks = trials.div_ceil(chunk_size);
    let stats: Vec<Welford<T, M>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.substream(c as u64).rng();
            let len = chunk_size.min(trials - c * chunk_size);
            let mut w = Welford::new();
            for _ in 0..len {
                w.push(f(&mut rng));
            }
            w
        })
        .collect();
    let mut acc = Welford::new();
    for s in &stats {
        acc.merge(s);
    }
    acc
}

/// Estimate the expectation of `f` over `trials` independent evaluations.
pub fn mc_expectation<T: Scalar, F>(trials: usize, stream: RngStream, f: F) -> Result<McEstimate<T>>
where
    F: Fn(&mut StreamRng) -> T + Sync,
{
    mc_expectation_cfg(trials, DEFAULT_CHUNK, T::of(DEFAULT_Z), stream, f)
}

/// [`mc_expectation`] with explicit chunk size and CI quantile.
pub fn mc_expectation_cfg<T: Scalar, F>(
    trials: usize,
    chunk_size: usize,
    z: T,
    stream: RngStream,
    f: F,
) -> Result<McEstimate<T>>
where
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let [est] = mc_expectation_multi(trials, chunk_size, z, stream, |rng| [f(rng)])?;
    Ok(est)
}

/// Jointly estimate `M` expectations from the same realizations.
pub fn mc_expectation_multi<T: Scalar, F, const M: usize>(
    trials: usize,
    chunk_size: usize,
    z: T,
    stream: RngStream,
    f: F,
) -> Result<[McEstimate<T>; M]>
where
    F: Fn(&mut StreamRng) -> [T; M] + Sync,
{
    if trials < 2 {
        return Err(Error::invalid("mc_expectation needs trials >= 2"));
    }
    if chunk_size == 0 {
        return Err(Error::invalid("chunk_size must be positive"));
    }
    let acc = run_chunks(trials, chunk_size, stream, &f);
    Ok(std::array::from_fn(|k| McEstimate::from_moments(acc.mean[k], acc.m2[k], acc.n, z)))
}

/// Evaluate `f` once per trial and collect the outputs in trial order.
/// Chunked exactly like [`mc_expectation`], so the result is independent of
/// the worker count.
pub fn par_map_trials<R, F>(trials: usize, chunk_size: usize, stream: RngStream, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut StreamRng) -> R + Sync,
{
    let n_chunks = trials.div_ceil(chunk_size);
    let chunks: Vec<Vec<R>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.substream(c as u64).rng();
            let len = chunk_size.min(trials - c * chunk_size);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Normal-approximation binomial confidence interval, clamped to [0, 1].
pub fn binomial_ci<T: Scalar>(successes: usize, trials: usize, z: T) -> (T, T, T) {
    let n = T::of(trials as f64);
    let p = T::of(successes as f64) / n;
    let se = (p * (T::one() - p) / n).sqrt();
    ((p), (p - z * se).max(T::zero()), (p + z * se).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::complex_gaussian;

    #[test]
    fn constant_function_has_zero_std_error() {
        let est: McEstimate<f64> = mc_expectation(10_000, RngStream::root(1), |_| 3.0).unwrap();
        assert_eq!(est.mean, 3.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.ci_low, 3.0);
        assert_eq!(est.ci_high, 3.0);
        assert_eq!(est.n_samples, 10_000);
    }

    #[test]
    fn second_moment_of_unit_complex_gaussian() {
        let est: McEstimate<f64> = mc_expectation(100_000, RngStream::root(2), |rng| {
            complex_gaussian::<f64, _>(rng, 1.0).norm_sqr()
        })
        .unwrap();
        assert!(est.ci_low <= 1.0 && 1.0 <= est.ci_high, "{est:?}");
    }

    #[test]
    fn ci_brackets_mean() {
        let est: McEstimate<f64> =
            mc_expectation(500, RngStream::root(3), f64::standard_normal).unwrap();
        assert!(est.ci_low <= est.mean && est.mean <= est.ci_high);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                mc_expectation::<f64, _>(50_000, RngStream::root(9), |rng| {
                    complex_gaussian::<f64, _>(rng, 1.0).norm_sqr()
                })
                .unwrap()
            })
        };
        let a = run(1);
        let b = run(8);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn rejects_degenerate_trials() {
        assert!(mc_expectation::<f64, _>(1, RngStream::root(1), |_| 0.0).is_err());
        assert!(mc_expectation::<f64, _>(0, RngStream::root(1), |_| 0.0).is_err());
    }

    #[test]
    fn par_map_is_ordered_and_deterministic() {
        let a = par_map_trials(1000, 64, RngStream::root(4), f64::standard_normal);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(7).build().unwrap();
        let b = pool.install(|| {
            par_map_trials(1000, 64, RngStream::root(4), f64::standard_normal)
        });
        assert_eq!(a.len(), 1000);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn binomial_ci_clamps() {
        let (p, lo, hi) = binomial_ci::<f64>(0, 100, 1.96);
        assert_eq!(p, 0.0);
        assert_eq!(lo, 0.0);
        let (p, _, hi2) = binomial_ci::<f64>(100, 100, 1.96);
        assert_eq!(p, 1.0);
        assert_eq!(hi2, 1.0);
        assert!(hi <= 1.0);
    }
}
