//! Successive decoding diagnostics: first-user capacity under interference,
//! the n·C sequence that decides whether successive decoding can work, and
//! the dependence-testing exponent.

use num_complex::Complex;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::mc::{mc_expectation_multi, McEstimate, DEFAULT_CHUNK, DEFAULT_Z};
use crate::rng::RngStream;
use crate::scalar::{complex_gaussian, Scalar};

/// Whether a sequence of n·C values settles or keeps growing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Converges => write!(f, "converges"),
            Verdict::Diverges => write!(f, "diverges"),
        }
    }
}

/// Summary row for one block length in a successive-decoding sweep.
#[derive(Clone, Copy, Debug)]
pub struct SicReport<T = f64> {
    /// Per-use capacity of the first decoded user.
    pub c_first: T,
    /// Block-scaled capacity n·C.
    pub n_times_c: T,
    /// Dependence-testing exponent at the configured margin.
    pub dt_exponent: T,
    pub verdict: Verdict,
}

/// Monte Carlo and closed-form views of the first decoded user's capacity.
#[derive(Clone, Copy, Debug)]
pub struct SicCapacity<T = f64> {
    pub mc: McEstimate<T>,
    /// Large-system surrogate N_R ln(1 + g_k / (1 + Σ_{t≠k} g_t)).
    pub surrogate: T,
}

/// Capacity of the last-indexed active user when decoded first:
/// E{ln det(I + Σ_A G_t) − ln det(I + Σ_{A∖{k}} G_t)}, paired per
/// realization so the difference is nonnegative sample by sample.
pub fn sic_first_user_capacity<T: Scalar>(
    cfg: &SystemConfig<T>,
    trials: usize,
    stream: RngStream,
) -> Result<SicCapacity<T>> {
    cfg.validate()?;
    let k = cfg.active_avg;
    let products: Vec<T> = (1..=k).map(|u| cfg.gain_power(u)).collect();
    let (nr, nt) = (cfg.rx_antennas, cfg.tx_antennas);
    let ntf = T::of(nt as f64);
    let [est] = mc_expectation_multi(trials, DEFAULT_CHUNK, T::of(DEFAULT_Z), stream, |rng| {
        let mut rest = CMatrix::zeros(nr, nr);
        for &gp in &products[..k - 1] {
            let h = CMatrix::from_fn(nr, nt, |_, _| complex_gaussian(rng, T::one()));
            rest.add_scaled_gram(&h, gp / ntf);
        }
        let mut full = rest.clone();
        let h = CMatrix::from_fn(nr, nt, |_, _| complex_gaussian(rng, T::one()));
        full.add_scaled_gram(&h, products[k - 1] / ntf);
        rest.add_identity();
        full.add_identity();
        [full.cholesky().expect("PD").log_det() - rest.cholesky().expect("PD").log_det()]
    })?;
    let interference: T = products[..k - 1].iter().copied().sum();
    let surrogate = T::of(cfg.rx_antennas as f64)
        * (T::one() + products[k - 1] / (T::one() + interference)).ln();
    Ok(SicCapacity { mc: est, surrogate })
}

/// Closed-form n·C for one point of the sweep with k_n = n equal users:
/// n · N_R · ln(1 + g / (1 + (n−1) g)).
pub fn n_times_c<T: Scalar>(n: usize, rx_antennas: usize, gain_power: T) -> T {
    let nf = T::of(n as f64);
    let interference = T::one() + T::of((n - 1) as f64) * gain_power;
    nf * T::of(rx_antennas as f64) * (T::one() + gain_power / interference).ln()
}

/// Evaluate n·C across a block-length grid; `rx_of(n)` supplies the antenna
/// count for each point (constant, or growing with n).
pub fn n_times_c_sequence<T: Scalar>(
    n_grid: &[usize],
    rx_of: impl Fn(usize) -> usize,
    gain_power: T,
) -> Result<Vec<T>> {
    if n_grid.is_empty() {
        return Err(Error::invalid("empty block-length grid"));
    }
    if n_grid.iter().any(|&n| n < 2) {
        return Err(Error::invalid("grid block lengths must be >= 2"));
    }
    Ok(n_grid.iter().map(|&n| n_times_c(n, rx_of(n), gain_power)).collect())
}

/// Converges when the last two values differ by less than `rel_tol`
/// relatively.
pub fn sequence_verdict<T: Scalar>(seq: &[T], rel_tol: T) -> Verdict {
    if seq.len() < 2 {
        return Verdict::Converges;
    }
    let last = seq[seq.len() - 1];
    let prev = seq[seq.len() - 2];
    if (last - prev).abs() <= rel_tol * last.abs().max(T::min_positive_value()) {
        Verdict::Converges
    } else {
        Verdict::Diverges
    }
}

/// Dependence-testing exponent
/// ε · N_R · n · ln(1 + g / (1 + (k_n−1) g)) + ln 2 for the first decoded
/// user among k_n equal users.
pub fn dt_exponent<T: Scalar>(
    n: usize,
    rx_antennas: usize,
    k_n: usize,
    gain_power: T,
    epsilon: T,
) -> Result<T> {
    if !(epsilon >= T::zero() && epsilon < T::one()) {
        return Err(Error::invalid("epsilon must lie in [0, 1)"));
    }
    if k_n < 1 {
        return Err(Error::invalid("k_n must be >= 1"));
    }
    let interference = T::one() + T::of((k_n - 1) as f64) * gain_power;
    let per_use = (T::one() + gain_power / interference).ln();
    Ok(epsilon * T::of(rx_antennas as f64) * T::of(n as f64) * per_use + T::of(2.0).ln())
}

/// Error bound exp(−exponent), clipped to [0, 1].
pub fn dt_error_bound<T: Scalar>(exponent: T) -> T {
    (-exponent).exp().min(T::one()).max(T::zero())
}

/// Monte Carlo averages of the per-use first-user density and its two
/// quadratic forms; both forms average to the antenna count, and the density
/// mean matches the whitened-rate mean.
#[derive(Clone, Copy, Debug)]
pub struct SicDensityStats<T = f64> {
    pub density: McEstimate<T>,
    pub quad_full: McEstimate<T>,
    pub quad_whitened: McEstimate<T>,
    pub rate: McEstimate<T>,
}

pub fn sic_information_density<T: Scalar>(
    cfg: &SystemConfig<T>,
    trials: usize,
    stream: RngStream,
) -> Result<SicDensityStats<T>> {
    cfg.validate()?;
    let k = cfg.active_avg;
    if k < 2 {
        return Err(Error::invalid("successive decoding density needs k >= 2"));
    }
    let powers: Vec<T> = (1..=k).map(|u| cfg.covariance().diag(u)).collect();
    let gains: Vec<T> = (1..=k).map(|u| cfg.gain_of(u)).collect();
    let (nr, nt) = (cfg.rx_antennas, cfg.tx_antennas);
    let [density, quad_full, quad_whitened, rate] =
        mc_expectation_multi(trials, DEFAULT_CHUNK, T::of(DEFAULT_Z), stream, |rng| {
            let zero = Complex::new(T::zero(), T::zero());
            let one = Complex::new(T::one(), T::zero());
            let mut whitener = CMatrix::zeros(nr, nr);
            let mut last_gram = CMatrix::zeros(nr, nr);
            let mut y: Vec<Complex<T>> = (0..nr).map(|_| complex_gaussian(rng, T::one())).collect();
            let mut last_contrib = vec![zero; nr];
            for t in 0..k {
                let h = CMatrix::from_fn(nr, nt, |_, _| complex_gaussian(rng, gains[t]));
                let s: Vec<Complex<T>> = (0..nt).map(|_| complex_gaussian(rng, powers[t])).collect();
                if t + 1 == k {
                    h.mul_vec_acc(&s, one, &mut last_contrib);
                    last_gram.add_scaled_gram(&h, powers[t]);
                } else {
                    whitener.add_scaled_gram(&h, powers[t]);
                }
                h.mul_vec_acc(&s, one, &mut y);
            }
            let mut ws = whitener.clone();
            ws.add_identity();
            let mut fs = whitener;
            for i in 0..nr {
                for j in 0..nr {
                    let v = fs.get(i, j) + last_gram.get(i, j);
                    fs.set(i, j, v);
                }
            }
            fs.add_identity();
            let chol_w = ws.cholesky().expect("PD");
            let chol_f = fs.cholesky().expect("PD");
            let resid: Vec<Complex<T>> =
                y.iter().zip(&last_contrib).map(|(a, b)| *a - *b).collect();
            let qf = chol_f.inv_quad_form(&y);
            let qw = chol_w.inv_quad_form(&resid);
            let r = chol_f.log_det() - chol_w.log_det();
            [-(qf - qw) + r, qf, qw, r]
        })?;
    Ok(SicDensityStats { density, quad_full, quad_whitened, rate })
}
