//! Log-det capacities, conditional information density, large-system
//! hardening limits, and the concentration machinery built on them.

use num_complex::Complex;

use crate::channel::{sample_channel, sample_signatures, synthesize_received, ChannelRealization, SignatureSet};
use crate::config::{CovarianceSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix};
use crate::mc::{mc_expectation, mc_expectation_multi, McEstimate, DEFAULT_CHUNK, DEFAULT_Z};
use crate::rng::{RngStream, StreamRng};
use crate::scalar::Scalar;
use crate::sets::{ActivityScenario, UserSet};

/// I + Σ_{k ∈ users} H_k Q_k H_k† for one realization.
pub fn interference_matrix<T: Scalar>(
    channels: &ChannelRealization<T>,
    q: &CovarianceSpec<T>,
    users: &UserSet,
) -> Result<CMatrix<T>> {
    let mut g: Option<CMatrix<T>> = None;
    for u in users.iter() {
        let h = channels
            .get(u)
            .ok_or_else(|| Error::invalid(format!("no channel for user {u}")))?;
        let g = g.get_or_insert_with(|| CMatrix::zeros(h.rows(), h.rows()));
        g.add_scaled_gram(h, q.diag(u));
    }
    // 0×0 for an empty set: its log-det is exactly zero
    let mut g = g.unwrap_or_else(|| CMatrix::zeros(0, 0));
    g.add_identity();
    Ok(g)
}

/// ln det(I + Σ_{k ∈ users} H_k Q_k H_k†) in nats; exactly 0 for an empty
/// set.
pub fn log_det_capacity<T: Scalar>(
    channels: &ChannelRealization<T>,
    q: &CovarianceSpec<T>,
    users: &UserSet,
) -> Result<T> {
    if users.is_empty() {
        return Ok(T::zero());
    }
    Ok(interference_matrix(channels, q, users)?.cholesky()?.log_det())
}

/// Draw ln det(I + Σ g_k G̃ G̃† / N_T) with standard Gaussian G̃ and per-user
/// receive products `g_k = gain_k · power_k`.
pub fn sample_log_det<T: Scalar>(
    products: &[T],
    rx_antennas: usize,
    tx_antennas: usize,
    rng: &mut StreamRng,
) -> T {
    if products.is_empty() {
        return T::zero();
    }
    let mut g = CMatrix::zeros(rx_antennas, rx_antennas);
    let nt = T::of(tx_antennas as f64);
    for &gp in products {
        let h = CMatrix::from_fn(rx_antennas, tx_antennas, |_, _| {
            crate::scalar::complex_gaussian(rng, T::one())
        });
        g.add_scaled_gram(&h, gp / nt);
    }
    g.add_identity();
    g.cholesky().expect("I + PSD is positive definite").log_det()
}

/// Monte Carlo E{ln det(I + Σ_{k ∈ set} H_k Q_k H_k†)} in nats per channel
/// use.
pub fn mutual_information<T: Scalar>(
    cfg: &SystemConfig<T>,
    set: &UserSet,
    trials: usize,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    set.validate_within(cfg.total_users)?;
    let products: Vec<T> = set.iter().map(|u| cfg.gain_power(u)).collect();
    mutual_information_products(&products, cfg.rx_antennas, cfg.tx_antennas, trials, stream)
}

/// [`mutual_information`] for an explicit list of gain·power products.
pub fn mutual_information_products<T: Scalar>(
    products: &[T],
    rx_antennas: usize,
    tx_antennas: usize,
    trials: usize,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    mc_expectation(trials, stream, |rng| sample_log_det(products, rx_antennas, tx_antennas, rng))
}

/// Conditional information density of a received block given the decoded
/// partition, in nats:
///
///   Σ_i [ ln det(I + G_md(i)) − ‖z(i)‖² + (z(i)+φ(i))† (I+G_md(i))⁻¹ (z(i)+φ(i)) ]
///
/// with z(i) the noise residual after removing every true user and φ(i) the
/// misdetected users' contribution.
pub fn information_density<T: Scalar>(
    y_block: &[Vec<Complex<T>>],
    signatures: &[SignatureSet<T>],
    channels: &[ChannelRealization<T>],
    scenario: &ActivityScenario,
    q: &CovarianceSpec<T>,
) -> Result<T> {
    if y_block.len() != signatures.len() || y_block.len() != channels.len() {
        return Err(Error::invalid("block length mismatch between y, signatures, channels"));
    }
    let truth = scenario.truth();
    let md = scenario.misdetected();
    let mut total = T::zero();
    let one = Complex::new(T::one(), T::zero());
    let neg = Complex::new(-T::one(), T::zero());
    for ((y, sigs), ch) in y_block.iter().zip(signatures).zip(channels) {
        // z = y − Σ_{k ∈ truth} H_k s_k
        let mut z = y.clone();
        let mut phi = vec![Complex::new(T::zero(), T::zero()); y.len()];
        for u in truth.iter() {
            let h = ch.get(u).ok_or_else(|| Error::invalid(format!("no channel for user {u}")))?;
            let s = sigs.get(u).ok_or_else(|| Error::invalid(format!("no signature for user {u}")))?;
            h.mul_vec_acc(s, neg, &mut z);
            if md.contains(u) {
                h.mul_vec_acc(s, one, &mut phi);
            }
        }
        if md.is_empty() {
            continue; // density is exactly zero per use
        }
        let omega = interference_matrix(ch, q, md)?;
        let chol = omega.cholesky()?;
        let zphi: Vec<Complex<T>> = z.iter().zip(phi.iter()).map(|(a, b)| *a + *b).collect();
        total = total + chol.log_det() - norm_sq(&z) + chol.inv_quad_form(&zphi);
    }
    if !total.is_finite() {
        return Err(Error::Numerical("information density is not finite".into()));
    }
    Ok(total)
}

/// Synthesize one received block for the scenario's true set and evaluate
/// its information density over `uses` channel uses.
pub fn sample_information_density<T: Scalar>(
    cfg: &SystemConfig<T>,
    scenario: &ActivityScenario,
    uses: usize,
    rng: &mut StreamRng,
) -> Result<T> {
    let truth = scenario.truth();
    let mut channels = Vec::with_capacity(uses);
    let mut signatures = Vec::with_capacity(uses);
    for _ in 0..uses {
        channels.push(sample_channel(cfg, truth, rng)?);
        signatures.push(sample_signatures(cfg, truth, rng)?);
    }
    let y = synthesize_received(cfg, truth, &channels, &signatures, rng)?;
    information_density(&y, &signatures, &channels, scenario, &cfg.covariance())
}

/// Large-system limit N_R · ln(1 + Σ_{k ∈ users} gain_k · power_k).
pub fn hardening_limit<T: Scalar>(cfg: &SystemConfig<T>, users: &UserSet) -> T {
    let mut s = T::zero();
    for u in users.iter() {
        s = s + cfg.gain_power(u);
    }
    T::of(cfg.rx_antennas as f64) * (T::one() + s).ln()
}

/// Monte Carlo estimate of the Bernstein scale constant
/// c = 32 N_R + E[det(I + G_md)] · e^{−I}.
#[derive(Clone, Copy, Debug)]
pub struct ConcentrationEstimate<T = f64> {
    /// Point estimate of c.
    pub value: T,
    /// Conservative lower/upper CI endpoints from the two component CIs.
    pub lower: T,
    pub upper: T,
    pub det_mean: McEstimate<T>,
    pub mi: McEstimate<T>,
}

pub fn concentration_constant<T: Scalar>(
    cfg: &SystemConfig<T>,
    md: &UserSet,
    trials: usize,
    stream: RngStream,
) -> Result<ConcentrationEstimate<T>> {
    md.validate_within(cfg.total_users)?;
    let products: Vec<T> = md.iter().map(|u| cfg.gain_power(u)).collect();
    let (nr, nt) = (cfg.rx_antennas, cfg.tx_antennas);
    let [det_mean, mi] =
        mc_expectation_multi(trials, DEFAULT_CHUNK, T::of(DEFAULT_Z), stream, |rng| {
            let ld = sample_log_det(&products, nr, nt, rng);
            [ld.exp(), ld]
        })?;
    let base = T::of(32.0 * cfg.rx_antennas as f64);
    Ok(ConcentrationEstimate {
        value: base + det_mean.mean * (-mi.mean).exp(),
        lower: base + det_mean.ci_low * (-mi.ci_high).exp(),
        upper: base + det_mean.ci_high * (-mi.ci_low).exp(),
        det_mean,
        mi,
    })
}

/// Bernstein tail bound 2·exp{−n₀δ² / (4c² + 2cδ)} on the deviation of the
/// block density from n₀ times its per-use mean.
pub fn bernstein_tail_bound<T: Scalar>(uses: usize, delta: T, c: T) -> Result<T> {
    if uses < 1 {
        return Err(Error::invalid("uses must be >= 1"));
    }
    if !(delta >= T::zero()) {
        return Err(Error::invalid("delta must be nonnegative"));
    }
    if !(c > T::zero()) {
        return Err(Error::invalid("concentration constant must be positive"));
    }
    let four = T::of(4.0);
    let two = T::of(2.0);
    let n0 = T::of(uses as f64);
    Ok(two * (-(n0 * delta * delta) / (four * c * c + two * c * delta)).exp())
}
