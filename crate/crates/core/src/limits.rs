//! Identification-cost thresholds, message-length rates and capacities, the
//! training/data tradeoff ratio, deviation bounds, and random-coding error
//! exponents.

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::info::{mutual_information, sample_log_det};
use crate::linalg::CMatrix;
use crate::mc::{mc_expectation, McEstimate};
use crate::numerics::{binary_entropy, log_binomial};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sets::UserSet;

/// Per-user rate allocation derived from log codebook sizes.
///
/// `share[k] = log_m[k] / Σ log_m` and `uses[k] = n · share[k]`, so the uses
/// sum to the block length and the shares to one.
#[derive(Clone, Debug)]
pub struct RateAllocation<T = f64> {
    log_m: Vec<T>,
    share: Vec<T>,
    uses: Vec<T>,
}

impl<T: Scalar> RateAllocation<T> {
    pub fn new(log_m: Vec<T>, block_len: usize) -> Result<Self> {
        if log_m.is_empty() {
            return Err(Error::invalid("allocation needs at least one user"));
        }
        if log_m.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::invalid("log codebook sizes must be positive"));
        }
        let total: T = log_m.iter().copied().sum();
        let n = T::of(block_len as f64);
        let share: Vec<T> = log_m.iter().map(|v| *v / total).collect();
        let uses: Vec<T> = share.iter().map(|m| n * *m).collect();
        Ok(RateAllocation { log_m, share, uses })
    }

    /// Equal codebook sizes across `k` users.
    pub fn equal(k: usize, block_len: usize) -> Result<Self> {
        Self::new(vec![T::one(); k], block_len)
    }

    pub fn len(&self) -> usize {
        self.log_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_m.is_empty()
    }

    pub fn log_m(&self) -> &[T] {
        &self.log_m
    }

    /// μ_k: fraction of the sum rate allocated to each user.
    pub fn share(&self) -> &[T] {
        &self.share
    }

    /// c_k: effective channel uses per user; sums to the block length.
    pub fn uses(&self) -> &[T] {
        &self.uses
    }
}

/// Rate-region query: `counts[j]` users ask for `rates[j]` nats each.
#[derive(Clone, Debug)]
pub struct RegionSpec<T = f64> {
    pub counts: Vec<usize>,
    pub rates: Vec<T>,
}

impl<T: Scalar> RegionSpec<T> {
    pub fn validate(&self, active_avg: usize) -> Result<()> {
        if self.counts.len() != self.rates.len() || self.counts.is_empty() {
            return Err(Error::invalid("counts and rates must be equal-length and nonempty"));
        }
        if self.counts.contains(&0) {
            return Err(Error::invalid("group counts must be >= 1"));
        }
        if self.rates.iter().any(|r| !(*r >= T::zero())) {
            return Err(Error::invalid("group rates must be >= 0"));
        }
        if self.counts.iter().sum::<usize>() != active_avg {
            return Err(Error::invalid("group counts must sum to the active user count"));
        }
        Ok(())
    }
}

/// Achievable signature length: (1+ε) · max_i ln C(ℓ−k, i) / I_i, together
/// with the maximizing misdetection size (ties to the larger i).
pub fn identification_cost_achievable<T: Scalar>(
    cfg: &SystemConfig<T>,
    mi_by_size: impl Fn(usize) -> T,
) -> Result<(T, usize)> {
    let spare = cfg.total_users - cfg.active_avg;
    let scale = T::one() + cfg.epsilon;
    max_threshold(cfg.active_avg, scale, mi_by_size, |i| {
        if i > spare {
            None // no candidate set of that size exists
        } else {
            Some(log_binomial::<T>(spare as u64, i as u64).expect("i <= spare"))
        }
    })
}

/// Converse signature length: (1−ε) · max_i ln C(ℓ−k+i, i) / I_i.
pub fn identification_cost_converse<T: Scalar>(
    cfg: &SystemConfig<T>,
    mi_by_size: impl Fn(usize) -> T,
) -> Result<(T, usize)> {
    let spare = cfg.total_users - cfg.active_avg;
    let scale = T::one() - cfg.epsilon;
    max_threshold(cfg.active_avg, scale, mi_by_size, |i| {
        Some(log_binomial::<T>((spare + i) as u64, i as u64).expect("i <= spare + i"))
    })
}

fn max_threshold<T: Scalar>(
    k: usize,
    scale: T,
    mi_by_size: impl Fn(usize) -> T,
    numerator: impl Fn(usize) -> Option<T>,
) -> Result<(T, usize)> {
    let mut best = T::zero();
    let mut best_i = 0usize;
    for i in 1..=k {
        let Some(num) = numerator(i) else { continue };
        let mi = mi_by_size(i);
        if !(mi > T::zero()) {
            return Err(Error::invalid(format!("mutual information for size {i} must be > 0")));
        }
        let v = num / mi;
        if best_i == 0 || v >= best {
            best = v;
            best_i = i;
        }
    }
    Ok((scale * best, best_i))
}

/// Large-population simplification ln C(ℓ, k) / I_full of the signature
/// length.
pub fn identification_cost_asymptotic<T: Scalar>(cfg: &SystemConfig<T>, mi_full: T) -> Result<T> {
    if !(mi_full > T::zero()) {
        return Err(Error::invalid("mi_full must be > 0"));
    }
    Ok(log_binomial::<T>(cfg.total_users as u64, cfg.active_avg as u64)? / mi_full)
}

/// Finite-population sufficient signature length
/// (1+ε′)[ln C(ℓ−k,i) + ((1+ε′)/ε′) ln C(k,i) + ln(k/δ₁) + γ/ε′] / [(1−δ₂) I].
pub fn finite_threshold_achievable<T: Scalar>(
    cfg: &SystemConfig<T>,
    i: usize,
    mi_i: T,
    delta1: T,
    delta2: T,
    gamma: T,
) -> Result<T> {
    let eps = cfg.epsilon;
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    check_unit_open("delta1", delta1)?;
    check_unit_open("delta2", delta2)?;
    if !(mi_i > T::zero()) {
        return Err(Error::invalid("mi_i must be > 0"));
    }
    if i < 1 || i > cfg.active_avg {
        return Err(Error::invalid("size i must lie in 1..=active_avg"));
    }
    let spare = (cfg.total_users - cfg.active_avg) as u64;
    let k = cfg.active_avg as u64;
    let num = log_binomial::<T>(spare, i as u64)?
        + (T::one() + eps) / eps * log_binomial::<T>(k, i as u64)?
        + (T::of(k as f64) / delta1).ln()
        + gamma / eps;
    Ok((T::one() + eps) * num / ((T::one() - delta2) * mi_i))
}

/// Finite-population necessary signature length
/// max(0, [ln C(ℓ−k+i, i) + ln δ₁] / [(1+δ₂) I]).
pub fn finite_threshold_converse<T: Scalar>(
    cfg: &SystemConfig<T>,
    i: usize,
    mi_i: T,
    delta1: T,
    delta2: T,
) -> Result<T> {
    if !(delta1 > T::zero() && delta1 <= T::one()) {
        return Err(Error::invalid("delta1 must lie in (0, 1]"));
    }
    check_unit_open("delta2", delta2)?;
    if !(mi_i > T::zero()) {
        return Err(Error::invalid("mi_i must be > 0"));
    }
    let spare = (cfg.total_users - cfg.active_avg) as u64;
    let num = log_binomial::<T>(spare + i as u64, i as u64)? + delta1.ln();
    Ok((num / ((T::one() + delta2) * mi_i)).max(T::zero()))
}

fn check_unit_open<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, 1)")))
    }
}

/// Ratio of identification cost to total block capacity,
/// θ = ℓ H₂(α) / (n · I_full). Values ≥ 1 mean training exhausts the block.
pub fn theta<T: Scalar>(cfg: &SystemConfig<T>, mi_full: T) -> Result<T> {
    if !(mi_full > T::zero()) {
        return Err(Error::invalid("mi_full must be > 0"));
    }
    let uncertainty = T::of(cfg.total_users as f64) * binary_entropy(cfg.alpha())?;
    Ok(uncertainty / (T::of(cfg.block_len as f64) * mi_full))
}

/// Boundary message-length rates R_k = c_k · I_full; they sum to n · I_full.
pub fn message_length_rates<T: Scalar>(alloc: &RateAllocation<T>, mi_full: T) -> Vec<T> {
    alloc.uses().iter().map(|c| *c * mi_full).collect()
}

/// Random-access message-length capacities
/// B_k = c_k · I_full − μ_k · ℓ H₂(α); negative values signal identification
/// overhead exceeding the block budget.
pub fn message_length_capacity<T: Scalar>(
    cfg: &SystemConfig<T>,
    alloc: &RateAllocation<T>,
    mi_full: T,
) -> Result<Vec<T>> {
    let uncertainty = T::of(cfg.total_users as f64) * binary_entropy(cfg.alpha())?;
    Ok(alloc
        .uses()
        .iter()
        .zip(alloc.share())
        .map(|(c, m)| *c * mi_full - *m * uncertainty)
        .collect())
}

/// Sum-rate region membership: Σ K_j V_j ≤ n · I_full − ℓ H₂(α).
/// Returns (inside, slack) with slack = RHS − LHS; the boundary is inside.
pub fn region_check<T: Scalar>(
    spec: &RegionSpec<T>,
    cfg: &SystemConfig<T>,
    mi_full: T,
) -> Result<(bool, T)> {
    spec.validate(cfg.active_avg)?;
    let lhs: T = spec
        .counts
        .iter()
        .zip(&spec.rates)
        .map(|(k, v)| T::of(*k as f64) * *v)
        .sum();
    let rhs = T::of(cfg.block_len as f64) * mi_full
        - T::of(cfg.total_users as f64) * binary_entropy(cfg.alpha())?;
    Ok((lhs <= rhs, rhs - lhs))
}

/// Chebyshev bound on the active-set size deviating from its mean by δ·n,
/// min(1, ℓα(1−α) / (δ² n²)).
pub fn activity_deviation_bound<T: Scalar>(
    total_users: usize,
    alpha: T,
    delta: T,
    block_len: usize,
) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::invalid("delta must be > 0"));
    }
    if alpha < T::zero() || alpha > T::one() {
        return Err(Error::invalid("alpha must lie in [0, 1]"));
    }
    let var = T::of(total_users as f64) * alpha * (T::one() - alpha);
    let n = T::of(block_len as f64);
    Ok((var / (delta * delta * n * n)).min(T::one()))
}

/// Per-channel-use random-coding exponent
/// e₀(ρ) = −ln E{det(I + G_subset/(1+ρ))^{−ρ}}, estimated by Monte Carlo.
pub fn error_exponent_e0<T: Scalar>(
    cfg: &SystemConfig<T>,
    subset: &UserSet,
    rho: T,
    trials: usize,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    if !(rho >= T::zero() && rho <= T::one()) {
        return Err(Error::invalid("rho must lie in [0, 1]"));
    }
    subset.validate_within(cfg.total_users)?;
    let products: Vec<T> = subset.iter().map(|u| cfg.gain_power(u) / (T::one() + rho)).collect();
    let (nr, nt) = (cfg.rx_antennas, cfg.tx_antennas);
    let inner = mc_expectation(trials, stream, move |rng| {
        if rho == T::zero() {
            T::one()
        } else {
            (-rho * sample_log_det(&products, nr, nt, rng)).exp()
        }
    })?;
    // e₀ = −ln(mean); delta-method error bar, conservative interval endpoints
    let mean = -inner.mean.ln();
    let se = inner.std_error / inner.mean;
    let ci_low = -inner.ci_high.ln();
    let ci_high = if inner.ci_low > T::zero() { -inner.ci_low.ln() } else { T::infinity() };
    Ok(McEstimate { mean, std_error: se, ci_low, ci_high, n_samples: inner.n_samples })
}

/// Per-channel-use error exponent for a subset of `subset_size = |subset|`
/// users decoding in error:
/// E_r = e₀ − [ρ Σ_{k ∈ subset} R_k + ln C(k, |subset|)] / n,
/// with backed-off rates R_k = (1−ε) c_k I_full. May be ≤ 0; the caller
/// decides what to do with a nonpositive margin.
#[allow(clippy::too_many_arguments)]
pub fn error_exponent_rate<T: Scalar>(
    cfg: &SystemConfig<T>,
    subset: &UserSet,
    alloc: &RateAllocation<T>,
    rho: T,
    mi_full: T,
    trials: usize,
    stream: RngStream,
) -> Result<T> {
    if alloc.len() != cfg.active_avg {
        return Err(Error::invalid("allocation must cover the active users"));
    }
    if subset.is_empty() || subset.ids().iter().any(|&u| u > cfg.active_avg) {
        return Err(Error::invalid("subset must be a nonempty subset of the active users 1..=k"));
    }
    let e0 = error_exponent_e0(cfg, subset, rho, trials, stream)?;
    let backoff = T::one() - cfg.epsilon;
    let rate_sum: T = subset.iter().map(|u| backoff * alloc.uses()[u - 1] * mi_full).sum();
    let combos = log_binomial::<T>(cfg.active_avg as u64, subset.len() as u64)?;
    Ok(e0.mean - (rho * rate_sum + combos) / T::of(cfg.block_len as f64))
}

/// Spatial multiplexing gain min(N_R, k·N_T).
pub fn dof<T: Scalar>(cfg: &SystemConfig<T>) -> usize {
    cfg.rx_antennas.min(cfg.active_avg * cfg.tx_antennas)
}

/// Aggregate report of thresholds, rates, and capacities for one scenario.
#[derive(Clone, Debug)]
pub struct LimitReport<T = f64> {
    pub n0_achievable: T,
    pub n0_converse: T,
    pub n0_asymptotic: T,
    pub argmax_size: usize,
    pub theta: T,
    pub rates: Vec<T>,
    pub capacities: Vec<T>,
    pub sum_rhs: T,
    pub infeasible: bool,
}

/// Evaluate the full report given per-size and full-set mutual information.
pub fn limit_report<T: Scalar>(
    cfg: &SystemConfig<T>,
    alloc: &RateAllocation<T>,
    mi_by_size: impl Fn(usize) -> T + Copy,
    mi_full: T,
) -> Result<LimitReport<T>> {
    let (n0_ach, argmax_size) = identification_cost_achievable(cfg, mi_by_size)?;
    let (n0_conv, _) = identification_cost_converse(cfg, mi_by_size)?;
    let n0_asym = identification_cost_asymptotic(cfg, mi_full)?;
    let th = theta(cfg, mi_full)?;
    let rates = message_length_rates(alloc, mi_full);
    let capacities = message_length_capacity(cfg, alloc, mi_full)?;
    let sum_rhs = T::of(cfg.block_len as f64) * mi_full
        - T::of(cfg.total_users as f64) * binary_entropy(cfg.alpha())?;
    Ok(LimitReport {
        n0_achievable: n0_ach,
        n0_converse: n0_conv,
        n0_asymptotic: n0_asym,
        argmax_size,
        theta: th,
        rates,
        capacities,
        sum_rhs,
        infeasible: th >= T::one(),
    })
}

/// Worst-case mutual information for misdetected sets of a given size.
///
/// With exchangeable users any size-i set has the same value, so the first i
/// users stand in; otherwise the minimum over `subset_samples` random size-i
/// subsets is returned.
pub fn mi_by_size<T: Scalar>(
    cfg: &SystemConfig<T>,
    size: usize,
    trials: usize,
    stream: RngStream,
    subset_samples: usize,
) -> Result<McEstimate<T>> {
    if size < 1 || size > cfg.active_avg {
        return Err(Error::invalid("size must lie in 1..=active_avg"));
    }
    if cfg.homogeneous_gain_power().is_some() {
        return mutual_information(cfg, &UserSet::first_n(size), trials, stream);
    }
    let mut worst: Option<McEstimate<T>> = None;
    for s in 0..subset_samples.max(1) {
        let sub_stream = stream.substream(1 + s as u64);
        let mut rng = sub_stream.rng();
        let set = random_subset(cfg.total_users, size, &mut rng);
        let est = mutual_information(cfg, &set, trials, sub_stream.substream(0))?;
        worst = match worst {
            Some(w) if w.mean <= est.mean => Some(w),
            _ => Some(est),
        };
    }
    Ok(worst.expect("at least one subset sampled"))
}

/// Uniform random size-k subset of 1..=n (partial Fisher–Yates).
pub fn random_subset(n: usize, k: usize, rng: &mut crate::rng::StreamRng) -> UserSet {
    use rand::Rng;
    let mut pool: Vec<usize> = (1..=n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    UserSet::new(pool[..k].to_vec())
}

/// Convenience sampler used by tests: one draw of det(I + Σ G)^(−ρ).
pub fn sample_tilted_det<T: Scalar>(
    products: &[T],
    rho: T,
    rx_antennas: usize,
    tx_antennas: usize,
    rng: &mut crate::rng::StreamRng,
) -> T {
    let mut g = CMatrix::zeros(rx_antennas, rx_antennas);
    let nt = T::of(tx_antennas as f64);
    for &gp in products {
        let h = CMatrix::from_fn(rx_antennas, tx_antennas, |_, _| {
            crate::scalar::complex_gaussian(rng, T::one())
        });
        g.add_scaled_gram(&h, gp / nt);
    }
    g.add_identity();
    (-rho * g.cholesky().expect("PD").log_det()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ell: usize, k: usize, eps: f64) -> SystemConfig<f64> {
        let mut c = SystemConfig::homogeneous(ell, k, 64, 8, 2, 1, 1.0, 1.0, 0.1, 1.0, 1000, 3);
        c.epsilon = eps;
        c
    }

    #[test]
    fn achievable_hand_value() {
        // ℓ=101, k=1, ε=0.05, I=2 → 1.05·ln(100)/2
        let c = cfg(101, 1, 0.05);
        let (n0, i) = identification_cost_achievable(&c, |_| 2.0).unwrap();
        assert!((n0 - 2.4177143).abs() < 1e-6, "{n0}");
        assert_eq!(i, 1);
    }

    #[test]
    fn converse_hand_value() {
        // ℓ=101, k=1, ε=0.05, I=2 → 0.95·ln(101)/2
        let c = cfg(101, 1, 0.05);
        let (n0, _) = identification_cost_converse(&c, |_| 2.0).unwrap();
        assert!((n0 - 2.1921822).abs() < 1e-6, "{n0}");
    }

    #[test]
    fn converse_numerator_dominates_achievable() {
        let c = cfg(40, 12, 0.1);
        for i in 1..=12u64 {
            let ach: f64 = log_binomial(40 - 12, i).unwrap();
            let conv: f64 = log_binomial(40 - 12 + i, i).unwrap();
            assert!(conv >= ach);
        }
        let _ = &c;
    }

    #[test]
    fn no_spare_users_means_zero_cost() {
        // ℓ = k + 1: only i = 1 admits a candidate set and ln C(1,1) = 0.
        let c = cfg(5, 4, 0.1);
        let (n0, i) = identification_cost_achievable(&c, |_| 2.0).unwrap();
        assert_eq!(n0, 0.0);
        assert_eq!(i, 1);
        // ℓ = k: nothing to identify at all
        let c = cfg(4, 4, 0.1);
        let (n0, i) = identification_cost_achievable(&c, |_| 2.0).unwrap();
        assert_eq!(n0, 0.0);
        assert_eq!(i, 0);
    }

    #[test]
    fn nonpositive_mi_is_rejected() {
        let c = cfg(10, 2, 0.1);
        assert!(identification_cost_achievable(&c, |_| 0.0).is_err());
        assert!(identification_cost_converse(&c, |_| -1.0).is_err());
        assert!(identification_cost_asymptotic(&c, 0.0).is_err());
        assert!(theta(&c, 0.0).is_err());
    }

    #[test]
    fn argmax_lands_on_full_misdetection_for_large_populations() {
        // hardening-shaped per-size information, exhaustive scan over i
        for (ell, k) in [(100_000usize, 20usize), (1_000_000, 100), (50_000, 50)] {
            let c = cfg(ell, k, 0.1);
            let mi = |i: usize| 4.0 * (1.0 + i as f64).ln();
            let (_, i_ach) = identification_cost_achievable(&c, mi).unwrap();
            let (_, i_conv) = identification_cost_converse(&c, mi).unwrap();
            assert_eq!(i_ach, k, "achievable argmax at ℓ={ell}");
            assert_eq!(i_conv, k, "converse argmax at ℓ={ell}");
        }
        // randomized configs with population/active ratio >= 10³
        use rand::Rng;
        let mut rng = RngStream::root(99).rng();
        for trial in 0..50 {
            let k = rng.random_range(2..200usize);
            let ratio = rng.random_range(1000..20_000usize);
            let nr = rng.random_range(1..8usize) as f64;
            let gp: f64 = rng.random_range(0.1..10.0);
            let c = cfg(k * ratio, k, 0.1);
            let mi = move |i: usize| nr * (1.0 + gp * i as f64).ln();
            let (_, i_ach) = identification_cost_achievable(&c, mi).unwrap();
            assert_eq!(i_ach, k, "trial {trial}: ℓ={}, k={k}", k * ratio);
        }
    }

    #[test]
    fn achievable_approaches_converse_for_sparse_populations() {
        let mi = |i: usize| 2.0 * (1.0 + i as f64).ln();
        let mut prev_ratio = 0.0;
        for ell in [1_000usize, 10_000, 100_000] {
            let mut c = cfg(ell, 10, 1e-9);
            c.epsilon = 1e-9;
            let (a, _) = identification_cost_achievable(&c, mi).unwrap();
            let (v, _) = identification_cost_converse(&c, mi).unwrap();
            let ratio = a / v;
            assert!(ratio <= 1.0 + 1e-9);
            assert!(ratio >= prev_ratio, "ratio should approach 1: {ratio} vs {prev_ratio}");
            prev_ratio = ratio;
        }
        assert!(prev_ratio > 0.95, "{prev_ratio}");
    }

    #[test]
    fn asymptotic_cost_examples() {
        // k = ℓ → ln C(ℓ,ℓ) = 0
        let c = cfg(7, 7, 0.1);
        assert_eq!(identification_cost_asymptotic(&c, 5.0).unwrap(), 0.0);
        // ℓ=100, k=10, I=5: ln C(100,10)/5 with ln C(100,10) = 30.48232336
        // (frozen from the direct log-sum oracle in numerics)
        let c = cfg(100, 10, 0.1);
        let v = identification_cost_asymptotic(&c, 5.0).unwrap();
        assert!((v - 30.4823234 / 5.0).abs() < 1e-5, "{v}");
        // never exceeds ℓ H₂(k/ℓ)/I
        let cap = 100.0 * binary_entropy(0.1f64).unwrap() / 5.0;
        assert!(v <= cap + 1e-12);
    }

    #[test]
    fn finite_threshold_hand_value() {
        // ℓ=12, k=2, i=1, ε′=0.5, δ₁=δ₂=0.1, γ=1, I=3
        let c = cfg(12, 2, 0.5);
        let v = finite_threshold_achievable(&c, 1, 3.0, 0.1, 0.1, 1.0).unwrap();
        assert!((v - 5.2098661).abs() < 1e-6, "{v}");
        // grows without bound as δ₂ → 1
        let hi = finite_threshold_achievable(&c, 1, 3.0, 0.1, 1.0 - 1e-12, 1.0).unwrap();
        assert!(hi > 1e9);
        assert!(finite_threshold_achievable(&c, 1, 3.0, 0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn finite_threshold_dominated_by_population_term() {
        // The population term ln C(ℓ−k, i) grows with ℓ while the rest stays
        // fixed, so the ratio to (1+ε′) ln C(ℓ−k, i)/((1−δ₂)I) falls toward 1
        // (slowly: the lead term only grows like i·ln ℓ).
        let mut prev = f64::INFINITY;
        for ell in [100usize, 10_000, 1_000_000, 100_000_000] {
            let c = cfg(ell, 10, 0.5);
            let v = finite_threshold_achievable(&c, 3, 2.0, 0.1, 0.1, 1.0).unwrap();
            let lead: f64 = 1.5 * log_binomial::<f64>((ell - 10) as u64, 3).unwrap() / (0.9 * 2.0);
            let ratio = v / lead;
            assert!(ratio >= 1.0);
            assert!(ratio < prev);
            prev = ratio;
        }
        assert!(prev < 1.4, "{prev}");
    }

    #[test]
    fn finite_converse_edges() {
        let c = cfg(12, 2, 0.1);
        // δ₁ = 1 removes the penalty
        let v = finite_threshold_converse(&c, 1, 3.0, 1.0, 0.1).unwrap();
        let want: f64 = log_binomial::<f64>(11, 1).unwrap() / (1.1 * 3.0);
        assert!((v - want).abs() < 1e-12);
        // ln 2 + ln 0.5 cancels
        let c = cfg(3, 2, 0.1); // ℓ−k+1 = 2
        let v = finite_threshold_converse(&c, 1, 3.0, 0.5, 0.1).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
        // never above the matched asymptotic converse numerator value
        let c = cfg(1000, 10, 0.1);
        for i in 1..=10usize {
            let v = finite_threshold_converse(&c, i, 2.0, 0.3, 0.05).unwrap();
            let top: f64 =
                log_binomial::<f64>((990 + i) as u64, i as u64).unwrap() / (1.05 * 2.0);
            assert!(v <= top + 1e-12);
        }
    }

    #[test]
    fn theta_edges_and_scaling() {
        // α = 1 → H₂ = 0 → θ = 0
        let c = cfg(8, 8, 0.1);
        assert_eq!(theta(&c, 2.0).unwrap(), 0.0);
        // boundary: ℓ H₂(α) = n I_full
        let c = cfg(100, 50, 0.1); // H₂(0.5) = ln 2
        let mi = 100.0 * binary_entropy(0.5f64).unwrap() / c.block_len as f64;
        let th = theta(&c, mi).unwrap();
        assert!((th - 1.0).abs() < 1e-12);
        // θ doubles exactly with ℓ at fixed α and denominator
        let c1 = cfg(100, 10, 0.1);
        let c2 = cfg(200, 20, 0.1);
        assert_eq!(theta(&c2, 2.0).unwrap(), 2.0 * theta(&c1, 2.0).unwrap());
    }

    #[test]
    fn rates_and_capacities_identities() {
        let c = cfg(1000, 100, 0.1);
        let mut c = c;
        c.block_len = 500;
        let alloc = RateAllocation::<f64>::equal(100, 500).unwrap();
        let mi = 2.0;
        let rates = message_length_rates(&alloc, mi);
        assert!(rates.iter().all(|r| (*r - rates[0]).abs() < 1e-12));
        let sum: f64 = rates.iter().sum();
        assert!((sum - 500.0 * 2.0).abs() < 1e-9);
        // shares sum to 1, uses sum to n
        let share_sum: f64 = alloc.share().iter().sum();
        let use_sum: f64 = alloc.uses().iter().sum();
        assert!((share_sum - 1.0).abs() < 1e-12);
        assert!((use_sum - 500.0).abs() < 1e-9);
        // frozen: B_k = 5·2 − 10·H₂(0.1)
        let caps = message_length_capacity(&c, &alloc, mi).unwrap();
        assert!((caps[0] - 6.7491703).abs() < 1e-6, "{}", caps[0]);
        // ΣB + ℓH₂(α) = n·I
        let total: f64 = caps.iter().sum::<f64>()
            + 1000.0 * binary_entropy(0.1f64).unwrap();
        assert!((total - 1000.0).abs() <= 1e-9 * 1000.0);
    }

    #[test]
    fn capacity_reduces_to_rate_when_activity_is_certain() {
        let c = cfg(10, 10, 0.1);
        let alloc = RateAllocation::<f64>::equal(10, 64).unwrap();
        let caps = message_length_capacity(&c, &alloc, 1.5).unwrap();
        let rates = message_length_rates(&alloc, 1.5);
        for (b, r) in caps.iter().zip(&rates) {
            assert_eq!(b, r);
        }
    }

    #[test]
    fn scaled_codebook_rescales_allocation() {
        let log_m = vec![1.0, 1.0, 2.0];
        let alloc = RateAllocation::<f64>::new(log_m.clone(), 60).unwrap();
        // direct recomputation
        let total = 4.0;
        for (k, lm) in log_m.iter().enumerate() {
            assert!((alloc.share()[k] - lm / total).abs() < 1e-15);
            assert!((alloc.uses()[k] - 60.0 * lm / total).abs() < 1e-12);
        }
        assert!(RateAllocation::<f64>::new(vec![1.0, 0.0], 10).is_err());
    }

    #[test]
    fn region_membership() {
        let c = cfg(100, 4, 0.1);
        let mi = 1.0;
        // RHS = 64·1 − 100·H₂(0.04)
        let rhs = 64.0 - 100.0 * binary_entropy(0.04f64).unwrap();
        let spec = RegionSpec { counts: vec![2, 2], rates: vec![rhs / 4.0, rhs / 4.0] };
        let (inside, slack) = region_check(&spec, &c, mi).unwrap();
        assert!(inside);
        assert!(slack.abs() < 1e-9);
        let spec = RegionSpec { counts: vec![4], rates: vec![0.0] };
        let (inside, slack) = region_check(&spec, &c, mi).unwrap();
        assert!(inside && slack > 0.0);
        let spec = RegionSpec { counts: vec![4], rates: vec![rhs] };
        let (inside, _) = region_check(&spec, &c, mi).unwrap();
        assert!(!inside);
        // oracle comparison on random specs
        let mut rng = RngStream::root(5).rng();
        use rand::Rng;
        for _ in 0..100 {
            let k1 = rng.random_range(1..4usize);
            let v1: f64 = rng.random_range(0.0..20.0);
            let v2: f64 = rng.random_range(0.0..20.0);
            let spec = RegionSpec { counts: vec![k1, 4 - k1], rates: vec![v1, v2] };
            let (inside, slack) = region_check(&spec, &c, mi).unwrap();
            let lhs = k1 as f64 * v1 + (4 - k1) as f64 * v2;
            assert_eq!(inside, lhs <= rhs);
            assert!((slack - (rhs - lhs)).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_bound_values() {
        let b = activity_deviation_bound::<f64>(1000, 0.1, 0.1, 100).unwrap();
        assert!((b - 0.9).abs() < 1e-12);
        assert_eq!(activity_deviation_bound::<f64>(1000, 0.0, 0.1, 100).unwrap(), 0.0);
        assert_eq!(activity_deviation_bound::<f64>(1000, 1.0, 0.1, 100).unwrap(), 0.0);
        assert_eq!(activity_deviation_bound::<f64>(10, 0.5, 1e-6, 1).unwrap(), 1.0); // clamped
        assert!(activity_deviation_bound::<f64>(10, 0.5, 0.0, 1).is_err());
    }

    #[test]
    fn deviation_bound_dominates_empirical_frequency() {
        let c = cfg(200, 20, 0.1);
        let delta = 0.15;
        let n = c.block_len; // 64
        let bound = activity_deviation_bound(200, c.alpha(), delta, n).unwrap();
        let hits = crate::mc::par_map_trials(100_000, 1024, RngStream::root(6), |rng| {
            let size = crate::channel::sample_activity(&c, rng).len() as f64;
            ((size - 20.0).abs() >= delta * n as f64) as u32 as f64
        });
        let freq = hits.iter().sum::<f64>() / hits.len() as f64;
        assert!(freq <= bound, "freq {freq} bound {bound}");
    }

    #[test]
    fn e0_zero_rho_is_exactly_zero() {
        let c = cfg(4, 2, 0.1);
        let est = error_exponent_e0(&c, &UserSet::first_n(2), 0.0, 1000, RngStream::root(7))
            .unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn e0_nonnegative_and_monotone_in_rho() {
        let c = cfg(4, 2, 0.1);
        let mut prev = -1e9f64;
        for (idx, rho) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
            let est = error_exponent_e0(
                &c,
                &UserSet::first_n(2),
                rho,
                40_000,
                RngStream::root(8).substream(idx as u64),
            )
            .unwrap();
            assert!(est.mean >= -3.0 * est.std_error, "rho {rho}: {est:?}");
            assert!(est.mean >= prev - 3.0 * est.std_error, "rho {rho} not monotone");
            prev = est.mean;
        }
    }

    #[test]
    fn e0_single_user_matches_quadrature_oracle() {
        // −ln E[(1 + x/2)^{−1}], x ~ Exp(1): oracle by Simpson on [0, 60]
        let n = 400_000usize;
        let h = 60.0 / n as f64;
        let g = |x: f64| (-x).exp() / (1.0 + x / 2.0);
        let mut acc = g(0.0) + g(60.0);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        let oracle = -(acc * h / 3.0).ln();
        assert!((oracle - 0.3248193).abs() < 1e-5, "oracle {oracle}");
        let c = SystemConfig::homogeneous(1, 1, 8, 4, 1, 1, 1.0, 1.0, 0.1, 1.0, 10, 1);
        let est =
            error_exponent_e0(&c, &UserSet::first_n(1), 1.0, 150_000, RngStream::root(9)).unwrap();
        assert!(
            (est.mean - oracle).abs() <= oracle * 0.02,
            "{} vs {oracle}",
            est.mean
        );
    }

    #[test]
    fn rate_exponent_boundary_cases() {
        // ε = 1 zeroes the rates: E_r = e₀ − ln C(k,k)/n = e₀ > 0.
        let mut c = cfg(4, 4, 0.1);
        c.epsilon = 1.0;
        c.block_len = 16;
        let alloc = RateAllocation::<f64>::equal(4, 16).unwrap();
        let er = error_exponent_rate(
            &c,
            &UserSet::first_n(4),
            &alloc,
            1.0,
            2.0,
            20_000,
            RngStream::root(10),
        )
        .unwrap();
        assert!(er > 0.0, "{er}");
        // ε = 0 with full-rate allocation may go nonpositive; reported, not an error
        let mut c2 = cfg(4, 4, 0.1);
        c2.epsilon = 0.0;
        c2.block_len = 16;
        let er2 = error_exponent_rate(
            &c2,
            &UserSet::first_n(4),
            &alloc,
            1.0,
            6.0,
            20_000,
            RngStream::root(11),
        )
        .unwrap();
        assert!(er2 < 0.0, "{er2}");
    }

    #[test]
    fn dof_values() {
        let mut c = cfg(200, 100, 0.1);
        c.rx_antennas = 4;
        c.tx_antennas = 1;
        assert_eq!(dof(&c), 4);
        let mut c = cfg(10, 2, 0.1);
        c.rx_antennas = 8;
        c.tx_antennas = 2;
        assert_eq!(dof(&c), 4);
        let mut c = cfg(10, 2, 0.1);
        c.rx_antennas = 4;
        c.tx_antennas = 2;
        assert_eq!(dof(&c), 4); // tie
    }

    #[test]
    fn report_assembles_consistently() {
        let c = cfg(100, 4, 0.1);
        let alloc = RateAllocation::<f64>::equal(4, 64).unwrap();
        let rep = limit_report(&c, &alloc, |i| (1.0 + i as f64).ln(), 2.0).unwrap();
        assert!(rep.n0_achievable > 0.0);
        assert!(rep.n0_converse > 0.0);
        assert_eq!(rep.rates.len(), 4);
        assert_eq!(rep.capacities.len(), 4);
        assert_eq!(rep.infeasible, rep.theta >= 1.0);
        let total: f64 = rep.capacities.iter().sum::<f64>()
            + 100.0 * binary_entropy(c.alpha()).unwrap();
        assert!((total - 64.0 * 2.0).abs() < 1e-9 * 128.0);
    }

    #[test]
    fn heterogeneous_mi_takes_worst_subset() {
        let mut c = cfg(6, 3, 0.1);
        c.gain = vec![0.2, 1.0, 1.0, 1.0, 1.0, 5.0];
        let est = mi_by_size(&c, 2, 20_000, RngStream::root(12), 24).unwrap();
        // must be at most the homogeneous unit-gain pair value
        let base = mutual_information(&c, &UserSet::new(vec![2, 3]), 20_000, RngStream::root(13))
            .unwrap();
        assert!(est.mean <= base.mean + 3.0 * (est.std_error + base.std_error));
    }

    #[test]
    fn random_subset_is_uniformly_sized() {
        let mut rng = RngStream::root(14).rng();
        for _ in 0..50 {
            let s = random_subset(10, 3, &mut rng);
            assert_eq!(s.len(), 3);
            s.validate_within(10).unwrap();
        }
    }
}
