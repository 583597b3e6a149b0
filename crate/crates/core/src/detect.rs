//! Exhaustive maximum-likelihood active-set detection at desk scale.
//!
//! The decoder knows every user's channel and signature block and picks the
//! size-k subset whose reconstructed signal leaves the smallest residual,
//! which is the likelihood maximizer under unit-variance Gaussian noise.
//! Ties go to the lexicographically smallest subset.

use num_complex::Complex;

use crate::channel::{sample_channel, sample_signatures, synthesize_received, ChannelRealization, SignatureSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::limits::random_subset;
use crate::mc::{binomial_ci, par_map_trials, DEFAULT_Z};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sets::UserSet;

/// Default cap on the number of candidate subsets an exhaustive search may
/// visit.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// One detection outcome paired with its ground truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectionTrial {
    pub truth: UserSet,
    pub decoded: UserSet,
    /// Misdetection count |truth ∖ decoded| (equals the false-alarm count
    /// for a size-preserving decoder).
    pub i_md: usize,
}

impl DetectionTrial {
    pub fn new(truth: UserSet, decoded: UserSet) -> Self {
        let i_md = truth.minus(&decoded).len();
        DetectionTrial { truth, decoded, i_md }
    }

    pub fn is_error(&self) -> bool {
        self.truth != self.decoded
    }
}

/// Split a (truth, decoded) pair into correctly decoded, misdetected, and
/// false-alarm sets.
pub fn decompose_errors(truth: &UserSet, decoded: &UserSet) -> (UserSet, UserSet, UserSet) {
    (truth.intersect(decoded), truth.minus(decoded), decoded.minus(truth))
}

/// Decoder output; `residuals` lists the per-subset squared residual in
/// enumeration order when requested.
#[derive(Clone, Debug)]
pub struct DetectionOutcome<T = f64> {
    pub decoded: UserSet,
    pub residuals: Option<Vec<T>>,
}

/// Number of candidate subsets, or an error once the budget is exceeded.
fn check_budget(total: usize, k: usize, budget: u64) -> Result<u128> {
    let mut count: u128 = 1;
    for i in 0..k {
        count = count
            .checked_mul((total - i) as u128)
            .ok_or(Error::BudgetExceeded { candidates: u128::MAX, budget })?;
        count /= (i + 1) as u128;
        if count > budget as u128 {
            return Err(Error::BudgetExceeded { candidates: count, budget });
        }
    }
    Ok(count)
}

/// Exhaustive ML search over all size-k subsets.
pub fn ml_detect<T: Scalar>(
    y_block: &[Vec<Complex<T>>],
    signatures: &[SignatureSet<T>],
    channels: &[ChannelRealization<T>],
    cfg: &SystemConfig<T>,
    budget: u64,
    keep_residuals: bool,
) -> Result<DetectionOutcome<T>> {
    let uses = y_block.len();
    if signatures.len() != uses || channels.len() != uses || uses == 0 {
        return Err(Error::invalid("block length mismatch"));
    }
    let ell = cfg.total_users;
    let k = cfg.active_avg;
    let n_subsets = check_budget(ell, k, budget)?;

    // Per (use, user) contribution H_u(i) s_u(i), flattened.
    let nr = cfg.rx_antennas;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut contrib = vec![zero; uses * ell * nr];
    for (i, (ch, sg)) in channels.iter().zip(signatures).enumerate() {
        for u in 1..=ell {
            let h = ch.get(u).ok_or_else(|| Error::invalid(format!("no channel for user {u}")))?;
            let s = sg.get(u).ok_or_else(|| Error::invalid(format!("no signature for user {u}")))?;
            if h.rows() != nr || h.cols() != s.len() {
                return Err(Error::invalid("channel/signature dimension mismatch"));
            }
            let base = (i * ell + (u - 1)) * nr;
            h.mul_vec_acc(s, one, &mut contrib[base..base + nr]);
        }
    }

    // Lexicographic walk over k-combinations of 1..=ell.
    let mut subset: Vec<usize> = (1..=k).collect();
    let mut best = T::infinity();
    let mut best_subset = subset.clone();
    let mut residuals = if keep_residuals { Vec::with_capacity(n_subsets as usize) } else { Vec::new() };
    loop {
        let mut r = T::zero();
        for (i, y) in y_block.iter().enumerate() {
            for a in 0..nr {
                let mut v = y[a];
                for &u in &subset {
                    v = v - contrib[(i * ell + (u - 1)) * nr + a];
                }
                r = r + v.re * v.re + v.im * v.im;
            }
        }
        if keep_residuals {
            residuals.push(r);
        }
        if r < best {
            best = r;
            best_subset.copy_from_slice(&subset);
        }
        // advance to the next combination
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if subset[pos] < ell - (k - 1 - pos) {
                subset[pos] += 1;
                for j in pos + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return Ok(DetectionOutcome {
                    decoded: UserSet::new(best_subset),
                    residuals: keep_residuals.then_some(residuals),
                });
            }
        }
    }
}

/// One row of an error-probability sweep.
#[derive(Clone, Debug)]
pub struct SweepRow<T = f64> {
    pub sig_len: usize,
    pub trials: usize,
    pub errors: usize,
    pub p_e: T,
    pub ci_low: T,
    pub ci_high: T,
    /// errors bucketed by misdetection count (index i−1 holds |A_md| = i).
    pub errors_by_md: Vec<usize>,
}

/// Empirical exact-set error probability across a signature-length grid.
/// Ground truth is a uniform size-k subset per trial.
pub fn error_sweep<T: Scalar>(
    cfg: &SystemConfig<T>,
    sig_len_grid: &[usize],
    trials: usize,
    stream: RngStream,
    budget: u64,
) -> Result<Vec<SweepRow<T>>> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if sig_len_grid.is_empty() || sig_len_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("signature length grid must be strictly ascending"));
    }
    check_budget(cfg.total_users, cfg.active_avg, budget)?;
    let all = UserSet::first_n(cfg.total_users);
    let mut rows = Vec::with_capacity(sig_len_grid.len());
    for (gi, &uses) in sig_len_grid.iter().enumerate() {
        if uses == 0 {
            return Err(Error::invalid("signature length must be >= 1"));
        }
        let outcomes = par_map_trials(trials, 256, stream.substream(gi as u64), |rng| {
            let truth = random_subset(cfg.total_users, cfg.active_avg, rng);
            let mut channels = Vec::with_capacity(uses);
            let mut sigs = Vec::with_capacity(uses);
            for _ in 0..uses {
                channels.push(sample_channel(cfg, &all, rng).expect("valid users"));
                sigs.push(sample_signatures(cfg, &all, rng).expect("valid users"));
            }
            let y = synthesize_received(cfg, &truth, &channels, &sigs, rng).expect("dims agree");
            let out = ml_detect(&y, &sigs, &channels, cfg, budget, false).expect("within budget");
            let trial = DetectionTrial::new(truth, out.decoded);
            (trial.is_error(), trial.i_md)
        });
        let errors = outcomes.iter().filter(|(e, _)| *e).count();
        let mut errors_by_md = vec![0usize; cfg.active_avg];
        for (e, i_md) in &outcomes {
            if *e {
                errors_by_md[i_md - 1] += 1;
            }
        }
        let (p_e, ci_low, ci_high) = binomial_ci(errors, trials, T::of(DEFAULT_Z));
        rows.push(SweepRow { sig_len: uses, trials, errors, p_e, ci_low, ci_high, errors_by_md });
    }
    Ok(rows)
}
