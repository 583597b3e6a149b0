//! Channel, signature, activity, and received-signal synthesis.
//!
//! Per channel use, user k contributes H_k s_k to the receive vector, where
//! H_k has i.i.d. CN(0, gain_k) entries redrawn every use and s_k is a
//! CN(0, Q_k) symbol vector. Noise is CN(0, I).

use num_complex::Complex;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::StreamRng;
use crate::scalar::{complex_gaussian, Scalar};
use crate::sets::UserSet;

/// Per-user channel matrices for one channel use.
#[derive(Clone, Debug)]
pub struct ChannelRealization<T = f64> {
    users: UserSet,
    mats: Vec<CMatrix<T>>,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Wrap explicit per-user matrices; `mats[i]` belongs to `users.ids()[i]`.
    pub fn from_matrices(users: UserSet, mats: Vec<CMatrix<T>>) -> Result<Self> {
        if users.len() != mats.len() {
            return Err(Error::invalid("one channel matrix per user required"));
        }
        Ok(ChannelRealization { users, mats })
    }

    pub fn users(&self) -> &UserSet {
        &self.users
    }

    /// Channel of a 1-based user index, if present.
    pub fn get(&self, user: usize) -> Option<&CMatrix<T>> {
        self.users.ids().binary_search(&user).ok().map(|pos| &self.mats[pos])
    }
}

/// Per-user signature (or codeword) vectors for one channel use.
#[derive(Clone, Debug)]
pub struct SignatureSet<T = f64> {
    users: UserSet,
    sigs: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> SignatureSet<T> {
    /// Wrap explicit per-user vectors; `sigs[i]` belongs to `users.ids()[i]`.
    pub fn from_vectors(users: UserSet, sigs: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if users.len() != sigs.len() {
            return Err(Error::invalid("one signature vector per user required"));
        }
        Ok(SignatureSet { users, sigs })
    }

    pub fn users(&self) -> &UserSet {
        &self.users
    }

    pub fn get(&self, user: usize) -> Option<&[Complex<T>]> {
        self.users.ids().binary_search(&user).ok().map(|pos| self.sigs[pos].as_slice())
    }
}

/// Draw the active set: each user independently with probability
/// `active_avg / total_users`.
pub fn sample_activity<T: Scalar>(cfg: &SystemConfig<T>, rng: &mut StreamRng) -> UserSet {
    let alpha = cfg.alpha();
    (1..=cfg.total_users).filter(|_| T::uniform01(rng) < alpha).collect()
}

/// Draw independent channels for `users`; entry variance is the user gain.
pub fn sample_channel<T: Scalar>(
    cfg: &SystemConfig<T>,
    users: &UserSet,
    rng: &mut StreamRng,
) -> Result<ChannelRealization<T>> {
    users.validate_within(cfg.total_users)?;
    let mats = users
        .iter()
        .map(|u| {
            let g = cfg.gain_of(u);
            CMatrix::from_fn(cfg.rx_antennas, cfg.tx_antennas, |_, _| complex_gaussian(rng, g))
        })
        .collect();
    Ok(ChannelRealization { users: users.clone(), mats })
}

/// Draw CN(0, Q_k) symbol vectors for `users`.
pub fn sample_signatures<T: Scalar>(
    cfg: &SystemConfig<T>,
    users: &UserSet,
    rng: &mut StreamRng,
) -> Result<SignatureSet<T>> {
    users.validate_within(cfg.total_users)?;
    let q = cfg.covariance();
    let sigs = users
        .iter()
        .map(|u| {
            let v = q.diag(u);
            (0..cfg.tx_antennas).map(|_| complex_gaussian(rng, v)).collect()
        })
        .collect();
    Ok(SignatureSet { users: users.clone(), sigs })
}

/// One received column y = Σ_{k active} H_k s_k + z.
pub fn synthesize_received_use<T: Scalar>(
    cfg: &SystemConfig<T>,
    active: &UserSet,
    channels: &ChannelRealization<T>,
    signatures: &SignatureSet<T>,
    rng: &mut StreamRng,
) -> Result<Vec<Complex<T>>> {
    let mut y: Vec<Complex<T>> =
        (0..cfg.rx_antennas).map(|_| complex_gaussian(rng, T::one())).collect();
    let one = Complex::new(T::one(), T::zero());
    for u in active.iter() {
        let h = channels
            .get(u)
            .ok_or_else(|| Error::invalid(format!("no channel for user {u}")))?;
        let s = signatures
            .get(u)
            .ok_or_else(|| Error::invalid(format!("no signature for user {u}")))?;
        if h.cols() != s.len() || h.rows() != cfg.rx_antennas {
            return Err(Error::invalid("channel/signature dimension mismatch"));
        }
        h.mul_vec_acc(s, one, &mut y);
    }
    Ok(y)
}

/// Received block over `uses` channel uses; channels and signatures are
/// per-use slices of equal length.
pub fn synthesize_received<T: Scalar>(
    cfg: &SystemConfig<T>,
    active: &UserSet,
    channels: &[ChannelRealization<T>],
    signatures: &[SignatureSet<T>],
    rng: &mut StreamRng,
) -> Result<Vec<Vec<Complex<T>>>> {
    if channels.len() != signatures.len() {
        return Err(Error::invalid("channel/signature block length mismatch"));
    }
    channels
        .iter()
        .zip(signatures.iter())
        .map(|(h, s)| synthesize_received_use(cfg, active, h, s, rng))
        .collect()
}
