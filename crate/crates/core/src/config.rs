//! Scenario configuration shared by every analysis.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Full scenario description.
///
/// `gain[k]` is the large-scale channel gain of user k+1 and `power[k]` its
/// transmit power budget (the trace of its input covariance); activity
/// probability is `active_avg / total_users`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<T = f64> {
    /// Total number of users in the cell.
    pub total_users: usize,
    /// Average number of simultaneously active users.
    pub active_avg: usize,
    /// Overall block length in channel uses.
    pub block_len: usize,
    /// Signature (identification phase) length in channel uses.
    pub sig_len: usize,
    /// Receive antennas at the base station.
    pub rx_antennas: usize,
    /// Transmit antennas per user.
    pub tx_antennas: usize,
    /// Per-user large-scale gains, length `total_users`.
    pub gain: Vec<T>,
    /// Per-user power budgets, length `total_users`.
    pub power: Vec<T>,
    /// Margin parameter for thresholds and rate backoff, in (0, 1).
    pub epsilon: T,
    /// Exponent tilt parameter in [0, 1].
    pub rho: T,
    /// Monte Carlo trial count.
    pub trials: usize,
    /// Master seed for every random stream.
    pub seed: u64,
}

impl<T: Scalar> SystemConfig<T> {
    /// Homogeneous scenario: every user shares `gain` and `power`.
    #[allow(clippy::too_many_arguments)]
    pub fn homogeneous(
        total_users: usize,
        active_avg: usize,
        block_len: usize,
        sig_len: usize,
        rx_antennas: usize,
        tx_antennas: usize,
        gain: T,
        power: T,
        epsilon: T,
        rho: T,
        trials: usize,
        seed: u64,
    ) -> Self {
        SystemConfig {
            total_users,
            active_avg,
            block_len,
            sig_len,
            rx_antennas,
            tx_antennas,
            gain: vec![gain; total_users],
            power: vec![power; total_users],
            epsilon,
            rho,
            trials,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.active_avg < 1 || self.active_avg > self.total_users {
            return Err(Error::invalid(format!(
                "need 1 <= active_avg ({}) <= total_users ({})",
                self.active_avg, self.total_users
            )));
        }
        if self.sig_len < 1 || self.sig_len > self.block_len {
            return Err(Error::invalid(format!(
                "need 1 <= sig_len ({}) <= block_len ({})",
                self.sig_len, self.block_len
            )));
        }
        if self.rx_antennas < 1 || self.tx_antennas < 1 {
            return Err(Error::invalid("antenna counts must be >= 1"));
        }
        if self.gain.len() != self.total_users || self.power.len() != self.total_users {
            return Err(Error::invalid("gain/power vectors must have one entry per user"));
        }
        if self.gain.iter().any(|g| !(*g > T::zero())) {
            return Err(Error::invalid("all gains must be positive"));
        }
        if self.power.iter().any(|p| !(*p > T::zero())) {
            return Err(Error::invalid("all powers must be positive"));
        }
        if !(self.epsilon > T::zero()) || !(self.epsilon < T::one()) {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        if !(self.rho >= T::zero()) || !(self.rho <= T::one()) {
            return Err(Error::invalid("rho must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Activity probability `active_avg / total_users` in (0, 1].
    pub fn alpha(&self) -> T {
        T::of(self.active_avg as f64) / T::of(self.total_users as f64)
    }

    /// Large-scale gain of a 1-based user index.
    pub fn gain_of(&self, user: usize) -> T {
        self.gain[user - 1]
    }

    /// Power budget of a 1-based user index.
    pub fn power_of(&self, user: usize) -> T {
        self.power[user - 1]
    }

    /// Effective receive power product gain·power of a user.
    pub fn gain_power(&self, user: usize) -> T {
        self.gain_of(user) * self.power_of(user)
    }

    /// The shared gain·power product if all users are identical.
    pub fn homogeneous_gain_power(&self) -> Option<T> {
        let first = self.gain[0] * self.power[0];
        let tol = T::of(1e-12) * first.abs().max(T::one());
        for k in 1..self.total_users {
            if (self.gain[k] * self.power[k] - first).abs() > tol {
                return None;
            }
        }
        Some(first)
    }

    pub fn covariance(&self) -> CovarianceSpec<T> {
        CovarianceSpec::isotropic(self.power.clone(), self.tx_antennas)
    }
}

/// Input covariance family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovarianceMode {
    /// Q_k = (p_k / N_T) · I, so the trace equals the power budget.
    Isotropic,
}

/// Per-user input covariance description.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceSpec<T = f64> {
    pub mode: CovarianceMode,
    pub power: Vec<T>,
    pub tx_antennas: usize,
}

impl<T: Scalar> CovarianceSpec<T> {
    pub fn isotropic(power: Vec<T>, tx_antennas: usize) -> Self {
        CovarianceSpec { mode: CovarianceMode::Isotropic, power, tx_antennas }
    }

    /// Diagonal entry of Q for a 1-based user index.
    pub fn diag(&self, user: usize) -> T {
        self.power[user - 1] / T::of(self.tx_antennas as f64)
    }

    /// Tr(Q_k) = p_k.
    pub fn trace(&self, user: usize) -> T {
        self.power[user - 1]
    }
}
