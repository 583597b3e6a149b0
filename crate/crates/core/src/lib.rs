//! Fundamental-limit analysis for MIMO massive access channels.
//!
//! The crate evaluates log-det capacities and identification-cost
//! thresholds by seeded Monte Carlo, checks the concentration of the
//! conditional information density, computes random-coding error exponents
//! and successive-decoding diagnostics, and runs a brute-force ML activity
//! detector at desk scale.
//!
//! Everything numeric is generic over the real scalar type through
//! [`Scalar`] (`f32` or `f64`); structs default to `f64` and the crate root
//! exports `*32` aliases for the single-precision lane. All randomness
//! flows through [`rng::RngStream`], so every result is reproducible and
//! independent of the worker count.

// Validation uses `!(x > 0)` style comparisons so NaN inputs fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod detect;
pub mod error;
pub mod info;
pub mod limits;
pub mod linalg;
pub mod mc;
pub mod numerics;
pub mod rng;
pub mod scalar;
pub mod sets;
pub mod sic;

pub use channel::{ChannelRealization, SignatureSet};
pub use config::{CovarianceMode, CovarianceSpec, SystemConfig};
pub use detect::{DetectionOutcome, DetectionTrial, SweepRow};
pub use error::{Error, Result};
pub use info::ConcentrationEstimate;
pub use limits::{LimitReport, RateAllocation, RegionSpec};
pub use linalg::CMatrix;
pub use mc::McEstimate;
pub use rng::RngStream;
pub use scalar::Scalar;
pub use sets::{ActivityScenario, UserSet};
pub use sic::{SicCapacity, SicDensityStats, SicReport, Verdict};

/// Default real scalar used by the command line front end.
pub type Real = f64;

// Single-precision lane aliases.
pub type SystemConfig32 = config::SystemConfig<f32>;
pub type CovarianceSpec32 = config::CovarianceSpec<f32>;
pub type McEstimate32 = mc::McEstimate<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type ChannelRealization32 = channel::ChannelRealization<f32>;
pub type SignatureSet32 = channel::SignatureSet<f32>;
pub type LimitReport32 = limits::LimitReport<f32>;
pub type RateAllocation32 = limits::RateAllocation<f32>;
pub type RegionSpec32 = limits::RegionSpec<f32>;
pub type ConcentrationEstimate32 = info::ConcentrationEstimate<f32>;
pub type SicCapacity32 = sic::SicCapacity<f32>;
pub type SicReport32 = sic::SicReport<f32>;
pub type SweepRow32 = detect::SweepRow<f32>;
