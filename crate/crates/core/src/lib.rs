//! Rate adaptation and throughput for symmetric random access channels.
//!
//! Each of `m` users is independently active with probability `p` and only
//! the receiver learns which users are active. The crate evaluates the
//! optimal single-message rate policy and its throughput for the
//! binary-expansion deterministic (BD) channel, lower and upper throughput
//! bounds for the AWGN channel, the two-user capacity regions, and a seeded
//! slot simulator used to validate the analytic curves.
//!
//! All signal-to-noise ratios are linear. Rates are in bits per channel use
//! (`C(x) = 0.5 * log2(1 + x)`).

pub mod channel;
pub mod error;
pub mod numerics;
pub mod rho_polytope;
pub mod simulator;
pub mod thresholds;
pub mod throughput;
pub mod two_user;

pub use channel::{ChannelModel, Prob, Snr};
pub use error::{Error, Result};
pub use rho_polytope::{LinearPolytope, LpSolution, RhoVector, XVector};
pub use simulator::{RateChoice, SimReport, SlotSimConfig};
pub use thresholds::ThresholdTable;
pub use throughput::{CurveKind, RatePolicy, ThroughputCurve, UpperBound};
pub use two_user::{AwgnPair, BdParams, RatePoint4, SplitParams};
