//! Channel models and the scalar newtypes shared across the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::awgn_c;

/// Per-user activity probability.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Prob(f64);

impl Prob {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Prob(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Prob {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Prob::new(value)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// Received signal-to-noise ratio, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Snr(f64);

impl Snr {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Snr(value))
        } else {
            Err(Error::domain(format!("snr {value} must be finite and >= 0")))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Snr::new(10f64.powf(db / 10.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `k` users received at this power each.
    pub fn scaled(self, k: f64) -> Snr {
        Snr(self.0 * k)
    }
}

impl TryFrom<f64> for Snr {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Snr::new(value)
    }
}

impl From<Snr> for f64 {
    fn from(s: Snr) -> f64 {
        s.0
    }
}

/// A symmetric random access channel: every active user is received at the
/// same level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ChannelModel {
    /// Binary-expansion deterministic channel with unit sum capacity.
    Bd,
    /// Gaussian channel with per-user received SNR.
    Awgn { snr: Snr },
}

impl ChannelModel {
    pub fn awgn(snr: f64) -> Result<Self> {
        Ok(ChannelModel::Awgn { snr: Snr::new(snr)? })
    }

    /// Sum capacity of the `k`-user MAC formed by `k` active users.
    pub fn sum_capacity(&self, k: u32) -> f64 {
        match self {
            ChannelModel::Bd => {
                if k == 0 {
                    0.0
                } else {
                    1.0
                }
            }
            ChannelModel::Awgn { snr } => awgn_c(snr.scaled(f64::from(k))),
        }
    }

    /// Equal share of the `k`-user sum capacity: the single-message rate
    /// that is decodable whenever at most `k` users are active.
    pub fn equal_share_rate(&self, k: u32) -> f64 {
        assert!(k >= 1, "equal share needs at least one user");
        self.sum_capacity(k) / f64::from(k)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Bd => "bd",
            ChannelModel::Awgn { .. } => "awgn",
        }
    }
}
