//! Boundaries of the activity-probability intervals on which one
//! equal-share rate is optimal.
//!
//! For `k = 1..m-1` the boundary `p_k` is the root in `(0, k/m)` of
//!
//! ```text
//! g_k(p) = cap(k)/k * F(m-1, k-1; p) - cap(k+1)/(k+1) * F(m-1, k; p)
//! ```
//!
//! where `cap(k)` is the `k`-user sum capacity. `g_k` is positive to the left
//! of the root and negative between the root and `(k+1)/m`, so a bisection on
//! `[1e-15, (k+1)/m]` always brackets it.

use serde::Serialize;

use crate::channel::{ChannelModel, Snr};
use crate::error::{Error, Result};
use crate::numerics::{binom_cdf, poisson_cdf_unchecked, MAX_TRIALS};

/// Lower end of every bisection bracket.
pub const BRACKET_EPS: f64 = 1e-15;

/// Absolute tolerance on returned boundaries.
pub const TOLERANCE: f64 = 1e-12;

/// Largest `m` for which a full table is built.
pub const MAX_TABLE_USERS: u32 = 1_000;

/// Largest `k_max` accepted by [`poisson_thresholds`].
pub const MAX_POISSON_K: u32 = 100;

/// Which family a table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TableModel {
    Finite { channel: ChannelModel, m: u32 },
    /// Infinite-population limit with total arrival rate λ = m p.
    Poisson,
}

/// Partition boundaries and the rate used on each interval.
///
/// Interval `k` (1-based) is `(boundaries[k-1], boundaries[k]]`. For finite
/// tables `boundaries` runs from `p_0 = 0` to `p_m = 1`; for the Poisson
/// limit it runs from `λ_0 = 0` to `λ_K` and the last interval is open-ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdTable {
    pub model: TableModel,
    pub boundaries: Vec<f64>,
    /// `rates[k-1]` is the per-user rate on interval `k`.
    pub rates: Vec<f64>,
}

impl ThresholdTable {
    /// Population size, absent for the Poisson limit.
    pub fn m(&self) -> Option<u32> {
        match self.model {
            TableModel::Finite { m, .. } => Some(m),
            TableModel::Poisson => None,
        }
    }

    /// Interior boundaries `p_1..p_{m-1}` (or `λ_1..λ_K`).
    pub fn interior(&self) -> &[f64] {
        match self.model {
            TableModel::Finite { .. } => &self.boundaries[1..self.boundaries.len() - 1],
            TableModel::Poisson => &self.boundaries[1..],
        }
    }

    /// 1-based interval index `k` with `x` in `(b_{k-1}, b_k]`. Zero maps to
    /// the first interval. Returns `None` past the last finite boundary of a
    /// Poisson table.
    pub fn interval_index(&self, x: f64) -> Option<usize> {
        let interior = self.interior();
        let k = interior.partition_point(|&b| b < x) + 1;
        match self.model {
            TableModel::Finite { .. } => Some(k),
            TableModel::Poisson => (k <= self.rates.len()).then_some(k),
        }
    }

    pub fn rate(&self, x: f64) -> Option<f64> {
        self.interval_index(x).map(|k| self.rates[k - 1])
    }

    /// Checks the ordering invariants: strictly increasing boundaries,
    /// `p_k < k/m` on finite tables, strictly decreasing rates. The BD root
    /// `p_1` equals `1/m` exactly, so `k = 1` is held to `p_1 <= 1/m` within
    /// the bisection tolerance.
    pub fn validate(&self) -> Result<()> {
        if self.boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Numerical("boundaries not strictly increasing".into()));
        }
        if self.rates.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::Numerical("rates not strictly decreasing".into()));
        }
        if let TableModel::Finite { m, .. } = self.model {
            for (i, &pk) in self.interior().iter().enumerate() {
                let k = (i + 1) as f64;
                let limit = k / f64::from(m) + if i == 0 { TOLERANCE } else { 0.0 };
                if !(pk < limit) {
                    return Err(Error::Numerical(format!("p_{} = {pk} not below k/m", i + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Bisection for a function that is positive at `lo` and negative at `hi`.
pub fn bisect_decreasing<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `g_k(p)` for the channel: positive before the `k`-th boundary.
pub fn switch_gap(channel: &ChannelModel, m: u32, k: u32, p: f64) -> f64 {
    let n = u64::from(m - 1);
    channel.equal_share_rate(k) * binom_cdf(n, i64::from(k) - 1, p)
        - channel.equal_share_rate(k + 1) * binom_cdf(n, i64::from(k), p)
}

/// The single boundary `p_k` for population `m`. Accepts `m` up to 10^4.
pub fn boundary(channel: &ChannelModel, m: u32, k: u32) -> Result<f64> {
    if m < 2 || u64::from(m) > MAX_TRIALS {
        return Err(Error::domain(format!("m = {m} outside [2, {MAX_TRIALS}]")));
    }
    if k == 0 || k >= m {
        return Err(Error::domain(format!("k = {k} outside [1, {}]", m - 1)));
    }
    if let ChannelModel::Awgn { snr } = channel {
        if snr.get() <= 0.0 {
            return Err(Error::domain("AWGN thresholds need P > 0"));
        }
    }
    let hi = f64::from(k + 1) / f64::from(m);
    bisect_decreasing(|p| switch_gap(channel, m, k, p), BRACKET_EPS, hi, TOLERANCE)
}

/// Threshold table for any symmetric channel.
pub fn channel_thresholds(channel: &ChannelModel, m: u32) -> Result<ThresholdTable> {
    if !(2..=MAX_TABLE_USERS).contains(&m) {
        return Err(Error::domain(format!("m = {m} outside [2, {MAX_TABLE_USERS}]")));
    }
    let mut boundaries = Vec::with_capacity(m as usize + 1);
    boundaries.push(0.0);
    for k in 1..m {
        boundaries.push(boundary(channel, m, k)?);
    }
    boundaries.push(1.0);
    let rates = (1..=m).map(|k| channel.equal_share_rate(k)).collect();
    Ok(ThresholdTable { model: TableModel::Finite { channel: *channel, m }, boundaries, rates })
}

/// Boundaries for the BD channel, rate `1/k` on interval `k`.
pub fn bd_thresholds(m: u32) -> Result<ThresholdTable> {
    channel_thresholds(&ChannelModel::Bd, m)
}

/// Boundaries for the AWGN channel, rate `C(kP)/k` on interval `k`.
pub fn awgn_thresholds(m: u32, snr: Snr) -> Result<ThresholdTable> {
    if snr.get() <= 0.0 {
        return Err(Error::domain("AWGN thresholds need P > 0"));
    }
    channel_thresholds(&ChannelModel::Awgn { snr }, m)
}

/// Poisson analogue of [`switch_gap`]:
/// `P(N <= k-1)/k - P(N <= k)/(k+1)` for `N ~ Poisson(λ)`.
pub fn poisson_switch_gap(k: u32, lambda: f64) -> f64 {
    poisson_cdf_unchecked(u64::from(k) - 1, lambda) / f64::from(k)
        - poisson_cdf_unchecked(u64::from(k), lambda) / f64::from(k + 1)
}

/// Boundaries `λ_1..λ_{k_max}` of the infinite-population limit.
pub fn poisson_thresholds(k_max: u32) -> Result<ThresholdTable> {
    if !(1..=MAX_POISSON_K).contains(&k_max) {
        return Err(Error::domain(format!("k_max = {k_max} outside [1, {MAX_POISSON_K}]")));
    }
    let mut boundaries = vec![0.0];
    for k in 1..=k_max {
        let hi = f64::from(k + 1);
        boundaries.push(bisect_decreasing(|l| poisson_switch_gap(k, l), BRACKET_EPS, hi, TOLERANCE)?);
    }
    let rates = (1..=k_max).map(|k| 1.0 / f64::from(k)).collect();
    Ok(ThresholdTable { model: TableModel::Poisson, boundaries, rates })
}
