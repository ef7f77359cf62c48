//! Throughput of the single-message rate policy, bounds for the AWGN
//! channel, the infinite-population limit, and baseline schemes.
//!
//! Encoding every message at the equal share `cap(k)/k` succeeds exactly
//! when at most `k` users are active, so a single rate choice yields
//! `mp cap(k)/k F(m-1, k-1; p)`. The optimal policy takes the best `k`, and
//! the thresholds in [`crate::thresholds`] say which `k` wins where.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelModel, Prob, Snr};
use crate::error::{Error, Result};
use crate::numerics::{awgn_c, binom_cdf, binom_cdf_vec, binom_pmf_vec, poisson_cdf_unchecked, MAX_TRIALS};
use crate::rho_polytope::{awgn_polytope, awgn_vertex_family, bd_rho_polytope, lp_maximize, MAX_LP_DIM};
use crate::thresholds::{channel_thresholds, ThresholdTable};

fn check_m(m: u32) {
    assert!(m >= 1 && u64::from(m) <= MAX_TRIALS, "m = {m} outside [1, {MAX_TRIALS}]");
}

/// Best single-rate throughput and the maximizing `k`. Ties go to the
/// smaller `k`.
pub fn single_rate_max(channel: &ChannelModel, p: Prob, m: u32) -> (f64, u32) {
    check_m(m);
    let p = p.get();
    let cdf = binom_cdf_vec(u64::from(m - 1), p);
    let mp = f64::from(m) * p;
    let mut best = (0.0, 1);
    for k in 1..=m {
        let v = mp * channel.equal_share_rate(k) * cdf[k as usize - 1];
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}

/// Throughput when every active user sends at the `k`-user equal share.
pub fn fixed_share_throughput(channel: &ChannelModel, p: Prob, m: u32, k: u32) -> f64 {
    check_m(m);
    assert!((1..=m).contains(&k));
    let p = p.get();
    f64::from(m) * p * channel.equal_share_rate(k) * binom_cdf(u64::from(m - 1), i64::from(k) - 1, p)
}

/// Exact BD throughput `T(p, m)`.
pub fn bd_throughput(p: Prob, m: u32) -> f64 {
    single_rate_max(&ChannelModel::Bd, p, m).0
}

/// Optimal BD rate `1/k` on the `k`-th threshold interval.
pub fn bd_rate(p: Prob, m: u32) -> Result<f64> {
    Ok(RatePolicy::new(ChannelModel::Bd, m)?.rate(p))
}

/// AWGN single-message lower bound `T_(p, m, P)`.
pub fn awgn_throughput_lower(p: Prob, m: u32, snr: Snr) -> f64 {
    single_rate_max(&ChannelModel::Awgn { snr }, p, m).0
}

/// Rate `C(kP)/k` on the `k`-th AWGN threshold interval.
pub fn awgn_rate(p: Prob, m: u32, snr: Snr) -> Result<f64> {
    Ok(RatePolicy::new(ChannelModel::Awgn { snr }, m)?.rate(p))
}

/// Infinite-population throughput `max_k (λ/k) P(N <= k-1)`, `N ~ Poisson(λ)`.
pub fn poisson_throughput(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be finite and > 0")));
    }
    let k_max = (lambda + 10.0 * lambda.sqrt() + 20.0).ceil() as u64;
    Ok((1..=k_max)
        .map(|k| lambda / k as f64 * poisson_cdf_unchecked(k - 1, lambda))
        .fold(0.0, f64::max))
}

/// Which evaluation produced [`UpperBound::value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UpperMethod {
    Lp,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBound {
    pub value: f64,
    /// LP optimum, absent past [`MAX_LP_DIM`].
    pub lp: Option<f64>,
    /// Best vertex of the closed-form family.
    pub analytic: f64,
    pub method: UpperMethod,
    /// Set when the value is not backed by the LP.
    pub warning: bool,
}

/// Objective weights `mp F(m-1, i-1; p)`, `i = 1..m`.
pub fn upper_objective(p: Prob, m: u32) -> Vec<f64> {
    let cdf = binom_cdf_vec(u64::from(m - 1), p.get());
    let mp = f64::from(m) * p.get();
    cdf.iter().map(|c| mp * c).collect()
}

/// AWGN upper bound `T̄(p, m, P)`: the LP over the outer x-space polytope
/// for `m <= 64`, otherwise the best vertex of the closed-form family.
pub fn awgn_throughput_upper(p: Prob, m: u32, snr: Snr) -> Result<UpperBound> {
    check_m(m);
    let obj = upper_objective(p, m);
    let analytic = awgn_vertex_family(m as usize, snr)
        .iter()
        .map(|v| v.0.iter().zip(&obj).map(|(a, b)| a * b).sum::<f64>())
        .fold(0.0, f64::max);
    if m as usize > MAX_LP_DIM {
        return Ok(UpperBound { value: analytic, lp: None, analytic, method: UpperMethod::Analytic, warning: true });
    }
    let lp = lp_maximize(&awgn_polytope(m as usize, snr), &obj).map_err(|e| match e {
        Error::Infeasible | Error::Unbounded => Error::Numerical(format!("upper-bound LP: {e}")),
        other => other,
    })?;
    Ok(UpperBound { value: lp.value, lp: Some(lp.value), analytic, method: UpperMethod::Lp, warning: false })
}

/// BD throughput as the LP over the ρ-space region with weights
/// `p^k (1-p)^(m-k)`.
pub fn bd_throughput_rho_lp(p: Prob, m: u32) -> Result<f64> {
    let p = p.get();
    let obj: Vec<f64> = (1..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect();
    Ok(lp_maximize(&bd_rho_polytope(m as usize), &obj)?.value)
}

/// Perfect channel-state baseline `Σ f(m, k) C(kP)`.
pub fn baseline_csi(p: Prob, m: u32, snr: Snr) -> f64 {
    check_m(m);
    binom_pmf_vec(u64::from(m), p.get())
        .iter()
        .enumerate()
        .map(|(k, f)| f * awgn_c(snr.scaled(k as f64)))
        .sum()
}

/// Adaptive-rate baseline `p C(mP)`.
pub fn baseline_adaptive(p: Prob, m: u32, snr: Snr) -> f64 {
    check_m(m);
    p.get() * awgn_c(snr.scaled(f64::from(m)))
}

/// `floor(mp)` clamped to `[1, m]`. The small offset keeps products such as
/// `0.29 * 100` from rounding down a whole user.
pub fn k_ml(p: Prob, m: u32) -> u32 {
    let k = (f64::from(m) * p.get() + 1e-9).floor() as u32;
    k.clamp(1, m)
}

/// Most-likely-count baseline: the equal share for `k_ML` users.
pub fn baseline_ml(p: Prob, m: u32, snr: Snr) -> f64 {
    fixed_share_throughput(&ChannelModel::Awgn { snr }, p, m, k_ml(p, m))
}

/// Slotted ALOHA at rate one: `mp (1-p)^(m-1)`.
pub fn baseline_aloha(p: Prob, m: u32) -> f64 {
    check_m(m);
    let p = p.get();
    f64::from(m) * p * (1.0 - p).powi(m as i32 - 1)
}

/// Poisson-limit slotted ALOHA `λ e^{-λ}`.
pub fn baseline_aloha_poisson(lambda: f64) -> f64 {
    lambda * (-lambda).exp()
}

/// Single-message rate policy backed by a threshold table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePolicy {
    pub model: ChannelModel,
    pub m: u32,
    pub table: ThresholdTable,
}

impl RatePolicy {
    pub fn new(model: ChannelModel, m: u32) -> Result<Self> {
        let table = channel_thresholds(&model, m)?;
        Ok(RatePolicy { model, m, table })
    }

    /// 1-based interval index of `p`.
    pub fn interval(&self, p: Prob) -> u32 {
        self.table.interval_index(p.get()).expect("finite tables cover [0, 1]") as u32
    }

    pub fn rate(&self, p: Prob) -> f64 {
        self.table.rates[self.interval(p) as usize - 1]
    }

    /// Throughput from the interval-selected expression.
    pub fn piecewise_throughput(&self, p: Prob) -> f64 {
        fixed_share_throughput(&self.model, p, self.m, self.interval(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    BdExact,
    AwgnLower,
    AwgnUpper,
    Csi,
    Adaptive,
    Ml,
    Aloha,
    PoissonLimit,
}

impl CurveKind {
    pub const ALL: [CurveKind; 8] = [
        CurveKind::BdExact,
        CurveKind::AwgnLower,
        CurveKind::AwgnUpper,
        CurveKind::Csi,
        CurveKind::Adaptive,
        CurveKind::Ml,
        CurveKind::Aloha,
        CurveKind::PoissonLimit,
    ];

    /// Column label used in emitted data.
    pub fn column(self) -> &'static str {
        match self {
            CurveKind::BdExact => "T",
            CurveKind::AwgnLower => "T_lower",
            CurveKind::AwgnUpper => "T_upper",
            CurveKind::Csi => "CSI",
            CurveKind::Adaptive => "AD",
            CurveKind::Ml => "ML",
            CurveKind::Aloha => "ALOHA",
            CurveKind::PoissonLimit => "T_poisson",
        }
    }

    pub fn needs_snr(self) -> bool {
        matches!(
            self,
            CurveKind::AwgnLower | CurveKind::AwgnUpper | CurveKind::Csi | CurveKind::Adaptive | CurveKind::Ml
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputCurve {
    pub model: ChannelModel,
    /// Absent for the Poisson limit, whose abscissa is λ.
    pub m: Option<u32>,
    pub kind: CurveKind,
    pub samples: Vec<(f64, f64)>,
    /// Some samples rely on the unverified closed form.
    pub warning: bool,
}

/// `n` evenly spaced points `1/n, 2/n, ..., 1`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

fn snr_of(model: &ChannelModel, kind: CurveKind) -> Result<Snr> {
    match model {
        ChannelModel::Awgn { snr } => Ok(*snr),
        ChannelModel::Bd => Err(Error::domain(format!("{} needs an AWGN channel", kind.column()))),
    }
}

/// Evaluates one curve on `grid`, in parallel over grid points. The grid is
/// `p` for finite populations and `λ` for [`CurveKind::PoissonLimit`].
pub fn curve(kind: CurveKind, model: ChannelModel, m: u32, grid: &[f64]) -> Result<ThroughputCurve> {
    if kind != CurveKind::PoissonLimit && !(1..=MAX_TRIALS as u32).contains(&m) {
        return Err(Error::domain(format!("m = {m} outside [1, {MAX_TRIALS}]")));
    }
    let snr = if kind.needs_snr() { Some(snr_of(&model, kind)?) } else { None };
    let eval = |x: f64| -> Result<(f64, bool)> {
        if kind == CurveKind::PoissonLimit {
            return Ok((poisson_throughput(x)?, false));
        }
        let p = Prob::new(x)?;
        Ok(match kind {
            CurveKind::BdExact => (single_rate_max(&model, p, m).0, false),
            CurveKind::AwgnLower => (awgn_throughput_lower(p, m, snr.unwrap()), false),
            CurveKind::AwgnUpper => {
                let u = awgn_throughput_upper(p, m, snr.unwrap())?;
                (u.value, u.warning)
            }
            CurveKind::Csi => (baseline_csi(p, m, snr.unwrap()), false),
            CurveKind::Adaptive => (baseline_adaptive(p, m, snr.unwrap()), false),
            CurveKind::Ml => (baseline_ml(p, m, snr.unwrap()), false),
            CurveKind::Aloha => (baseline_aloha(p, m), false),
            CurveKind::PoissonLimit => unreachable!(),
        })
    };
    let values: Vec<(f64, bool)> = grid.par_iter().map(|&x| eval(x)).collect::<Result<_>>()?;
    let warning = values.iter().any(|v| v.1);
    let samples = grid.iter().zip(&values).map(|(&x, v)| (x, v.0)).collect();
    let m = (kind != CurveKind::PoissonLimit).then_some(m);
    Ok(ThroughputCurve { model, m, kind, samples, warning })
}
