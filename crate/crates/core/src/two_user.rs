//! Two-user regions: the exact BD region, the AWGN outer region and the
//! superposition-coding inner region, plus the constant-gap check between
//! the AWGN bounds.
//!
//! Rate tuples are `(r1({1}), r2({2}), r1({1,2}), r2({1,2}))`: what each user
//! delivers when alone and when both are active. With the two-message
//! structure, user `i` sends a common message at rate `Rc_i`, always decoded,
//! and a private one at rate `Rp_i`, decoded only when alone:
//! `r_i({i}) = Rc_i + Rp_i`, `r_i({1,2}) = Rc_i`.

use serde::{Deserialize, Serialize};

use crate::channel::{Prob, Snr};
use crate::error::{Error, Result};
use crate::numerics::awgn_c;
use crate::rho_polytope::{LinearProgram, Relation};

/// Slack on every region inequality.
pub const REGION_TOL: f64 = 1e-12;

/// Default β grid resolution per axis for the inner region.
pub const DEFAULT_BETA_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint4 {
    pub r1_solo: f64,
    pub r2_solo: f64,
    pub r1_joint: f64,
    pub r2_joint: f64,
}

impl RatePoint4 {
    pub const ZERO: RatePoint4 = RatePoint4 { r1_solo: 0.0, r2_solo: 0.0, r1_joint: 0.0, r2_joint: 0.0 };

    pub fn new(r1_solo: f64, r2_solo: f64, r1_joint: f64, r2_joint: f64) -> Self {
        RatePoint4 { r1_solo, r2_solo, r1_joint, r2_joint }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        RatePoint4::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r1_solo, self.r2_solo, self.r1_joint, self.r2_joint]
    }

    /// Message rates `(Rp1, Rp2, Rc1, Rc2)`.
    pub fn to_message_rates(self) -> [f64; 4] {
        [self.r1_solo - self.r1_joint, self.r2_solo - self.r2_joint, self.r1_joint, self.r2_joint]
    }

    pub fn from_message_rates(m: [f64; 4]) -> Self {
        RatePoint4::new(m[2] + m[0], m[3] + m[1], m[2], m[3])
    }

    pub fn distance(self, other: RatePoint4) -> f64 {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    fn nonnegative(self) -> bool {
        self.to_array().iter().all(|&v| v >= -REGION_TOL)
    }

    /// Joint rates do not exceed solo rates.
    fn monotone(self) -> bool {
        self.r1_joint <= self.r1_solo + REGION_TOL && self.r2_joint <= self.r2_solo + REGION_TOL
    }
}

/// Signal levels of the deterministic channel, `n2 <= n1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BdParams {
    pub n1: u32,
    pub n2: u32,
}

impl BdParams {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n2 > n1 {
            return Err(Error::domain(format!("n2 = {n2} exceeds n1 = {n1}")));
        }
        Ok(BdParams { n1, n2 })
    }
}

/// Power fractions spent on the private layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    pub beta1: f64,
    pub beta2: f64,
}

impl SplitParams {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta1) || !(0.0..=1.0).contains(&beta2) {
            return Err(Error::domain("split fractions must lie in [0, 1]"));
        }
        Ok(SplitParams { beta1, beta2 })
    }
}

/// Received powers with `P1 >= P2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwgnPair {
    pub p1: Snr,
    pub p2: Snr,
}

impl AwgnPair {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let (a, b) = (Snr::new(p1)?, Snr::new(p2)?);
        if p1 < p2 {
            return Err(Error::domain(format!("P1 = {p1} must be at least P2 = {p2}")));
        }
        Ok(AwgnPair { p1: a, p2: b })
    }

    fn c1(&self) -> f64 {
        awgn_c(self.p1)
    }

    fn c2(&self) -> f64 {
        awgn_c(self.p2)
    }

    fn c_sum(&self) -> f64 {
        cap(self.p1.get() + self.p2.get())
    }

    /// `C(P2 / (P1 + 1))`: user 2 decoded under user 1's interference.
    fn c21(&self) -> f64 {
        cap(self.p2.get() / (self.p1.get() + 1.0))
    }

    fn c12(&self) -> f64 {
        cap(self.p1.get() / (self.p2.get() + 1.0))
    }
}

fn cap(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// Membership in the exact BD region.
pub fn bd_region_contains(params: BdParams, pt: RatePoint4) -> bool {
    let (n1, n2) = (f64::from(params.n1), f64::from(params.n2));
    let t = REGION_TOL;
    pt.nonnegative()
        && pt.r1_solo <= n1 + t
        && pt.r2_solo <= n2 + t
        && pt.r1_solo + pt.r2_joint <= n1 + t
        && pt.r2_solo + pt.r1_joint <= n1 + t
        && pt.monotone()
}

/// Dominant extreme points of the BD region, converted from message rates.
pub fn bd_region_vertices(params: BdParams) -> Vec<RatePoint4> {
    bd_message_vertices(params).into_iter().map(RatePoint4::from_message_rates).collect()
}

/// The six dominant message-rate vertices `(Rp1, Rp2, Rc1, Rc2)`. The third
/// is `(0, 0, n1 - n2, n2)`: `Rc2 = n1` would break `Rp2 + Rc2 <= n2`
/// whenever `n2 < n1`.
pub fn bd_message_vertices(params: BdParams) -> Vec<[f64; 4]> {
    let (n1, n2) = (f64::from(params.n1), f64::from(params.n2));
    let d = n1 - n2;
    vec![
        [n2, n2, d, 0.0],
        [d, 0.0, 0.0, n2],
        [0.0, 0.0, d, n2],
        [n1, n2, 0.0, 0.0],
        [0.0, 0.0, n1, 0.0],
        [0.0, 0.0, 0.0, n2],
    ]
}

/// Whether some convex combination of `generators` dominates `target`
/// coordinatewise. The origin is implicitly a generator.
fn dominated_by_hull(generators: &[[f64; 4]], target: [f64; 4]) -> Result<bool> {
    let n = generators.len();
    let mut lp = LinearProgram::new(n);
    for c in 0..4 {
        lp.add(generators.iter().map(|g| g[c]).collect(), Relation::Ge, target[c] - REGION_TOL);
    }
    lp.add(vec![1.0; n], Relation::Le, 1.0);
    match lp.solve() {
        Ok(_) => Ok(true),
        Err(Error::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Membership in the convex hull of [`bd_region_vertices`] and everything
/// they dominate in message-rate space.
pub fn bd_hull_contains(params: BdParams, pt: RatePoint4) -> Result<bool> {
    if !pt.nonnegative() || !pt.monotone() {
        return Ok(false);
    }
    dominated_by_hull(&bd_message_vertices(params), pt.to_message_rates())
}

/// Membership in the AWGN outer region.
pub fn awgn_outer_contains(pair: AwgnPair, pt: RatePoint4) -> bool {
    let t = REGION_TOL;
    let cs = pair.c_sum();
    pt.nonnegative()
        && pt.r1_solo <= pair.c1() + t
        && pt.r2_solo <= pair.c2() + t
        && pt.r1_solo + pt.r2_joint <= cs + t
        && pt.r2_solo + pt.r1_joint <= cs + t
        && pt.monotone()
}

/// The fourteen vertices of the AWGN outer region.
pub fn awgn_outer_vertices(pair: AwgnPair) -> Vec<RatePoint4> {
    let (c1, c2, c12, c21) = (pair.c1(), pair.c2(), pair.c12(), pair.c21());
    [
        [0.0, 0.0, 0.0, 0.0],
        [c1, 0.0, 0.0, 0.0],
        [0.0, c2, 0.0, 0.0],
        [c1, c2, 0.0, 0.0],
        [c1, 0.0, c1, 0.0],
        [0.0, c2, 0.0, c2],
        [c12, c2, 0.0, c2],
        [c1, c21, 0.0, c21],
        [c1, c21, c1, 0.0],
        [c1, c21, c1, c21],
        [c12, c2, c12, c2],
        [c1, c2, c12, 0.0],
        [c1, c2, 0.0, c21],
        [c1, c2, c12, c21],
    ]
    .into_iter()
    .map(RatePoint4::from_array)
    .collect()
}

/// Common-layer MAC limits `(A1, A2, S)` for a power split. The private
/// layers of both users act as noise: denominator `β1 P1 + β2 P2 + 1`.
pub fn common_layer_caps(pair: AwgnPair, split: SplitParams) -> (f64, f64, f64) {
    let (p1, p2) = (pair.p1.get(), pair.p2.get());
    let den = split.beta1 * p1 + split.beta2 * p2 + 1.0;
    let u1 = (1.0 - split.beta1) * p1;
    let u2 = (1.0 - split.beta2) * p2;
    (cap(u1 / den), cap(u2 / den), cap((u1 + u2) / den))
}

/// Private-layer rates `(C(β1 P1), C(β2 P2))`.
fn private_caps(pair: AwgnPair, split: SplitParams) -> (f64, f64) {
    (cap(split.beta1 * pair.p1.get()), cap(split.beta2 * pair.p2.get()))
}

/// Whether `pt` is dominated by a point of the superposition region for this
/// fixed split.
pub fn superposition_dominates(pair: AwgnPair, split: SplitParams, pt: RatePoint4) -> bool {
    let (a1, a2, s) = common_layer_caps(pair, split);
    let (b1, b2) = private_caps(pair, split);
    // Raise the joint rates only as far as the solo rates demand.
    let q1 = pt.r1_joint.max(pt.r1_solo - b1);
    let q2 = pt.r2_joint.max(pt.r2_solo - b2);
    let t = REGION_TOL;
    q1 <= a1 + t && q2 <= a2 + t && q1 + q2 <= s + t
}

/// Whether `pt` is dominated by a point with a single shared message per
/// user and full decoding at the joint receiver.
fn single_layer_dominates(pair: AwgnPair, pt: RatePoint4) -> bool {
    let t = REGION_TOL;
    pt.r1_solo <= pair.c1() + t && pt.r2_solo <= pair.c2() + t && pt.r1_solo + pt.r2_solo <= pair.c_sum() + t
}

/// Dominant generators of the inner region on a `grid_n x grid_n` β grid:
/// the single-layer corners and, per split, the two corners of the common
/// MAC pentagon lifted by the private rates.
pub fn inner_generators(pair: AwgnPair, grid_n: usize) -> Vec<[f64; 4]> {
    let (c1, c2, c12, c21) = (pair.c1(), pair.c2(), pair.c12(), pair.c21());
    let mut out = vec![[c1, c21, c1, c21], [c12, c2, c12, c2]];
    let steps = grid_n.max(2) - 1;
    for i in 0..=steps {
        for j in 0..=steps {
            let split = SplitParams { beta1: i as f64 / steps as f64, beta2: j as f64 / steps as f64 };
            let (a1, a2, s) = common_layer_caps(pair, split);
            let (b1, b2) = private_caps(pair, split);
            for (x1, x2) in [(a1, s - a1), (s - a2, a2)] {
                let (x1, x2) = (x1.max(0.0), x2.max(0.0));
                out.push([x1 + b1, x2 + b2, x1, x2]);
            }
        }
    }
    out
}

/// Membership in the closure of the inner region, with the superposition
/// part sampled on a β grid. A `false` can be a miss of the grid.
pub fn awgn_inner_contains(pair: AwgnPair, pt: RatePoint4, beta_grid_n: usize) -> Result<bool> {
    if beta_grid_n < 2 {
        return Err(Error::domain("beta grid needs at least 2 points per axis"));
    }
    if !awgn_outer_contains(pair, pt) {
        return Ok(false);
    }
    if single_layer_dominates(pair, pt) {
        return Ok(true);
    }
    let steps = beta_grid_n - 1;
    for i in 0..=steps {
        for j in 0..=steps {
            let split = SplitParams { beta1: i as f64 / steps as f64, beta2: j as f64 / steps as f64 };
            if superposition_dominates(pair, split, pt) {
                return Ok(true);
            }
        }
    }
    dominated_by_hull(&inner_generators(pair, beta_grid_n), pt.to_array())
}

/// Per-vertex distances from the outer vertices to their matched inner points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub distances: Vec<f64>,
    pub max_distance: f64,
}

/// Inner points matched to the outer vertices 12 and 13.
pub fn gap_witnesses(pair: AwgnPair) -> (RatePoint4, RatePoint4) {
    let (p1, p2) = (pair.p1.get(), pair.p2.get());
    let a = cap((p1 - p2) / (2.0 * p2 + 1.0));
    let c2 = pair.c2();
    (RatePoint4::new(c2 + a, c2, a, 0.0), RatePoint4::new(pair.c1(), c2, 0.0, 0.0))
}

pub fn gap_report(pair: AwgnPair) -> Result<GapReport> {
    if pair.p2.get() <= 0.0 {
        return Err(Error::domain("gap check needs P2 > 0"));
    }
    let (r12, r13) = gap_witnesses(pair);
    let distances: Vec<f64> = awgn_outer_vertices(pair)
        .into_iter()
        .enumerate()
        .map(|(i, v)| match i + 1 {
            12 | 14 => v.distance(r12),
            13 => v.distance(r13),
            _ => 0.0,
        })
        .collect();
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    Ok(GapReport { distances, max_distance })
}

/// Largest outer-vertex distance to the inner region witnesses.
pub fn verify_gap(pair: AwgnPair) -> Result<f64> {
    Ok(gap_report(pair)?.max_distance)
}

/// Two-user BD throughput: `2p(1-p)` up to `p = 1/2`, then `p`.
pub fn two_user_bd_throughput(p: Prob) -> f64 {
    let p = p.get();
    if p <= 0.5 {
        2.0 * p * (1.0 - p)
    } else {
        p
    }
}

/// Switch point `1 - C(2P) / (2 C(P))` of the two-user AWGN policy.
pub fn two_user_awgn_threshold(snr: Snr) -> f64 {
    1.0 - awgn_c(snr.scaled(2.0)) / (2.0 * awgn_c(snr))
}

/// Two-user AWGN lower bound and the one-bit bracket above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoUserAwgnThroughput {
    pub lower: f64,
    pub bracket_upper: f64,
}

pub fn two_user_awgn_throughput(p: Prob, snr: Snr) -> TwoUserAwgnThroughput {
    let q = p.get();
    let lower = if q <= two_user_awgn_threshold(snr) {
        2.0 * q * (1.0 - q) * awgn_c(snr)
    } else {
        q * awgn_c(snr.scaled(2.0))
    };
    TwoUserAwgnThroughput { lower, bracket_upper: lower + 1.0 }
}
