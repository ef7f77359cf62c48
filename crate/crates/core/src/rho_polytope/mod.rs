//! Expected-sum-rate regions in ρ-space and x-space.
//!
//! `ρ_k` is the total rate delivered over all active sets of size `k`. With
//! `y_k = ρ_k / (k C(m,k))` the symmetric regions read: `y` nonincreasing and
//! nonnegative, plus one budget row per `K`. The change of variables
//! `x_k = y_k - y_{k+1}` (with `y_{m+1} = 0`) turns the chain into `x >= 0`,
//! and a budget `Σ_{k<=K} y_k <= c_K` into `Σ_j min(j, K) x_j <= c_K`.
//! All optimization happens in x-space.

pub mod lp;
mod vertices;

use serde::Serialize;

use crate::channel::Snr;
use crate::error::{Error, Result};
use crate::numerics::{awgn_c, ln_choose};

pub use lp::{LinearProgram, LpSolution, Relation};
pub use vertices::{is_vertex, vertex_enumerate, MAX_ENUMERATION_DIM};

/// Largest dimension accepted by [`lp_maximize`].
pub const MAX_LP_DIM: usize = 64;

/// Per-cardinality aggregate rates `ρ_1..ρ_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoVector(pub Vec<f64>);

/// Coordinates after the change of variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XVector(pub Vec<f64>);

impl RhoVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Normalized rates `y_k = ρ_k / (k C(m,k))`.
    pub fn normalized(&self) -> Vec<f64> {
        let m = self.dim() as u64;
        self.0.iter().enumerate().map(|(i, r)| r / scale(m, i as u64 + 1)).collect()
    }

    /// Whether the normalized rates form a nonincreasing nonnegative chain.
    pub fn satisfies_chain(&self, tol: f64) -> bool {
        let y = self.normalized();
        y.windows(2).all(|w| w[0] >= w[1] - tol) && y.last().map_or(true, |&v| v >= -tol)
    }
}

impl XVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `k C(m, k)`.
fn scale(m: u64, k: u64) -> f64 {
    k as f64 * ln_choose(m, k).exp()
}

pub fn rho_to_x(rho: &RhoVector) -> XVector {
    let y = rho.normalized();
    let m = y.len();
    XVector((0..m).map(|k| y[k] - y.get(k + 1).copied().unwrap_or(0.0)).collect())
}

pub fn x_to_rho(x: &XVector) -> RhoVector {
    let m = x.dim();
    let mut y = vec![0.0; m];
    let mut acc = 0.0;
    for k in (0..m).rev() {
        acc += x.0[k];
        y[k] = acc;
    }
    RhoVector(y.iter().enumerate().map(|(i, v)| v * scale(m as u64, i as u64 + 1)).collect())
}

/// One row `coeffs · x <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

/// `{x >= 0 : A x <= b}`. Nonnegativity is implicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearPolytope {
    pub dim: usize,
    pub rows: Vec<Halfspace>,
}

impl LinearPolytope {
    pub fn new(dim: usize) -> Self {
        LinearPolytope { dim, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, bound: f64) {
        assert_eq!(coeffs.len(), self.dim);
        self.rows.push(Halfspace { coeffs, bound });
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim
            && x.iter().all(|&v| v >= -tol)
            && self
                .rows
                .iter()
                .all(|h| h.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= h.bound + tol)
    }

    /// Largest violation over all rows including nonnegativity.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let neg = x.iter().map(|&v| -v).fold(0.0f64, f64::max);
        self.rows
            .iter()
            .map(|h| h.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - h.bound)
            .fold(neg, f64::max)
    }
}

/// Budget rows `Σ_j min(j, K) x_j <= caps[K-1]` for `K = 1..m`.
pub fn polytope_with_caps(caps: &[f64]) -> LinearPolytope {
    let m = caps.len();
    let mut poly = LinearPolytope::new(m);
    for (kk, &cap) in caps.iter().enumerate() {
        let big_k = kk + 1;
        poly.push((1..=m).map(|j| j.min(big_k) as f64).collect(), cap);
    }
    poly
}

/// BD region in x-space: the simplex `Σ k x_k <= 1`.
pub fn bd_polytope(m: usize) -> LinearPolytope {
    let mut poly = LinearPolytope::new(m);
    poly.push((1..=m).map(|k| k as f64).collect(), 1.0);
    poly
}

/// AWGN outer region in x-space, caps `c_K = C(K P)`.
pub fn awgn_polytope(m: usize, snr: Snr) -> LinearPolytope {
    let caps: Vec<f64> = (1..=m).map(|k| awgn_c(snr.scaled(k as f64))).collect();
    polytope_with_caps(&caps)
}

/// AWGN inner region in x-space: `Σ_j j / C(jP) x_j <= 1`, the image of the
/// single-message achievable region.
pub fn awgn_inner_polytope(m: usize, snr: Snr) -> LinearPolytope {
    let mut poly = LinearPolytope::new(m);
    poly.push((1..=m).map(|j| j as f64 / awgn_c(snr.scaled(j as f64))).collect(), 1.0);
    poly
}

/// BD region written directly in ρ-space: the normalized chain
/// `y_k - y_{k+1} >= 0` and the budget `Σ y_k <= 1`.
pub fn bd_rho_polytope(m: usize) -> LinearPolytope {
    let mu = m as u64;
    let inv: Vec<f64> = (1..=mu).map(|k| 1.0 / scale(mu, k)).collect();
    let mut poly = LinearPolytope::new(m);
    for k in 0..m.saturating_sub(1) {
        let mut row = vec![0.0; m];
        row[k] = -inv[k];
        row[k + 1] = inv[k + 1];
        poly.push(row, 0.0);
    }
    poly.push(inv, 1.0);
    poly
}

/// Extreme points of the BD ρ-region: the origin and
/// `ρ^(k) = (1/k) Σ_{i<=k} i C(m,i) e_i` for `k = 1..m`.
pub fn bd_rho_vertices(m: usize) -> Vec<RhoVector> {
    let mu = m as u64;
    let mut out = vec![RhoVector(vec![0.0; m])];
    for k in 1..=m {
        let v = (1..=m)
            .map(|i| if i <= k { scale(mu, i as u64) / k as f64 } else { 0.0 })
            .collect();
        out.push(RhoVector(v));
    }
    out
}

/// Maximizes `objective · x` over the polytope.
pub fn lp_maximize(poly: &LinearPolytope, objective: &[f64]) -> Result<LpSolution> {
    if poly.dim > MAX_LP_DIM {
        return Err(Error::domain(format!("dimension {} exceeds {MAX_LP_DIM}", poly.dim)));
    }
    if objective.len() != poly.dim {
        return Err(Error::domain("objective length does not match polytope dimension"));
    }
    let mut lp = LinearProgram::new(poly.dim).with_objective(objective.to_vec());
    for h in &poly.rows {
        lp.add(h.coeffs.clone(), Relation::Le, h.bound);
    }
    lp.solve()
}

/// Caps `C(kP)` for `k = 0..=m` (index 0 is 0).
fn awgn_caps(m: usize, snr: Snr) -> Vec<f64> {
    (0..=m).map(|k| awgn_c(snr.scaled(k as f64))).collect()
}

/// Candidate upper-bound vertex as printed in the closed-form theorem,
/// with diagnostics against the actual polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticVertex {
    pub k: usize,
    pub x: XVector,
    /// Satisfies every row of [`awgn_polytope`] within 1e-9.
    pub feasible: bool,
    /// Feasible and the active rows have full rank.
    pub is_vertex: bool,
}

/// Evaluates the printed coefficient matrix `v_{k,i}` row by row. Row `k = 1`
/// carries the printed coefficients `2C(2P) - C(P)` and
/// `2C(iP) - C((i+1)P) - 2C((i-1)P)`; for `i = m` the `i = m` case wins.
/// Candidates are only flagged, never repaired.
pub fn awgn_analytic_vertices(m: usize, snr: Snr) -> Vec<AnalyticVertex> {
    let c = awgn_caps(m, snr);
    let poly = awgn_polytope(m, snr);
    let mut rows = Vec::with_capacity(m);
    for k in 1..=m {
        let mut x = vec![0.0; m];
        for i in 1..=m {
            x[i - 1] = if k == m {
                if i == m { c[m] / m as f64 } else { 0.0 }
            } else if k == 1 {
                if i == m {
                    c[m] - c[m - 1]
                } else if i == 1 {
                    2.0 * c[2] - c[1]
                } else {
                    2.0 * c[i] - c[i + 1] - 2.0 * c[i - 1]
                }
            } else {
                printed_generic(&c, m, k, i)
            };
        }
        let feasible = poly.contains(&x, 1e-9);
        let vertex = feasible && is_vertex(&poly, &x, 1e-9);
        rows.push(AnalyticVertex { k, x: XVector(x), feasible, is_vertex: vertex });
    }
    rows
}

fn printed_generic(c: &[f64], m: usize, k: usize, i: usize) -> f64 {
    if i < k {
        0.0
    } else if i == k {
        (k + 1) as f64 / k as f64 * c[k] - c[k + 1]
    } else if i < m {
        2.0 * c[i] - c[i + 1] - c[i - 1]
    } else {
        c[m] - c[m - 1]
    }
}

/// Self-consistent vertex family: for `k < m`, `y_1..y_k = c_k / k` and
/// `y_j = c_j - c_{j-1}` for `j > k`; for `k = m`, `y ≡ c_m / m`. Row `k`
/// binds the budgets `K = k..m`.
pub fn awgn_vertex_family(m: usize, snr: Snr) -> Vec<XVector> {
    let c = awgn_caps(m, snr);
    (1..=m)
        .map(|k| {
            XVector(
                (1..=m)
                    .map(|i| if k == m { if i == m { c[m] / m as f64 } else { 0.0 } } else { printed_generic(&c, m, k, i) })
                    .collect(),
            )
        })
        .collect()
}
