//! Brute-force vertex enumeration: every choice of `dim` tight constraints
//! (rows or coordinate hyperplanes) with a unique feasible solution.

use super::LinearPolytope;
use crate::error::{Error, Result};

/// Largest dimension accepted by [`vertex_enumerate`].
pub const MAX_ENUMERATION_DIM: usize = 12;

const DEDUP_TOL: f64 = 1e-9;
const SINGULAR_EPS: f64 = 1e-12;

/// Rows of the full system `A x <= b`, `-x <= 0`.
fn all_rows(poly: &LinearPolytope) -> Vec<(Vec<f64>, f64)> {
    let n = poly.dim;
    let mut out: Vec<(Vec<f64>, f64)> = poly.rows.iter().map(|h| (h.coeffs.clone(), h.bound)).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        out.push((e, 0.0));
    }
    out
}

/// Solves the square system in place by Gaussian elimination with partial
/// pivoting. `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < SINGULAR_EPS {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All vertices of the polytope, deduplicated to 1e-9 in the max-norm.
pub fn vertex_enumerate(poly: &LinearPolytope) -> Result<Vec<Vec<f64>>> {
    let n = poly.dim;
    if n == 0 || n > MAX_ENUMERATION_DIM {
        return Err(Error::domain(format!("dimension {n} outside [1, {MAX_ENUMERATION_DIM}]")));
    }
    let rows = all_rows(poly);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(mut x) = solve_square(a, b) {
            if poly.max_violation(&x) <= DEDUP_TOL {
                for v in x.iter_mut() {
                    if v.abs() < 1e-15 {
                        *v = 0.0;
                    }
                }
                let dup = out
                    .iter()
                    .any(|y| y.iter().zip(&x).all(|(p, q)| (p - q).abs() <= DEDUP_TOL));
                if !dup {
                    out.push(x);
                }
            }
        }
        if !next_combination(&mut idx, rows.len()) {
            break;
        }
    }
    Ok(out)
}

/// Whether `x` is feasible and its tight constraints have full rank.
pub fn is_vertex(poly: &LinearPolytope, x: &[f64], tol: f64) -> bool {
    if !poly.contains(x, tol) {
        return false;
    }
    let mut tight: Vec<Vec<f64>> = all_rows(poly)
        .into_iter()
        .filter(|(a, b)| (a.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() - b).abs() <= tol)
        .map(|(a, _)| a)
        .collect();
    rank(&mut tight, poly.dim) == poly.dim
}

fn rank(m: &mut [Vec<f64>], cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())) else {
            break;
        };
        if m[piv][c].abs() < 1e-10 {
            continue;
        }
        m.swap(r, piv);
        for i in r + 1..m.len() {
            let f = m[i][c] / m[r][c];
            for k in c..cols {
                m[i][k] -= f * m[r][k];
            }
        }
        r += 1;
    }
    r
}
