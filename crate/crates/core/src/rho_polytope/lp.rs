//! Dense two-phase simplex with Bland's rule.
//!
//! Sized for the small programs in this crate: at most a few dozen rows,
//! and either a few dozen columns or a handful of rows over tens of
//! thousands of columns (convex-hull membership). Every variable is
//! nonnegative.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximize `objective · x` subject to `constraints` and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { objective: vec![0.0; n_vars], constraints: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_objective(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.n_vars());
        self.objective = objective;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars());
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    /// Row-major `rows x (cols + 1)`; the last column is the right-hand side.
    cells: Vec<f64>,
    rows: usize,
    cols: usize,
    n_vars: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.n_vars();
        let rows = lp.constraints.len();
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();
        let n_slack = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
        let n_art = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let cols = n + n_slack + n_art;
        let width = cols + 1;
        let mut cells = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let (mut slack, mut art) = (n, n + n_slack);
        for (i, (coeffs, rel, rhs)) in normalized.iter().enumerate() {
            let row = &mut cells[i * width..(i + 1) * width];
            row[..n].copy_from_slice(coeffs);
            row[cols] = *rhs;
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau { cells, rows, cols, n_vars: n, first_artificial: n + n_slack, basis }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let width = self.cols + 1;
        let inv = 1.0 / self.at(pr, pc);
        for v in &mut self.cells[pr * width..(pr + 1) * width] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.cells[pr * width..(pr + 1) * width].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.at(r, pc);
            if factor != 0.0 {
                let row = &mut self.cells[r * width..(r + 1) * width];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations maximizing `cost · columns`. Columns for
    /// which `allowed` is false never enter the basis.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index column with positive reduced cost.
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for r in 0..self.rows {
                    let a = self.at(r, j);
                    if a != 0.0 {
                        reduced -= cost[self.basis[r]] * a;
                    }
                }
                if reduced > PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-14
                                || ((ratio - lratio).abs() <= 1e-14 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leaving else {
                return Err(Error::Unbounded);
            };
            self.pivot(pr, pc);
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }

    fn solve(mut self, objective: &[f64]) -> Result<LpSolution> {
        let first_art = self.first_artificial;
        if first_art < self.cols {
            let phase1: Vec<f64> = (0..self.cols).map(|j| if j >= first_art { -1.0 } else { 0.0 }).collect();
            self.optimize(&phase1, |_| true)?;
            let infeasibility: f64 = (0..self.rows)
                .filter(|&r| self.basis[r] >= first_art)
                .map(|r| self.rhs(r))
                .sum();
            if infeasibility > FEASIBILITY_EPS {
                return Err(Error::Infeasible);
            }
            // Drive zero-valued artificials out of the basis where possible.
            for r in 0..self.rows {
                if self.basis[r] >= first_art {
                    if let Some(c) = (0..first_art).find(|&c| self.at(r, c).abs() > PIVOT_EPS) {
                        self.pivot(r, c);
                    }
                }
            }
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n_vars].copy_from_slice(objective);
        self.optimize(&cost, |j| j < first_art)?;
        let mut x = vec![0.0; self.n_vars];
        for r in 0..self.rows {
            if self.basis[r] < self.n_vars {
                x[self.basis[r]] = self.rhs(r).max(0.0);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { value, x })
    }
}
