//! Dense two-phase tableau simplex for small linear programs.
//!
//! Minimizes `c·x` subject to `x ≥ 0` and rows `a·x {≤,≥,=} b`. Pivoting
//! follows the most negative reduced cost and falls back to Bland's rule on
//! long degenerate runs, so it terminates.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;
const DEGENERATE_STREAK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

type Row = (Vec<(usize, f64)>, Relation, f64);

struct Tableau {
    width: usize,
    rows: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may not enter the basis.
    banned: Vec<bool>,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(r, c);
        for v in &mut self.rows[r * w..(r + 1) * w] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.rows[r * w..(r + 1) * w].to_vec();
        let eliminate = |i: usize, row: &mut [f64]| {
            if i == r {
                return;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[c] = 0.0;
            }
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.rows.par_chunks_mut(w).enumerate().for_each(|(i, row)| eliminate(i, row));
        }
        #[cfg(not(feature = "parallel"))]
        for (i, row) in self.rows.chunks_mut(w).enumerate() {
            eliminate(i, row);
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Run pivots until optimal. `Err(LpUnbounded)` on an unbounded ray.
    fn optimize(&mut self) -> Result<()> {
        let mut streak = 0usize;
        loop {
            if self.pivots >= self.max_pivots {
                return Err(Error::LpIterationLimit(self.pivots));
            }
            let cols = self.width - 1;
            let entering = if streak >= DEGENERATE_STREAK {
                (0..cols).find(|&j| !self.banned[j] && self.obj[j] < -PIVOT_TOL)
            } else {
                let mut best = None;
                let mut best_val = -PIVOT_TOL;
                for j in 0..cols {
                    if !self.banned[j] && self.obj[j] < best_val {
                        best_val = self.obj[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m() {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::LpUnbounded);
            };
            streak = if ratio.abs() <= 1e-12 { streak + 1 } else { 0 };
            self.pivot(r, c);
        }
    }
}

impl LinearProgram {
    pub fn minimize(&self) -> Result<LpSolution> {
        let nv = self.num_vars;
        let m = self.constraints.len();
        // normalize to b ≥ 0
        let rows: Vec<Row> = self
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|&(j, a)| (j, -a)).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.rel, c.rhs)
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let art_start = nv + n_slack;
        let width = art_start + n_art + 1;
        let mut tab = Tableau {
            width,
            rows: vec![0.0; m * width],
            obj: vec![0.0; width],
            basis: vec![0; m],
            banned: vec![false; width - 1],
            pivots: 0,
            max_pivots: 50 * (m + width),
        };
        let (mut s, mut a) = (nv, art_start);
        for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            let base = i * width;
            for &(j, v) in coeffs {
                tab.rows[base + j] += v;
            }
            tab.rows[base + width - 1] = *rhs;
            match rel {
                Relation::Le => {
                    tab.rows[base + s] = 1.0;
                    tab.basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    tab.rows[base + s] = -1.0;
                    s += 1;
                    tab.rows[base + a] = 1.0;
                    tab.basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    tab.rows[base + a] = 1.0;
                    tab.basis[i] = a;
                    a += 1;
                }
            }
        }

        if n_art > 0 {
            // phase 1: minimize the sum of artificials
            for i in 0..m {
                if tab.basis[i] >= art_start {
                    for j in 0..width {
                        if j < art_start || j == width - 1 {
                            tab.obj[j] -= tab.rows[i * width + j];
                        }
                    }
                }
            }
            tab.optimize()?;
            if -tab.obj[width - 1] > FEAS_TOL {
                return Err(Error::LpInfeasible);
            }
            for i in 0..m {
                if tab.basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| tab.at(i, j).abs() > 1e-9) {
                        tab.pivot(i, j);
                    }
                }
            }
            for j in art_start..width - 1 {
                tab.banned[j] = true;
            }
        }

        // phase 2
        tab.obj.iter_mut().for_each(|v| *v = 0.0);
        tab.obj[..nv].copy_from_slice(&self.objective);
        for i in 0..m {
            let cb = if tab.basis[i] < nv { self.objective[tab.basis[i]] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..width {
                    tab.obj[j] -= cb * tab.rows[i * width + j];
                }
            }
        }
        tab.optimize()?;
        let mut x = vec![0.0; nv];
        for i in 0..m {
            if tab.basis[i] < nv {
                x[tab.basis[i]] = tab.rhs(i);
            }
        }
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { objective, x, pivots: tab.pivots })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[(usize, f64)], rel: Relation, rhs: f64) -> Constraint {
        Constraint { coeffs: coeffs.to_vec(), rel, rhs }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  ->  36 at (2, 6)
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-3.0, -5.0],
            constraints: vec![
                row(&[(0, 1.0)], Relation::Le, 4.0),
                row(&[(1, 2.0)], Relation::Le, 12.0),
                row(&[(0, 3.0), (1, 2.0)], Relation::Le, 18.0),
            ],
        };
        let sol = lp.minimize().unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y, x + y ≥ 2, x − y = 1  ->  2 at (1.5, 0.5)
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![1.0, 1.0],
            constraints: vec![
                row(&[(0, 1.0), (1, 1.0)], Relation::Ge, 2.0),
                row(&[(0, 1.0), (1, -1.0)], Relation::Eq, 1.0),
            ],
        };
        let sol = lp.minimize().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            num_vars: 1,
            objective: vec![1.0],
            constraints: vec![row(&[(0, 1.0)], Relation::Le, 1.0), row(&[(0, 1.0)], Relation::Ge, 2.0)],
        };
        assert_eq!(infeasible.minimize(), Err(Error::LpInfeasible));
        let unbounded = LinearProgram {
            num_vars: 1,
            objective: vec![-1.0],
            constraints: vec![row(&[(0, 1.0)], Relation::Ge, 1.0)],
        };
        assert_eq!(unbounded.minimize(), Err(Error::LpUnbounded));
    }
}
