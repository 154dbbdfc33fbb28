//! Dense two-phase tableau simplex with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;

use super::{finalize, DenseLP, LPSolution, LpStatus};

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;
const PHASE_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_vars: usize,
    /// Total pivot budget over both phases; `None` means `10 * (vars + rows)`.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_vars: 4096, max_iterations: None }
    }
}

pub fn simplex_solve(lp: &DenseLP) -> LPSolution {
    simplex_solve_with(lp, &SimplexOptions::default())
}

pub fn simplex_solve_with(lp: &DenseLP, opts: &SimplexOptions) -> LPSolution {
    let n = lp.var_count();
    if n == 0 || n > opts.max_vars {
        return LPSolution::failed(LpStatus::NumericalFailure);
    }
    let rows = lp.geq_constraints.len() + 1;
    let budget = opts.max_iterations.unwrap_or(10 * (n + rows));
    let mut t = Tableau::new(lp);
    match t.solve(lp, budget) {
        Ok(x) => finalize(lp, x),
        Err(status) => LPSolution::failed(status),
    }
}

/// Columns: originals `0..n`, one surplus per `>=` row, then artificials.
/// The last entry of every row is the right-hand side.
struct Tableau {
    n: usize,
    width: usize,
    first_artificial: usize,
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    obj: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn new(lp: &DenseLP) -> Self {
        let n = lp.var_count();
        let k = lp.geq_constraints.len();
        // rows with a non-negative rhs after sign normalisation need an artificial,
        // except ones whose surplus can start basic
        let needs_artificial: Vec<bool> = lp.geq_constraints.iter().map(|(_, b)| *b >= 0.0).chain([true]).collect();
        let artificials = needs_artificial.iter().filter(|&&a| a).count();
        let first_artificial = n + k;
        let width = first_artificial + artificials;

        let mut rows = Vec::with_capacity(k + 1);
        let mut basis = Vec::with_capacity(k + 1);
        let mut next_art = first_artificial;
        for (i, (coef, rhs)) in lp.geq_constraints.iter().enumerate() {
            let mut row = vec![0.0; width + 1];
            if *rhs >= 0.0 {
                row[..n].copy_from_slice(coef);
                row[n + i] = -1.0;
                row[next_art] = 1.0;
                row[width] = *rhs;
                basis.push(next_art);
                next_art += 1;
            } else {
                for (dst, c) in row[..n].iter_mut().zip(coef) {
                    *dst = -c;
                }
                row[n + i] = 1.0;
                row[width] = -rhs;
                basis.push(n + i);
            }
            rows.push(row);
        }
        let mut row = vec![0.0; width + 1];
        row[..n].iter_mut().for_each(|v| *v = 1.0);
        row[next_art] = 1.0;
        row[width] = 1.0;
        basis.push(next_art);
        rows.push(row);

        Self { n, width, first_artificial, rows, basis, obj: vec![0.0; width + 1], iterations: 0 }
    }

    /// Loads `costs` (indexed by column) and prices out the current basis.
    fn set_objective(&mut self, costs: &[f64]) {
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        self.obj[..costs.len()].copy_from_slice(costs);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs.get(b).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(&self.rows[r]) {
                    *o -= cb * v;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = core::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland-rule pivots over columns `< allowed` until optimal.
    fn optimize(&mut self, allowed: usize, budget: usize) -> Result<(), LpStatus> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -COST_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = row[self.width] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-14 || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            // bounded feasible region: an unbounded ray means round-off
            let (r, _) = leave.ok_or(LpStatus::NumericalFailure)?;
            if self.iterations >= budget {
                return Err(LpStatus::NumericalFailure);
            }
            self.iterations += 1;
            self.pivot(r, c);
        }
    }

    fn solve(&mut self, lp: &DenseLP, budget: usize) -> Result<Vec<f64>, LpStatus> {
        let mut phase_one = vec![0.0; self.width];
        phase_one[self.first_artificial..].iter_mut().for_each(|v| *v = 1.0);
        self.set_objective(&phase_one);
        self.optimize(self.width, budget)?;
        if -self.obj[self.width] > PHASE_ONE_TOL {
            return Err(LpStatus::Infeasible);
        }

        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.rows[r][j].abs() > 1e-9);
                match col {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        self.set_objective(&lp.costs);
        self.optimize(self.first_artificial, budget)?;

        let mut x = vec![0.0; self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rows[r][self.width];
            }
        }
        Ok(x)
    }
}
