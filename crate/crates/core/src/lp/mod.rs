//! Small dense linear programs over the probability simplex.
//!
//! Every program here has the shape
//!
//! ```text
//!   min  c . x
//!   s.t. r_i . x >= b_i    for each row i
//!        sum(x) = 1
//!        x >= 0
//! ```
//!
//! which is what the sampling-probability refinement needs.

mod simplex;
mod vertex;

use alloc::vec::Vec;

use crate::graph::FeedbackGraph;

pub use simplex::{simplex_solve, simplex_solve_with, SimplexOptions};
pub use vertex::{vertex_enumerate_oracle, VERTEX_ORACLE_LIMIT};

/// Feasibility tolerance for optimal solutions.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Negative entries down to this magnitude are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLP {
    pub costs: Vec<f64>,
    /// `(coefficients, rhs)` pairs meaning `coefficients . x >= rhs`.
    pub geq_constraints: Vec<(Vec<f64>, f64)>,
}

impl DenseLP {
    pub fn new(costs: Vec<f64>) -> Self {
        Self { costs, geq_constraints: Vec::new() }
    }

    pub fn with_geq(mut self, coefficients: Vec<f64>, rhs: f64) -> Self {
        self.geq_constraints.push((coefficients, rhs));
        self
    }

    pub fn var_count(&self) -> usize {
        self.costs.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.costs, x)
    }

    /// Largest violation over all constraints, including the simplex ones.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = (x.iter().sum::<f64>() - 1.0).abs();
        for &xi in x {
            worst = worst.max(-xi);
        }
        for (row, rhs) in &self.geq_constraints {
            worst = worst.max(rhs - dot(row, x));
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LPSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
}

impl LPSolution {
    pub(crate) fn failed(status: LpStatus) -> Self {
        Self { x: Vec::new(), objective: f64::INFINITY, status }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks a candidate optimum, clamps tiny negatives and renormalises.
pub(crate) fn finalize(lp: &DenseLP, mut x: Vec<f64>) -> LPSolution {
    if x.iter().any(|&v| !v.is_finite() || v < -CLAMP_TOL) || lp.max_violation(&x) > FEASIBILITY_TOL {
        return LPSolution::failed(LpStatus::NumericalFailure);
    }
    for v in &mut x {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }
    let objective = lp.objective(&x);
    LPSolution { x, objective, status: LpStatus::Optimal }
}

/// Sampling LP: minimise the expected empirical gap subject to every arm
/// `b != best` being observed with probability at least the largest baseline
/// probability among its in-neighbours.
///
/// Rows that can never bind are left out: a zero right-hand side, or an
/// in-neighbourhood covering every arm with right-hand side at most one.
pub fn build_sampling_lp(g: &FeedbackGraph, gaps: &[f64], p_tilde: &[f64], best: usize) -> DenseLP {
    let n = g.node_count();
    let mut lp = DenseLP::new(gaps.to_vec());
    for b in (0..n).filter(|&b| b != best) {
        let mut row = alloc::vec![0.0; n];
        let mut rhs = 0.0f64;
        let mut covered = 0;
        for j in g.in_neighbors(b) {
            row[j] = 1.0;
            rhs = rhs.max(p_tilde[j]);
            covered += 1;
        }
        if rhs <= 0.0 || (covered == n && rhs <= 1.0) {
            continue;
        }
        lp.geq_constraints.push((row, rhs));
    }
    lp
}
