//! Brute-force LP oracle: enumerate every basic solution.

use alloc::vec;
use alloc::vec::Vec;

use super::{finalize, DenseLP, LPSolution, LpStatus, FEASIBILITY_TOL};

pub const VERTEX_ORACLE_LIMIT: usize = 6;

/// Exact optimum by trying every choice of `n - 1` tight constraints (rows or
/// variable bounds) next to `sum(x) = 1`. Returns `None` above
/// [`VERTEX_ORACLE_LIMIT`] variables.
pub fn vertex_enumerate_oracle(lp: &DenseLP) -> Option<LPSolution> {
    let n = lp.var_count();
    if n == 0 || n > VERTEX_ORACLE_LIMIT {
        return None;
    }
    // candidate tight constraints: the rows, then x_j = 0
    let mut pool: Vec<(Vec<f64>, f64)> = lp.geq_constraints.clone();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        pool.push((e, 0.0));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut chosen = Vec::with_capacity(n - 1);
    for_each_subset(pool.len(), n - 1, 0, &mut chosen, &mut |subset| {
        let mut a: Vec<Vec<f64>> = vec![vec![1.0; n]];
        let mut b = vec![1.0];
        for &i in subset {
            a.push(pool[i].0.clone());
            b.push(pool[i].1);
        }
        let Some(x) = solve_square(a, b) else { return };
        if lp.max_violation(&x) > FEASIBILITY_TOL {
            return;
        }
        let obj = lp.objective(&x);
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    });

    Some(match best {
        Some((_, x)) => finalize(lp, x),
        None => LPSolution::failed(LpStatus::Infeasible),
    })
}

fn for_each_subset(total: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in start..total {
        if total - i < k - chosen.len() {
            break;
        }
        chosen.push(i);
        for_each_subset(total, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (i, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (v, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * p;
                }
                b[col + 1 + i] -= f * b[col];
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
