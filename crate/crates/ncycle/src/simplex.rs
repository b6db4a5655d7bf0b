//! Dense phase-1 simplex for equality-constrained feasibility problems
//! `A w = b, w >= 0`.
//!
//! Built for the small dense systems produced by local-polytope membership:
//! a few dozen rows, up to ~10^6 columns at the guard limit. Bland's rule is
//! used throughout, so the method cannot cycle; an iteration cap turns any
//! residual numerical trouble into an explicit inconclusive outcome instead
//! of a wrong verdict.

use crate::error::{Error, Result};
use crate::tolerance;

/// Outcome of a feasibility solve.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// A basic feasible point, with the residual max |A w - b|.
    Feasible { weights: Vec<f64>, residual: f64 },
    /// Phase-1 optimum stayed away from zero.
    Infeasible { phase1_objective: f64 },
}

/// Searches for `w >= 0` with `A w = b` (all rows equalities).
///
/// Feasibility is declared when the phase-1 artificial objective drops below
/// `feas_tol`; an [`Error::LpInconclusive`] is returned if the iteration cap
/// is hit first.
pub fn lp_feasibility(a: &[Vec<f64>], b: &[f64], feas_tol: f64) -> Result<LpOutcome> {
    let m = a.len();
    if m == 0 || m != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} constraint rows, {} right-hand sides",
            m,
            b.len()
        )));
    }
    let nvars = a[0].len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != nvars {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                i,
                row.len(),
                nvars
            )));
        }
    }

    let ncols = nvars + m; // structural variables then one artificial per row
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols];
        for j in 0..nvars {
            row[j] = flip * a[i][j];
        }
        row[nvars + i] = 1.0;
        rhs[i] = flip * b[i];
        basis[i] = nvars + i;
        tab.push(row);
    }

    // Reduced costs of minimizing the artificial sum with the artificial basis.
    let mut reduced = vec![0.0; ncols];
    for j in 0..nvars {
        reduced[j] = -tab.iter().map(|row| row[j]).sum::<f64>();
    }

    let pivot_tol = tolerance::LP_PIVOT;
    let max_iter = 50 * (m + ncols);
    for _ in 0..max_iter {
        // Bland: smallest-index improving column.
        let Some(entering) = (0..ncols).find(|&j| reduced[j] < -pivot_tol) else {
            return Ok(finish(&tab, &rhs, &basis, a, b, nvars, feas_tol));
        };

        // Ratio test; ties broken by smallest basic variable index (Bland).
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = tab[i][entering];
            if coef > pivot_tol {
                let ratio = rhs[i] / coef;
                match leaving {
                    None => leaving = Some((i, ratio)),
                    Some((best_i, best_r)) => {
                        if ratio < best_r - 1e-15
                            || ((ratio - best_r).abs() <= 1e-15
                                && basis[i] < basis[best_i])
                        {
                            leaving = Some((i, ratio));
                        }
                    }
                }
            }
        }
        // The phase-1 objective is bounded below by zero, so an unbounded ray
        // can only be a numerical artifact.
        let Some((pivot_row, _)) = leaving else {
            return Err(Error::LpInconclusive { iterations: max_iter });
        };

        let pivot = tab[pivot_row][entering];
        for x in tab[pivot_row].iter_mut() {
            *x /= pivot;
        }
        rhs[pivot_row] /= pivot;
        for i in 0..m {
            if i == pivot_row {
                continue;
            }
            let factor = tab[i][entering];
            if factor != 0.0 {
                let (head, tail) = if i < pivot_row {
                    let (h, t) = tab.split_at_mut(pivot_row);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = tab.split_at_mut(i);
                    (&mut t[0], &h[pivot_row])
                };
                for (x, &p) in head.iter_mut().zip(tail.iter()) {
                    *x -= factor * p;
                }
                rhs[i] -= factor * rhs[pivot_row];
                if rhs[i] < 0.0 && rhs[i] > -1e-13 {
                    rhs[i] = 0.0;
                }
            }
        }
        let factor = reduced[entering];
        for (r, &p) in reduced.iter_mut().zip(&tab[pivot_row]) {
            *r -= factor * p;
        }
        basis[pivot_row] = entering;
    }
    Err(Error::LpInconclusive { iterations: max_iter })
}

fn finish(
    tab: &[Vec<f64>],
    rhs: &[f64],
    basis: &[usize],
    a: &[Vec<f64>],
    b: &[f64],
    nvars: usize,
    feas_tol: f64,
) -> LpOutcome {
    let _ = tab;
    let phase1: f64 = basis
        .iter()
        .zip(rhs)
        .filter(|(&v, _)| v >= nvars)
        .map(|(_, &x)| x)
        .sum();
    if phase1 >= feas_tol {
        return LpOutcome::Infeasible {
            phase1_objective: phase1,
        };
    }
    let mut weights = vec![0.0; nvars];
    for (i, &v) in basis.iter().enumerate() {
        if v < nvars {
            weights[v] = rhs[i].max(0.0);
        }
    }
    let mut residual: f64 = 0.0;
    for (row, &target) in a.iter().zip(b) {
        let lhs: f64 = row.iter().zip(&weights).map(|(c, w)| c * w).sum();
        residual = residual.max((lhs - target).abs());
    }
    LpOutcome::Feasible { weights, residual }
}
