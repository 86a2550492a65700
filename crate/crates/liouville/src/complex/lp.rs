//! Dense two-phase simplex for the small equality-constrained programs used
//! by the intersection tests. Bland's rule, so no cycling; an iteration cap
//! guards against numerical stalls.

use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal {
        objective: f64,
        solution: DVector<f64>,
    },
    Infeasible,
    Unbounded,
    Stalled,
}

/// Maximize `c . x` subject to `a x = b`, `x >= 0`.
pub fn maximize(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> LpResult {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m, "constraint count mismatch");
    assert_eq!(c.len(), n, "objective length mismatch");

    // Tableau layout: n original columns, m artificial columns, rhs.
    let mut tableau = DMatrix::zeros(m, n + m + 1);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tableau[(i, j)] = flip * a[(i, j)];
        }
        tableau[(i, n + i)] = 1.0;
        tableau[(i, n + m)] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize minus the artificial sum; feasible iff it reaches 0.
    let mut objective = DVector::zeros(n + m);
    for j in n..n + m {
        objective[j] = -1.0;
    }
    reduce_objective(&mut objective, &tableau, &basis);
    match run_simplex(&mut tableau, &mut basis, &mut objective, n + m) {
        Phase::Done => {}
        Phase::Unbounded => unreachable!("phase 1 objective is bounded above by 0"),
        Phase::Stalled => return LpResult::Stalled,
    }
    let artificial_mass: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &col)| col >= n)
        .map(|(row, _)| tableau[(row, n + m)])
        .sum();
    if artificial_mass > EPS {
        return LpResult::Infeasible;
    }

    // Drive remaining zero-value artificials out of the basis; a row with no
    // usable original column is redundant and gets dropped.
    let mut row = 0;
    while row < basis.len() {
        if basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| tableau[(row, j)].abs() > EPS) {
                pivot(&mut tableau, &mut basis, row, col);
            } else {
                tableau = tableau.remove_row(row);
                basis.remove(row);
                continue;
            }
        }
        row += 1;
    }

    // Phase 2: real objective, artificial columns excluded from pricing.
    let rhs_col = tableau.ncols() - 1;
    let mut objective = DVector::zeros(rhs_col);
    for j in 0..n {
        objective[j] = c[j];
    }
    reduce_objective(&mut objective, &tableau, &basis);
    match run_simplex(&mut tableau, &mut basis, &mut objective, n) {
        Phase::Done => {}
        Phase::Unbounded => return LpResult::Unbounded,
        Phase::Stalled => return LpResult::Stalled,
    }

    let mut solution = DVector::zeros(n);
    for (row, &col) in basis.iter().enumerate() {
        if col < n {
            solution[col] = tableau[(row, rhs_col)];
        }
    }
    LpResult::Optimal {
        objective: c.dot(&solution),
        solution,
    }
}

enum Phase {
    Done,
    Unbounded,
    Stalled,
}

/// Zero the reduced costs of the basic columns by row elimination.
fn reduce_objective(objective: &mut DVector<f64>, tableau: &DMatrix<f64>, basis: &[usize]) {
    for (row, &col) in basis.iter().enumerate() {
        let coeff = objective[col];
        if coeff != 0.0 {
            for j in 0..objective.len() {
                objective[j] -= coeff * tableau[(row, j)];
            }
        }
    }
}

/// Bland's rule simplex loop. Only columns below `price_limit` may enter,
/// which keeps artificials out of a phase-2 basis.
fn run_simplex(
    tableau: &mut DMatrix<f64>,
    basis: &mut Vec<usize>,
    objective: &mut DVector<f64>,
    price_limit: usize,
) -> Phase {
    let rhs_col = tableau.ncols() - 1;
    for _ in 0..MAX_ITERATIONS {
        let Some(entering) = (0..price_limit).find(|&j| objective[j] > EPS) else {
            return Phase::Done;
        };
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..tableau.nrows() {
            let coeff = tableau[(i, entering)];
            if coeff > EPS {
                let ratio = tableau[(i, rhs_col)] / coeff;
                let better = match leaving {
                    None => true,
                    // Bland tie-break: smallest basis index leaves.
                    Some((best, r)) => {
                        ratio < r - EPS || (ratio < r + EPS && basis[i] < basis[best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((leave_row, _)) = leaving else {
            return Phase::Unbounded;
        };
        pivot(tableau, basis, leave_row, entering);
        let coeff = objective[entering];
        if coeff != 0.0 {
            for j in 0..objective.len() {
                objective[j] -= coeff * tableau[(leave_row, j)];
            }
        }
    }
    Phase::Stalled
}

fn pivot(tableau: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let scale = tableau[(row, col)];
    for j in 0..tableau.ncols() {
        tableau[(row, j)] /= scale;
    }
    for i in 0..tableau.nrows() {
        if i != row {
            let coeff = tableau[(i, col)];
            if coeff != 0.0 {
                for j in 0..tableau.ncols() {
                    tableau[(i, j)] -= coeff * tableau[(row, j)];
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use nalgebra::{dmatrix, dvector};

    use super::*;

    #[test]
    fn solves_a_small_program() {
        // x + y = 4, x - y = 2 has the unique feasible point (3, 1).
        let a = dmatrix![1.0, 1.0; 1.0, -1.0];
        let b = dvector![4.0, 2.0];
        let c = dvector![2.0, 3.0];
        match maximize(&a, &b, &c) {
            LpResult::Optimal {
                objective,
                solution,
            } => {
                assert!((objective - 9.0).abs() < 1e-9);
                assert!((solution[0] - 3.0).abs() < 1e-9);
                assert!((solution[1] - 1.0).abs() < 1e-9);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        let a = dmatrix![1.0, 1.0];
        let b = dvector![-1.0];
        let c = dvector![1.0, 0.0];
        assert_eq!(maximize(&a, &b, &c), LpResult::Infeasible);
    }

    #[test]
    fn drops_redundant_rows() {
        // Second constraint is twice the first.
        let a = dmatrix![1.0, 1.0; 2.0, 2.0];
        let b = dvector![2.0, 4.0];
        let c = dvector![1.0, 0.0];
        match maximize(&a, &b, &c) {
            LpResult::Optimal { objective, .. } => assert!((objective - 2.0).abs() < 1e-9),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn detects_unbounded_programs() {
        // x - y = 0 lets both grow without limit.
        let a = dmatrix![1.0, -1.0];
        let b = dvector![0.0];
        let c = dvector![1.0, 0.0];
        assert_eq!(maximize(&a, &b, &c), LpResult::Unbounded);
    }

    #[test]
    fn maximizes_over_a_simplex() {
        // Barycentric weights on three vertices, maximize the third.
        let a = dmatrix![1.0, 1.0, 1.0];
        let b = dvector![1.0];
        let c = dvector![0.0, 0.0, 1.0];
        match maximize(&a, &b, &c) {
            LpResult::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-9),
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}
