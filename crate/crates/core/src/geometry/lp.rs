//! Small dense linear programs backing the geometry module: Chebyshev
//! centers, convex-hull membership, and recession-cone detection. All
//! instances are desk scale (tens of rows), so a simplex-method solver is
//! plenty.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use nalgebra::{DMatrix, DVector};

use super::{GeometryError, Result};

fn solve_failure(e: minilp::Error) -> GeometryError {
    match e {
        minilp::Error::Unbounded => GeometryError::Unbounded,
        minilp::Error::Infeasible => GeometryError::EmptyInterior,
    }
}

/// Largest inscribed ball of `{x : a x <= b}` (rows unit-norm):
/// maximize r subject to a_i . x + r <= b_i, r >= 0.
pub(crate) fn chebyshev(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<Variable> = (0..n)
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let r = problem.add_var(1.0, (0.0, f64::INFINITY));
    for i in 0..m {
        let mut terms: Vec<(Variable, f64)> =
            (0..n).map(|j| (xs[j], a[(i, j)])).collect();
        terms.push((r, 1.0));
        problem.add_constraint(&terms, ComparisonOp::Le, b[i]);
    }
    let solution = problem.solve().map_err(solve_failure)?;
    let center = DVector::from_fn(n, |j, _| solution[xs[j]]);
    Ok((center, solution[r]))
}

/// Max-norm distance from `x` to the convex hull of `points`: minimize s
/// subject to sum(lambda) = 1, lambda >= 0, |V lambda - x|_inf <= s.
/// Zero (up to solver tolerance) means `x` lies in the hull.
pub(crate) fn hull_distance(points: &[DVector<f64>], x: &DVector<f64>) -> Result<f64> {
    let k = points.len();
    let n = x.len();
    if k == 0 {
        return Err(GeometryError::InvalidBody("hull of no points".into()));
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let lambdas: Vec<Variable> = (0..k)
        .map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let s = problem.add_var(1.0, (0.0, f64::INFINITY));
    let ones: Vec<(Variable, f64)> = lambdas.iter().map(|&l| (l, 1.0)).collect();
    problem.add_constraint(&ones, ComparisonOp::Eq, 1.0);
    for coord in 0..n {
        // V lambda - x <= s  and  x - V lambda <= s
        let mut up: Vec<(Variable, f64)> = (0..k)
            .map(|j| (lambdas[j], points[j][coord]))
            .collect();
        up.push((s, -1.0));
        problem.add_constraint(&up, ComparisonOp::Le, x[coord]);
        let mut down: Vec<(Variable, f64)> = (0..k)
            .map(|j| (lambdas[j], -points[j][coord]))
            .collect();
        down.push((s, -1.0));
        problem.add_constraint(&down, ComparisonOp::Le, -x[coord]);
    }
    let solution = problem.solve().map_err(solve_failure)?;
    Ok(solution[s].max(0.0))
}

/// True when `{d : a d <= 0}` contains a nonzero direction, i.e. the
/// polytope with this constraint matrix is unbounded. Checked by maximizing
/// each signed coordinate of `d` over the recession cone intersected with
/// the unit box.
pub(crate) fn has_recession_direction(a: &DMatrix<f64>) -> Result<bool> {
    let (m, n) = (a.nrows(), a.ncols());
    for coord in 0..n {
        for sign in [1.0, -1.0] {
            let mut problem = Problem::new(OptimizationDirection::Maximize);
            let ds: Vec<Variable> = (0..n)
                .map(|j| {
                    let obj = if j == coord { sign } else { 0.0 };
                    problem.add_var(obj, (-1.0, 1.0))
                })
                .collect();
            for i in 0..m {
                let terms: Vec<(Variable, f64)> =
                    (0..n).map(|j| (ds[j], a[(i, j)])).collect();
                problem.add_constraint(&terms, ComparisonOp::Le, 0.0);
            }
            let solution = problem
                .solve()
                .map_err(|e| GeometryError::Lp(format!("recession probe: {e}")))?;
            if solution.objective() > 1e-7 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_distance_detects_membership() {
        let pts = vec![
            DVector::from_column_slice(&[0.0, 0.0]),
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        ];
        let inside = DVector::from_column_slice(&[0.2, 0.2]);
        let outside = DVector::from_column_slice(&[0.8, 0.8]);
        assert!(hull_distance(&pts, &inside).unwrap() < 1e-9);
        assert!(hull_distance(&pts, &outside).unwrap() > 0.1);
    }

    #[test]
    fn recession_detects_slab() {
        // {x1 <= 1, -x1 <= 0}: free in the x2 direction.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]);
        assert!(has_recession_direction(&a).unwrap());
        // Unit square: bounded.
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        assert!(!has_recession_direction(&a).unwrap());
    }
}
