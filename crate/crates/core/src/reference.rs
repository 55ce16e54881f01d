//! Serial forward substitution and solution-quality metrics. Every concurrent
//! engine is checked against [`solve_serial`].

use serde::Serialize;

use crate::matrix::{validate_lower_triangular, CscMatrix, MatrixError};

/// Column-oriented forward substitution over stored entries only.
///
/// Columns are visited in ascending order; after `x_i` is fixed its column
/// is scattered into the running `left_sum` of each dependent row.
pub fn solve_serial(l: &CscMatrix, b: &[f64]) -> Result<Vec<f64>, MatrixError> {
    let n = l.n();
    if b.len() != n {
        return Err(MatrixError::DimensionMismatch { expected: n, actual: b.len() });
    }
    if let Some(v) = validate_lower_triangular(l).into_iter().next() {
        return Err(v.into());
    }
    let mut left_sum = vec![0.0; n];
    let mut x = vec![0.0; n];
    for i in 0..n {
        let (rows, vals) = l.column(i);
        let xi = (b[i] - left_sum[i]) / vals[0];
        x[i] = xi;
        for (&r, &v) in rows[1..].iter().zip(&vals[1..]) {
            left_sum[r] += v * xi;
        }
    }
    Ok(x)
}

/// `(‖Lx − b‖∞, ‖Lx − b‖∞ / max(‖b‖∞, f64::MIN_POSITIVE))`.
pub fn residual_norm(l: &CscMatrix, x: &[f64], b: &[f64]) -> Result<(f64, f64), MatrixError> {
    if b.len() != l.n() {
        return Err(MatrixError::DimensionMismatch { expected: l.n(), actual: b.len() });
    }
    let y = crate::matrix::spmv_lower(l, x)?;
    let abs = y.iter().zip(b).map(|(yi, bi)| (yi - bi).abs()).fold(0.0, f64::max);
    let b_norm = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok((abs, abs / b_norm.max(f64::MIN_POSITIVE)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionComparison {
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub worst_component: usize,
    pub within_tol: bool,
}

/// Componentwise comparison; the relative error of component `i` is
/// `|x_i − ref_i| / max(|ref_i|, 1)`. A NaN anywhere counts as infinite error.
pub fn compare_solutions(x: &[f64], x_ref: &[f64], tol: f64) -> Result<SolutionComparison, MatrixError> {
    if x.len() != x_ref.len() {
        return Err(MatrixError::DimensionMismatch { expected: x_ref.len(), actual: x.len() });
    }
    let mut out = SolutionComparison { max_abs_error: 0.0, max_rel_error: 0.0, worst_component: 0, within_tol: true };
    for (i, (&xi, &ri)) in x.iter().zip(x_ref).enumerate() {
        let mut abs = (xi - ri).abs();
        if abs.is_nan() {
            abs = f64::INFINITY;
        }
        let rel = abs / ri.abs().max(1.0);
        out.max_abs_error = out.max_abs_error.max(abs);
        if rel > out.max_rel_error {
            out.max_rel_error = rel;
            out.worst_component = i;
        }
    }
    out.within_tol = out.max_rel_error <= tol;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_by_three() -> CscMatrix {
        CscMatrix::from_triplets(3, [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 3.0), (2, 2, 4.0)]).unwrap()
    }

    #[test]
    fn identity_returns_rhs() {
        let b = [3.5, -2.0, 0.25];
        assert_eq!(solve_serial(&CscMatrix::identity(3), &b).unwrap(), b.to_vec());
    }

    #[test]
    fn hand_executed_three_by_three() {
        // x0 = 2/2 = 1; left_sum1 = 1, x1 = (2-1)/1 = 1; left_sum2 = 3, x2 = (7-3)/4 = 1
        assert_eq!(solve_serial(&three_by_three(), &[2.0, 2.0, 7.0]).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn bidiagonal_telescopes() {
        let l = CscMatrix::from_triplets(
            4,
            [(0, 0, 1.0), (1, 0, -1.0), (1, 1, 1.0), (2, 1, -1.0), (2, 2, 1.0), (3, 2, -1.0), (3, 3, 1.0)],
        )
        .unwrap();
        assert_eq!(solve_serial(&l, &[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn diagonal_is_exact_division() {
        let d = [3.0, -7.0, 0.1];
        let l = CscMatrix::from_triplets(3, d.iter().enumerate().map(|(i, &v)| (i, i, v))).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = solve_serial(&l, &b).unwrap();
        for i in 0..3 {
            assert_eq!(x[i], b[i] / d[i]);
        }
    }

    #[test]
    fn solve_errors() {
        assert!(matches!(
            solve_serial(&three_by_three(), &[1.0]),
            Err(MatrixError::DimensionMismatch { expected: 3, actual: 1 })
        ));
        let zero = CscMatrix::from_triplets(2, [(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(solve_serial(&zero, &[1.0, 1.0]), Err(MatrixError::ZeroDiagonal(1)));
    }

    #[test]
    fn residuals() {
        let (abs, rel) = residual_norm(&CscMatrix::identity(1), &[0.0], &[1.0]).unwrap();
        assert_eq!((abs, rel), (1.0, 1.0));
        let (_, rel) = residual_norm(&three_by_three(), &[1.0, 1.0, 1.0], &[2.0, 2.0, 7.0]).unwrap();
        assert!(rel <= 1e-15);
        let (abs, rel) = residual_norm(&CscMatrix::identity(2), &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!((abs, rel), (0.0, 0.0));
    }

    #[test]
    fn comparisons() {
        let c = compare_solutions(&[1.0, 2.0], &[1.0, 2.0], 1e-9).unwrap();
        assert_eq!((c.max_abs_error, c.max_rel_error, c.within_tol), (0.0, 0.0, true));
        assert!(compare_solutions(&[1.0 + 1e-12], &[1.0], 1e-9).unwrap().within_tol);
        let c = compare_solutions(&[2.0], &[1.0], 1e-9).unwrap();
        assert!(!c.within_tol);
        assert_eq!(c.max_rel_error, 1.0);
        let c = compare_solutions(&[0.0, 100.0, f64::NAN], &[0.0, 50.0, 1.0], 1e-9).unwrap();
        assert_eq!(c.worst_component, 2);
        assert!(!c.within_tol);
        assert!(compare_solutions(&[1.0], &[1.0, 2.0], 1e-9).is_err());
    }
}
