//! Dense linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Builds a matrix from row slices. All rows must have the same length.
pub fn matrix_from_rows(rows: &[&[f64]]) -> Matrix {
    let ncols = rows.first().map_or(0, |r| r.len());
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
    Matrix::from_fn(rows.len(), ncols, |i, k| rows[i][k])
}

pub fn vector(entries: &[f64]) -> Vector {
    Vector::from_column_slice(entries)
}

/// Returns `(A^j, Σ_{i=1}^{j} A^{i-1} B)`, the free response and the
/// cumulative input map of holding a constant input for `j` steps.
pub fn power_sum(a: &Matrix, b: &Matrix, j: usize) -> Result<(Matrix, Matrix)> {
    if j == 0 {
        return Err(Error::Argument("power_sum needs j >= 1".into()));
    }
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "A must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "A has {} rows but B has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let mut power = Matrix::identity(a.nrows(), a.ncols());
    let mut sum = Matrix::zeros(b.nrows(), b.ncols());
    for _ in 0..j {
        sum += &power * b;
        power = a * power;
    }
    Ok((power, sum))
}

/// Solves `m z = rhs` by LU with partial pivoting. Returns `None` when
/// `|det m|` is below `singular_tol`.
pub fn lin_solve(m: &Matrix, rhs: &Vector, singular_tol: f64) -> Option<Vector> {
    if !m.is_square() || m.nrows() != rhs.len() {
        return None;
    }
    let lu = m.clone().lu();
    if !(lu.determinant().abs() >= singular_tol) {
        return None;
    }
    lu.solve(rhs)
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_sum_single_step_is_identity_map() {
        let a = matrix_from_rows(&[&[1.0, 0.1], &[0.0, 1.0]]);
        let b = matrix_from_rows(&[&[0.005], &[0.1]]);
        let (aj, sj) = power_sum(&a, &b, 1).unwrap();
        assert_eq!(aj, a);
        assert_eq!(sj, b);
    }

    #[test]
    fn power_sum_double_integrator_two_steps() {
        let a = matrix_from_rows(&[&[1.0, 0.1], &[0.0, 1.0]]);
        let b = matrix_from_rows(&[&[0.005], &[0.1]]);
        let (aj, sj) = power_sum(&a, &b, 2).unwrap();
        let want_a = matrix_from_rows(&[&[1.0, 0.2], &[0.0, 1.0]]);
        let want_s = matrix_from_rows(&[&[0.02], &[0.2]]);
        assert_relative_eq!(aj, want_a, epsilon = 1e-15);
        assert_relative_eq!(sj, want_s, epsilon = 1e-15);
    }

    #[test]
    fn power_sum_nilpotent() {
        let a = Matrix::zeros(2, 2);
        let b = matrix_from_rows(&[&[0.3], &[-1.0]]);
        let (aj, sj) = power_sum(&a, &b, 3).unwrap();
        assert_eq!(aj, Matrix::zeros(2, 2));
        assert_eq!(sj, b);
    }

    #[test]
    fn power_sum_rejects_zero_steps() {
        let a = Matrix::identity(2, 2);
        let b = Matrix::zeros(2, 1);
        assert!(matches!(power_sum(&a, &b, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn power_sum_rejects_bad_shapes() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 1);
        assert!(matches!(power_sum(&a, &b, 1), Err(Error::Dimension(_))));
        let a = Matrix::zeros(2, 2);
        let b = Matrix::zeros(3, 1);
        assert!(matches!(power_sum(&a, &b, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn lin_solve_identity() {
        let b = vector(&[3.0, -1.5]);
        let z = lin_solve(&Matrix::identity(2, 2), &b, 1e-12).unwrap();
        assert_eq!(z, b);
    }

    #[test]
    fn lin_solve_diagonal() {
        let m = matrix_from_rows(&[&[2.0, 0.0], &[0.0, 4.0]]);
        let z = lin_solve(&m, &vector(&[2.0, 4.0]), 1e-12).unwrap();
        assert_relative_eq!(z, vector(&[1.0, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn lin_solve_singular() {
        let m = matrix_from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(lin_solve(&m, &vector(&[1.0, 2.0]), 1e-12).is_none());
    }
}
