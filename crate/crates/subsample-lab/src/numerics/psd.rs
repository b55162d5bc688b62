//! Symmetric PSD matrix helpers.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Eigenvalue floor below which a symmetric matrix is treated as singular.
pub const EIG_FLOOR: f64 = 1e-12;

/// Inverse of a symmetric positive definite matrix via symmetric
/// eigendecomposition. Errors out (rather than regularizing silently) if the
/// smallest eigenvalue is below [`EIG_FLOOR`] times the largest.
pub fn sym_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let sym = 0.5 * (m + m.transpose());
    let eig = sym.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let floor = EIG_FLOOR * max_eig.max(1.0);
    let mut inv = DMatrix::zeros(n, n);
    for j in 0..n {
        let lambda = eig.eigenvalues[j];
        if lambda <= floor {
            return Err(Error::SingularMatrix {
                min_eig: lambda,
                floor,
            });
        }
        let v = eig.eigenvectors.column(j);
        inv += (v * v.transpose()) / lambda;
    }
    Ok(inv)
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = 0.5 * (m + m.transpose());
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Checks symmetry and eigenvalues ≥ -1e-10 for an estimation metric Q.
pub fn validate_psd(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid("metric Q must be square"));
    }
    let asym = (m - m.transpose()).abs().max();
    if asym > 1e-10 * m.abs().max().max(1.0) {
        return Err(Error::invalid("metric Q must be symmetric"));
    }
    let min = min_eigenvalue(m);
    if min < -1e-10 {
        return Err(Error::invalid(format!(
            "metric Q must be PSD (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let inv = sym_inverse(&m).unwrap();
        let id = &m * &inv;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_is_an_error() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            sym_inverse(&m),
            Err(Error::SingularMatrix { .. })
        ));
    }
}
