//! Small dense linear algebra kit: square matrices, a symmetric eigensolver,
//! Hermitian eigenvalues by real embedding, and Gauss-Legendre rules.

mod eigen;
mod matrix;
mod quadrature;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen, MAX_QL_ITERATIONS};
pub use matrix::Matrix;
pub use quadrature::GaussLegendre;

use crate::error::Result;
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix given row-major as complex entries.
///
/// Purely real input goes straight to the symmetric solver. Otherwise the
/// matrix `A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`,
/// whose spectrum is that of `A + iB` with every eigenvalue doubled; every
/// other sorted value is kept.
pub fn hermitian_eigenvalues(n: usize, entries: &[Complex64]) -> Result<Vec<f64>> {
    assert_eq!(entries.len(), n * n);
    if entries.iter().all(|z| z.im == 0.0) {
        let a = Matrix::from_fn(n, |i, j| entries[i * n + j].re);
        return symmetric_eigenvalues(&a);
    }
    let big = Matrix::from_fn(2 * n, |i, j| {
        let z = entries[(i % n) * n + (j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let vals = symmetric_eigenvalues(&big)?;
    Ok(vals.into_iter().step_by(2).collect())
}
