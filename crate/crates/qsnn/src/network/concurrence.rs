//! Two-qubit entanglement via the spin-flip construction.
//!
//! ```text
//! C(rho) = max(0, l1 - l2 - l3 - l4)
//! ```
//!
//! where the l_i are the decreasing square roots of the eigenvalues of
//! rho (sy (x) sy) rho* (sy (x) sy). They are computed as the singular
//! values of A = sqrt(rho) (sy (x) sy) sqrt(rho*), since A A+ has that
//! same spectrum; this route keeps the round-off singular values in
//! cancelling pairs instead of squaring them.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::quantum::{pauli_y, DensityMatrix};

/// Hermitian square root with a relative floor: eigenvalues below
/// 1e-13 * max are rank-truncated to zero, so the null space of a pure
/// state does not acquire sqrt-amplified noise.
fn floored_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(m);
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let floor = 1e-13 * max;
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| {
        if x > floor {
            C64::new(x.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }));
    &eig.eigenvectors * roots * eig.eigenvectors.adjoint()
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::ShapeMismatch {
            expected: "4x4".to_string(),
            got: format!("{0}x{0}", rho.dim()),
        });
    }
    let yy = pauli_y().kronecker(&pauli_y());
    let root = floored_sqrt(rho.matrix());
    // sqrt(rho*) = conj(sqrt(rho))
    let a = &root * yy * root.map(|z| z.conj());
    let mut lambdas: Vec<f64> = a.singular_values().iter().copied().collect();
    lambdas.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}
