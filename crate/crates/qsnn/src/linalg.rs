//! Dense complex-matrix helpers shared by the quantum modules.
//!
//! Everything here operates on `nalgebra::DMatrix<Complex64>`. States and
//! superoperators use column-major vectorization: `vec(M)[r + c*dim] = M[r,c]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// (m + m^dagger) / 2
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest elementwise modulus of `m - m^dagger`; zero for exactly Hermitian
/// input.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Entries tinier than 1e-150 of the largest modulus get squared inside the
/// QR shift strategy, underflow to zero, and can poison the iteration with
/// NaN. They carry no information at f64 precision, so flush them to exact
/// zero (which deflates cleanly) before decomposing.
fn flush_eigen_noise(m: CMatrix) -> CMatrix {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return m;
    }
    let floor = scale * 1e-150;
    m.map(|z| {
        C64::new(
            if z.re.abs() < floor { 0.0 } else { z.re },
            if z.im.abs() < floor { 0.0 } else { z.im },
        )
    })
}

/// Hermitian eigendecomposition with the round-off guards applied: the
/// input is Hermitized and denormal-range noise is flushed first.
pub fn hermitian_eigen(m: &CMatrix) -> nalgebra::SymmetricEigen<C64, nalgebra::Dyn> {
    flush_eigen_noise(hermitize(m)).symmetric_eigen()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_eigen(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Principal square root of a Hermitian PSD matrix. Small negative
/// eigenvalues from round-off are clamped to zero.
pub fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(m);
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * roots * eig.eigenvectors.adjoint()
}

/// Column-major vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for a square matrix of side `dim`.
pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Apply a superoperator (dim^2 x dim^2) to a dim x dim matrix.
pub fn apply_superop(superop: &CMatrix, m: &CMatrix) -> CMatrix {
    unvectorize(&(superop * vectorize(m)), m.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vectorize_roundtrip_is_column_major() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = vectorize(&m);
        // column-major: [m00, m10, m01, m11]
        assert_eq!(v[0], c(1.0, 0.0));
        assert_eq!(v[1], c(3.0, 0.0));
        assert_eq!(v[2], c(2.0, 0.0));
        assert_eq!(v[3], c(4.0, 0.0));
        assert_eq!(unvectorize(&v, 2), m);
    }

    #[test]
    fn hermitian_sqrt_squares_back() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.5, 0.25), c(0.5, -0.25), c(1.0, 0.0)],
        );
        let r = hermitian_sqrt(&m);
        assert_relative_eq!((&r * &r - &m).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_ascend() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        let ev = hermitian_eigenvalues(&m);
        assert_relative_eq!(ev[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[2], 3.0, epsilon = 1e-12);
    }
}
