//! Density matrices with enforced invariants, partial trace, and Bloch
//! coordinates.

use num_complex::Complex64 as C64;

use super::operators::{pauli_x, pauli_y, pauli_z, FockConfig};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_residual, trace, CMatrix, CVector};

/// A Hermitian, unit-trace, positive-semidefinite complex matrix.
///
/// Construction validates all three invariants at fixed tolerances:
/// Hermiticity residual < 1e-10, |trace - 1| <= 1e-9, minimum eigenvalue
/// >= -1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const EIGENVALUE_FLOOR: f64 = -1e-9;

    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".to_string(),
                got: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        let herm = hermiticity_residual(&mat);
        if herm >= Self::HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity residual {herm:.3e} >= {:.1e}",
                Self::HERMITICITY_TOL
            )));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} deviates from 1 by more than {:.1e}",
                Self::TRACE_TOL
            )));
        }
        let min_eig = hermitian_eigenvalues(&mat)[0];
        if min_eig < Self::EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min_eig:.3e} < {:.1e}",
                Self::EIGENVALUE_FLOOR
            )));
        }
        Ok(Self { mat })
    }

    /// |psi><psi| for a normalized (or normalizable) state vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidDensityMatrix(
                "zero state vector".to_string(),
            ));
        }
        let normalized = psi.unscale(norm);
        Self::new(&normalized * normalized.adjoint())
    }

    /// Projector onto a single basis state.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(index, index)] = C64::new(1.0, 0.0);
        Self { mat }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace_re(&self) -> f64 {
        trace(&self.mat).re
    }

    /// tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        trace(&(&self.mat * &self.mat)).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }
}

/// Trace out the Fock factor of a qubit (x) Fock state, leaving the 2x2
/// qubit state.
pub fn partial_trace_to_qubit(rho: &DensityMatrix, cfg: &FockConfig) -> Result<DensityMatrix> {
    if rho.dim() != cfg.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", cfg.dim()),
            got: format!("{0}x{0}", rho.dim()),
        });
    }
    let fock_dim = cfg.fock_dim();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(2, 2);
    for q in 0..2 {
        for qp in 0..2 {
            let mut sum = C64::new(0.0, 0.0);
            for n in 0..fock_dim {
                sum += m[(q * fock_dim + n, qp * fock_dim + n)];
            }
            out[(q, qp)] = sum;
        }
    }
    DensityMatrix::new(out)
}

/// (tr rho sigma_x, tr rho sigma_y, tr rho sigma_z) for a 2x2 state in the
/// (g, e) ordering; |e><e| maps to (0, 0, -1).
pub fn bloch_vector(rho_q: &DensityMatrix) -> Result<(f64, f64, f64)> {
    if rho_q.dim() != 2 {
        return Err(Error::ShapeMismatch {
            expected: "2x2".to_string(),
            got: format!("{0}x{0}", rho_q.dim()),
        });
    }
    let m = rho_q.matrix();
    let expect = |op: CMatrix| trace(&(m * op)).re;
    Ok((expect(pauli_x()), expect(pauli_y()), expect(pauli_z())))
}
