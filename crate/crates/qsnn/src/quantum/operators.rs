//! Operators on the qubit (x) truncated-Fock space.
//!
//! Basis ordering is qubit-major and fixed: (g, e) then n = 0..n_max, so
//! index = q * (n_max + 1) + n with q = 0 for g, q = 1 for e. All operator
//! matrices are bit-reproducible given this ordering.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockConfig {
    /// Photon-number truncation; the cavity keeps n = 0..n_max.
    pub n_max: usize,
}

impl FockConfig {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Config {
                path: "quantum.n_max".to_string(),
                message: "must be >= 1".to_string(),
            });
        }
        Ok(Self { n_max })
    }

    /// Total dimension 2 * (n_max + 1).
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Index of |q, n> in the qubit-major ordering.
    pub fn index(&self, excited: bool, n: usize) -> usize {
        usize::from(excited) * self.fock_dim() + n
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Fock-space annihilation operator: entries sqrt(n) on the superdiagonal.
fn fock_annihilation(fock_dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        a[(n - 1, n)] = real((n as f64).sqrt());
    }
    a
}

/// Cavity annihilation a = I_2 (x) a_fock.
pub fn annihilation_op(cfg: &FockConfig) -> CMatrix {
    CMatrix::identity(2, 2).kronecker(&fock_annihilation(cfg.fock_dim()))
}

/// Qubit lowering sigma_ge = |g><e| (x) I_fock.
pub fn lowering_op(cfg: &FockConfig) -> CMatrix {
    let mut sigma = CMatrix::zeros(2, 2);
    sigma[(0, 1)] = real(1.0);
    sigma.kronecker(&CMatrix::identity(cfg.fock_dim(), cfg.fock_dim()))
}

/// Photon number operator a^dagger a.
pub fn number_op(cfg: &FockConfig) -> CMatrix {
    let a = annihilation_op(cfg);
    a.adjoint() * a
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[real(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), real(0.0)],
    )
}

/// sigma_z = diag(1, -1) in the (g, e) ordering, so z = P_g - P_e.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)])
}

/// Lift a 2x2 qubit operator to the full space: op (x) I_fock.
pub fn lift_qubit_op(op: &CMatrix, cfg: &FockConfig) -> CMatrix {
    op.kronecker(&CMatrix::identity(cfg.fock_dim(), cfg.fock_dim()))
}
