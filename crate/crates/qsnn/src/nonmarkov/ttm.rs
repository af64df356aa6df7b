//! Transfer tensors: compression of a dynamical-map series into a discrete
//! memory kernel, and propagation beyond the learning window.
//!
//! ```text
//! T_1 = E_1
//! T_n = E_n - sum_{m=1}^{n-1} T_m E_{n-m}        (n >= 2)
//! rho(t_n) = sum_{m=1}^{K} T_m [rho(t_{n-m})]
//! ```
//!
//! For a time-homogeneous Markovian semigroup E_n = E_1^n, every T_n with
//! n >= 2 vanishes.

use super::maps::DynamicalMapSeries;
use crate::error::{Error, Result};
use crate::linalg::{hermitize, trace, unvectorize, vectorize, CMatrix};
use crate::quantum::DensityMatrix;

#[derive(Debug, Clone)]
pub struct TransferTensorSeries {
    pub dim: usize,
    pub dt_map: f64,
    /// T_1..T_K.
    pub tensors: Vec<CMatrix>,
}

impl TransferTensorSeries {
    pub fn depth(&self) -> usize {
        self.tensors.len()
    }
}

/// Run the transfer-tensor recursion over a learned map series.
pub fn compute_transfer_tensors(maps: &DynamicalMapSeries) -> Result<TransferTensorSeries> {
    if maps.maps.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: maps.maps.len(),
        });
    }
    let k = maps.depth();
    let mut tensors: Vec<CMatrix> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut t_n = maps.maps[n].clone();
        for m in 1..n {
            t_n -= &tensors[m - 1] * &maps.maps[n - m];
        }
        tensors.push(t_n);
    }
    Ok(TransferTensorSeries {
        dim: maps.dim,
        dt_map: maps.dt_map,
        tensors,
    })
}

/// Transfer-tensor propagation output: the input history followed by the
/// newly generated states, with the trace corrections applied to each new
/// state.
#[derive(Debug, Clone)]
pub struct TtmTrajectory {
    pub dt_map: f64,
    pub states: Vec<DensityMatrix>,
    /// Trace divisor applied to each generated state (1.0 for history).
    pub trace_corrections: Vec<f64>,
}

/// Extend a state history by `steps` grid points using the memory kernel.
/// The history must hold at least `depth` states on the same dt_map grid,
/// ordered oldest first.
pub fn ttm_propagate(
    tensors: &TransferTensorSeries,
    history: &[DensityMatrix],
    steps: usize,
) -> Result<TtmTrajectory> {
    let depth = tensors.depth();
    if history.len() < depth {
        return Err(Error::InsufficientHistory {
            depth,
            got: history.len(),
        });
    }
    for state in history {
        if state.dim() != tensors.dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", tensors.dim),
                got: format!("{0}x{0}", state.dim()),
            });
        }
    }

    let mut vecs: Vec<_> = history.iter().map(|s| vectorize(s.matrix())).collect();
    let mut states: Vec<DensityMatrix> = history.to_vec();
    let mut corrections = vec![1.0; history.len()];

    for _ in 0..steps {
        let n = vecs.len();
        let mut next = &tensors.tensors[0] * &vecs[n - 1];
        for m in 2..=depth {
            next += &tensors.tensors[m - 1] * &vecs[n - m];
        }
        let mut mat = hermitize(&unvectorize(&next, tensors.dim));
        let tr = trace(&mat).re;
        if !tr.is_finite() || tr <= 0.0 {
            return Err(Error::IntegrationFault {
                t: n as f64 * tensors.dt_map,
            });
        }
        mat = mat.unscale(tr);
        // kernel truncation error can leave eigenvalues slightly negative;
        // project onto the PSD cone (shift is bounded by that same error)
        let eig = crate::linalg::hermitian_eigen(&mat);
        if eig.eigenvalues.iter().any(|&x| x < 0.0) {
            let clamped = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| {
                num_complex::Complex64::new(x.max(0.0), 0.0)
            }));
            mat = &eig.eigenvectors * clamped * eig.eigenvectors.adjoint();
            mat = hermitize(&mat);
            let tr2 = trace(&mat).re;
            mat = mat.unscale(tr2);
        }
        vecs.push(vectorize(&mat));
        states.push(DensityMatrix::new(mat)?);
        corrections.push(tr);
    }

    Ok(TtmTrajectory {
        dt_map: tensors.dt_map,
        states,
        trace_corrections: corrections,
    })
}
