//! Coupled pair of qubit-neurons: time-dependent exchange Hamiltonian,
//! entanglement and coherence measures, and weighted density-matrix mixing.
//!
//! The two-qubit basis is qubit-major: (gg, ge, eg, ee) with index
//! 2*q1 + q2 and g = 0, e = 1.

mod concurrence;
mod g1;
mod mixing;

pub use concurrence::concurrence;
pub use g1::{g1_correlation, G1Series};
pub use mixing::{mix_density_matrices, MixtureWeights};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantum::{integrate, CollapseChannel, DensityMatrix, FockConfig, QuantumTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub t_start: f64,
    /// `None` keeps the entry active for all t >= t_start.
    pub t_end: Option<f64>,
    /// Exchange rate j(t) while active.
    pub j_exchange: f64,
    /// Transverse drive amplitudes (A_1, A_2).
    pub drive_pair: (f64, f64),
    /// Pulse angles (theta_k1, theta_k2).
    pub theta_pair: (f64, f64),
}

impl CouplingEntry {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && self.t_end.map_or(true, |end| t < end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitCouplingSchedule {
    /// Drive time scale in sin((t/tau_e)^2), shared by both qubits.
    pub tau_e: f64,
    pub entries: Vec<CouplingEntry>,
}

impl TwoQubitCouplingSchedule {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.tau_e > 0.0) {
            return Err(Error::Config {
                path: format!("{path}.tau_e"),
                message: "must be > 0".to_string(),
            });
        }
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.j_exchange < 0.0 || entry.drive_pair.0 < 0.0 || entry.drive_pair.1 < 0.0 {
                return Err(Error::Config {
                    path: format!("{path}.entries[{i}]"),
                    message: "rates must be >= 0".to_string(),
                });
            }
            if let Some(end) = entry.t_end {
                if end <= entry.t_start {
                    return Err(Error::Config {
                        path: format!("{path}.entries[{i}]"),
                        message: "t_end must exceed t_start".to_string(),
                    });
                }
            }
            if i > 0 {
                let prev_end = self.entries[i - 1].t_end.unwrap_or(f64::INFINITY);
                if entry.t_start < prev_end {
                    return Err(Error::Config {
                        path: format!("{path}.entries[{i}]"),
                        message: "entries must be sorted and non-overlapping".to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Precomputed two-qubit operators, on the bare 4x4 space or the
/// qubit (x) cavity pair space when cavities are enabled.
pub struct TwoQubitSystem {
    dim: usize,
    exchange: CMatrix,
    transverse1: CMatrix,
    transverse2: CMatrix,
    sigma1: CMatrix,
    sigma2: CMatrix,
    number_total: CMatrix,
}

impl TwoQubitSystem {
    /// Qubits only (4x4), the default configuration.
    pub fn bare() -> Self {
        let mut sigma = CMatrix::zeros(2, 2);
        sigma[(0, 1)] = num_complex::Complex64::new(1.0, 0.0);
        Self::from_single(&sigma, 2)
    }

    /// Each qubit carries its own truncated cavity.
    pub fn with_cavities(cfg: &FockConfig) -> Self {
        let sigma = crate::quantum::lowering_op(cfg);
        Self::from_single(&sigma, cfg.dim())
    }

    fn from_single(sigma: &CMatrix, single_dim: usize) -> Self {
        let id = CMatrix::identity(single_dim, single_dim);
        let sigma1 = sigma.kronecker(&id);
        let sigma2 = id.kronecker(sigma);
        let exchange = sigma1.adjoint() * &sigma2 + &sigma1 * sigma2.adjoint();
        let transverse1 = sigma1.adjoint() + &sigma1;
        let transverse2 = sigma2.adjoint() + &sigma2;
        let number_total = sigma1.adjoint() * &sigma1 + sigma2.adjoint() * &sigma2;
        Self {
            dim: single_dim * single_dim,
            exchange,
            transverse1,
            transverse2,
            sigma1,
            sigma2,
            number_total,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma1(&self) -> &CMatrix {
        &self.sigma1
    }

    pub fn sigma2(&self) -> &CMatrix {
        &self.sigma2
    }

    pub fn number_total(&self) -> &CMatrix {
        &self.number_total
    }

    /// H(t) on the active schedule entry:
    /// -j (sigma1+ sigma2 + sigma1 sigma2+)
    /// - sum_i A_i cos(theta_ki/2) (sigma_i+ + sigma_i) sin((t/tau_e)^2).
    pub fn hamiltonian_at(&self, t: f64, sched: &TwoQubitCouplingSchedule) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim, self.dim);
        let drive_phase = (t / sched.tau_e).powi(2).sin();
        for entry in sched.entries.iter().filter(|e| e.contains(t)) {
            h += self.exchange.scale(-entry.j_exchange);
            h += self
                .transverse1
                .scale(-entry.drive_pair.0 * (entry.theta_pair.0 / 2.0).cos() * drive_phase);
            h += self
                .transverse2
                .scale(-entry.drive_pair.1 * (entry.theta_pair.1 / 2.0).cos() * drive_phase);
        }
        h
    }

    /// RK4 propagation under the schedule Hamiltonian and channels.
    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        sched: &TwoQubitCouplingSchedule,
        channels: &[CollapseChannel],
        dt: f64,
        t_end: f64,
        record_stride: usize,
    ) -> Result<QuantumTrajectory> {
        sched.validate("network")?;
        if rho0.dim() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.dim),
                got: format!("{0}x{0}", rho0.dim()),
            });
        }
        let steps = ((t_end / dt).round() as usize).max(1);
        let h_at = |t: f64| self.hamiltonian_at(t, sched);
        let raw = integrate(rho0.matrix(), &h_at, channels, 0.0, dt, steps, record_stride, true)?;
        let states = raw
            .states
            .into_iter()
            .map(DensityMatrix::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantumTrajectory {
            dt,
            record_stride: record_stride.max(1),
            times: raw.times,
            states,
            trace_corrections: raw.trace_corrections,
            max_pre_renorm_drift: raw.max_drift,
        })
    }
}

/// The 4x4 two-qubit Hamiltonian at time t.
pub fn coupled_hamiltonian(t: f64, sched: &TwoQubitCouplingSchedule) -> CMatrix {
    TwoQubitSystem::bare().hamiltonian_at(t, sched)
}

/// Reduced state of qubit 1 (trace out qubit 2) of a 4x4 two-qubit state.
pub fn reduce_to_first(rho: &DensityMatrix) -> Result<DensityMatrix> {
    reduce(rho, true)
}

/// Reduced state of qubit 2 (trace out qubit 1).
pub fn reduce_to_second(rho: &DensityMatrix) -> Result<DensityMatrix> {
    reduce(rho, false)
}

fn reduce(rho: &DensityMatrix, first: bool) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::ShapeMismatch {
            expected: "4x4".to_string(),
            got: format!("{0}x{0}", rho.dim()),
        });
    }
    let m = rho.matrix();
    let mut out = CMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut sum = num_complex::Complex64::new(0.0, 0.0);
            for c in 0..2 {
                let (r, s) = if first {
                    (2 * a + c, 2 * b + c)
                } else {
                    (2 * c + a, 2 * c + b)
                };
                sum += m[(r, s)];
            }
            out[(a, b)] = sum;
        }
    }
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests;
