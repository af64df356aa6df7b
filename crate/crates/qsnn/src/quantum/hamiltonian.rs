//! The pulse-angle-parameterized qubit-cavity Hamiltonian.
//!
//! ```text
//! H(t) = sum over active entries k of
//!        -g sin(theta_k/2) (sigma+ a + a+ sigma)
//!        -A cos(theta_k/2) (sigma+ + sigma) sin((t/tau_e)^2)
//! ```
//!
//! theta_k = pi gives pure exchange coupling, theta_k = 0 pure transverse
//! drive. Each schedule entry is active on [t_start, t_end); an open-ended
//! entry stays active forever. With no active entry H(t) = 0.

use serde::{Deserialize, Serialize};

use super::operators::{annihilation_op, lowering_op, FockConfig};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub t_start: f64,
    /// `None` keeps the entry active for all t >= t_start.
    pub t_end: Option<f64>,
    /// Pulse angle in radians, [0, 2*pi).
    pub theta: f64,
}

impl ThetaEntry {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && self.t_end.map_or(true, |end| t < end)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ThetaSchedule {
    pub entries: Vec<ThetaEntry>,
}

impl ThetaSchedule {
    pub fn empty() -> Self {
        Self::default()
    }

    /// A single angle active from t = 0 onward.
    pub fn constant(theta: f64) -> Self {
        Self {
            entries: vec![ThetaEntry {
                t_start: 0.0,
                t_end: None,
                theta,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        const TAU: f64 = std::f64::consts::TAU;
        for (i, entry) in self.entries.iter().enumerate() {
            if !(0.0..TAU).contains(&entry.theta) {
                return Err(Error::Config {
                    path: format!("{path}.entries[{i}].theta"),
                    message: "must lie in [0, 2*pi)".to_string(),
                });
            }
            if let Some(end) = entry.t_end {
                if end <= entry.t_start {
                    return Err(Error::Config {
                        path: format!("{path}.entries[{i}]"),
                        message: "t_end must exceed t_start".to_string(),
                    });
                }
            } else if i + 1 != self.entries.len() {
                return Err(Error::Config {
                    path: format!("{path}.entries[{i}]"),
                    message: "only the final entry may be open-ended".to_string(),
                });
            }
            if i > 0 {
                let prev = &self.entries[i - 1];
                let prev_end = prev.t_end.unwrap_or(f64::INFINITY);
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

    pub fn active_at(&self, t: f64) -> impl Iterator<Item = &ThetaEntry> {
        self.entries.iter().filter(move |e| e.contains(t))
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.theta).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    /// Exchange coupling rate g (angular frequency units).
    pub g: f64,
    /// Transverse drive amplitude A (angular frequency units).
    pub drive_amp: f64,
    /// Drive time scale in sin((t/tau_e)^2).
    pub tau_e: f64,
    pub theta_schedule: ThetaSchedule,
}

impl HamiltonianParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.g < 0.0 || !self.g.is_finite() {
            return Err(Error::Config {
                path: format!("{path}.g"),
                message: "must be >= 0".to_string(),
            });
        }
        if self.drive_amp < 0.0 || !self.drive_amp.is_finite() {
            return Err(Error::Config {
                path: format!("{path}.drive_amp"),
                message: "must be >= 0".to_string(),
            });
        }
        if !(self.tau_e > 0.0) {
            return Err(Error::Config {
                path: format!("{path}.tau_e"),
                message: "must be > 0".to_string(),
            });
        }
        self.theta_schedule.validate(&format!("{path}.theta_schedule"))
    }
}

/// Precomputed operator parts of the Hamiltonian, so time stepping only
/// scales and adds.
pub(crate) struct HamiltonianBuilder {
    /// sigma+ a + a+ sigma
    exchange: CMatrix,
    /// sigma+ + sigma
    transverse: CMatrix,
}

impl HamiltonianBuilder {
    pub fn new(cfg: &FockConfig) -> Self {
        let a = annihilation_op(cfg);
        let sigma = lowering_op(cfg);
        let exchange = sigma.adjoint() * &a + a.adjoint() * &sigma;
        let transverse = sigma.adjoint() + &sigma;
        Self { exchange, transverse }
    }

    pub fn at(&self, t: f64, p: &HamiltonianParams) -> CMatrix {
        let dim = self.exchange.nrows();
        let mut h = CMatrix::zeros(dim, dim);
        let drive_phase = (t / p.tau_e).powi(2).sin();
        for entry in p.theta_schedule.active_at(t) {
            let half = entry.theta / 2.0;
            h += self.exchange.scale(-p.g * half.sin());
            h += self.transverse.scale(-p.drive_amp * half.cos() * drive_phase);
        }
        h
    }
}

/// Assemble H(t) from scratch; `HamiltonianBuilder` does the same with the
/// operator parts cached.
pub fn hamiltonian_at(t: f64, p: &HamiltonianParams, cfg: &FockConfig) -> CMatrix {
    HamiltonianBuilder::new(cfg).at(t, p)
}
