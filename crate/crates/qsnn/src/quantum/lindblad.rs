//! Master-equation right-hand side and fixed-step RK4 propagation.
//!
//! ```text
//! drho/dt = -i [H(t), rho] + sum_j gamma_j (L_j rho L_j+ - 1/2 {L_j+ L_j, rho})
//! ```
//!
//! The integrator re-evaluates H at the RK4 stage times. In normalizing mode
//! (density-matrix propagation) each step is Hermitized and trace-renormalized,
//! with the applied correction logged; in linear mode (map learning, two-time
//! correlations) the generator is applied as-is so the evolution stays exactly
//! linear.

use num_complex::Complex64 as C64;

use super::density::DensityMatrix;
use super::hamiltonian::{HamiltonianBuilder, HamiltonianParams};
use super::operators::{annihilation_op, lift_qubit_op, lowering_op, pauli_z, FockConfig};
use crate::error::{Error, Result};
use crate::linalg::{hermitize, trace, CMatrix};

/// Maximum tolerated per-step trace drift before renormalization.
pub const TRACE_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub operator: CMatrix,
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: CMatrix, rate: f64) -> Result<Self> {
        if rate < 0.0 || !rate.is_finite() {
            return Err(Error::Config {
                path: "channel.rate".to_string(),
                message: "must be >= 0".to_string(),
            });
        }
        Ok(Self { operator, rate })
    }

    /// Qubit energy relaxation, L = sigma_ge.
    pub fn qubit_decay(cfg: &FockConfig, rate: f64) -> Result<Self> {
        Self::new(lowering_op(cfg), rate)
    }

    /// Cavity photon loss, L = a.
    pub fn cavity_decay(cfg: &FockConfig, rate: f64) -> Result<Self> {
        Self::new(annihilation_op(cfg), rate)
    }

    /// Qubit pure dephasing, L = sigma_z (x) I.
    pub fn qubit_dephasing(cfg: &FockConfig, rate: f64) -> Result<Self> {
        Self::new(lift_qubit_op(&pauli_z(), cfg), rate)
    }
}

/// Channel operators with adjoints and L+L precomputed for stepping.
struct PreparedChannel {
    l: CMatrix,
    l_dag: CMatrix,
    l_dag_l: CMatrix,
    rate: f64,
}

fn prepare_channels(channels: &[CollapseChannel], dim: usize) -> Result<Vec<PreparedChannel>> {
    channels
        .iter()
        .map(|ch| {
            if ch.operator.nrows() != dim || ch.operator.ncols() != dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("{dim}x{dim}"),
                    got: format!("{}x{}", ch.operator.nrows(), ch.operator.ncols()),
                });
            }
            let l_dag = ch.operator.adjoint();
            let l_dag_l = &l_dag * &ch.operator;
            Ok(PreparedChannel {
                l: ch.operator.clone(),
                l_dag,
                l_dag_l,
                rate: ch.rate,
            })
        })
        .collect()
}

fn apply_generator(rho: &CMatrix, h: &CMatrix, channels: &[PreparedChannel]) -> CMatrix {
    let minus_i = C64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * minus_i;
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let jump = &ch.l * rho * &ch.l_dag;
        let anti = (&ch.l_dag_l * rho + rho * &ch.l_dag_l).scale(0.5);
        out += (jump - anti).scale(ch.rate);
    }
    out
}

/// drho/dt for one state under H and the given channels. The output is
/// traceless and Hermitian to round-off.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, channels: &[CollapseChannel]) -> Result<CMatrix> {
    let dim = rho.nrows();
    if rho.ncols() != dim || h.nrows() != dim || h.ncols() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}x{dim}"),
            got: format!("{}x{}", h.nrows(), h.ncols()),
        });
    }
    let prepared = prepare_channels(channels, dim)?;
    Ok(apply_generator(rho, h, &prepared))
}

pub(crate) struct RawTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub trace_corrections: Vec<f64>,
    pub max_drift: f64,
}

/// Fixed-step RK4 on the master equation; the workhorse behind every
/// propagation in the crate.
pub(crate) fn integrate(
    rho0: &CMatrix,
    h_at: &dyn Fn(f64) -> CMatrix,
    channels: &[CollapseChannel],
    t0: f64,
    dt: f64,
    steps: usize,
    record_stride: usize,
    normalize: bool,
) -> Result<RawTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::Config {
            path: "dt".to_string(),
            message: "must be > 0".to_string(),
        });
    }
    let stride = record_stride.max(1);
    let dim = rho0.nrows();
    let prepared = prepare_channels(channels, dim)?;

    let mut rho = rho0.clone();
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut states = Vec::with_capacity(steps / stride + 2);
    let mut corrections = Vec::with_capacity(steps / stride + 2);
    times.push(t0);
    states.push(rho.clone());
    corrections.push(1.0);
    let mut max_drift: f64 = 0.0;

    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        let half = dt * 0.5;

        let k1 = apply_generator(&rho, &h_at(t), &prepared);
        let k2 = apply_generator(&(&rho + k1.scale(half)), &h_at(t + half), &prepared);
        let k3 = apply_generator(&(&rho + k2.scale(half)), &h_at(t + half), &prepared);
        let k4 = apply_generator(&(&rho + k3.scale(dt)), &h_at(t + dt), &prepared);
        rho += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);

        let t_next = t0 + (step + 1) as f64 * dt;
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::IntegrationFault { t: t_next });
        }

        let mut correction = 1.0;
        if normalize {
            let tr = trace(&rho).re;
            let drift = (tr - 1.0).abs();
            max_drift = max_drift.max(drift);
            if drift > TRACE_DRIFT_TOL {
                return Err(Error::StepSize {
                    t: t_next,
                    dt,
                    drift,
                    tol: TRACE_DRIFT_TOL,
                });
            }
            rho = hermitize(&rho).unscale(tr);
            correction = tr;
        }

        // record on the stride grid, and always record the final step
        if (step + 1) % stride == 0 || step + 1 == steps {
            times.push(t_next);
            states.push(rho.clone());
            corrections.push(correction);
        }
    }

    Ok(RawTrajectory {
        times,
        states,
        trace_corrections: corrections,
        max_drift,
    })
}

/// A recorded density-matrix trajectory.
#[derive(Debug, Clone)]
pub struct QuantumTrajectory {
    pub dt: f64,
    pub record_stride: usize,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Trace renormalization divisor applied at each recorded step; drift is
    /// observable as the deviation from 1.
    pub trace_corrections: Vec<f64>,
    /// Largest pre-renormalization |trace - 1| seen over the whole run.
    pub max_pre_renorm_drift: f64,
}

impl QuantumTrajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory records at least rho0")
    }
}

/// Propagate a density matrix under the schedule-parameterized Hamiltonian
/// and the given collapse channels, recording every `record_stride` steps.
pub fn evolve(
    rho0: &DensityMatrix,
    p: &HamiltonianParams,
    channels: &[CollapseChannel],
    cfg: &FockConfig,
    dt: f64,
    t_end: f64,
    record_stride: usize,
) -> Result<QuantumTrajectory> {
    p.validate("quantum")?;
    if rho0.dim() != cfg.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", cfg.dim()),
            got: format!("{0}x{0}", rho0.dim()),
        });
    }
    let steps = ((t_end / dt).round() as usize).max(1);
    let builder = HamiltonianBuilder::new(cfg);
    let h_at = move |t: f64| builder.at(t, p);
    let raw = integrate(
        rho0.matrix(),
        &h_at,
        channels,
        0.0,
        dt,
        steps,
        record_stride,
        true,
    )?;
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
