//! First-order two-time correlation <sigma+(t+tau) sigma(t)> by the quantum
//! regression procedure: propagate Lambda(tau) from Lambda(0) = sigma rho(t)
//! under the same generator (in linear mode) and read out tr(sigma+ Lambda).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::trace;
use crate::quantum::{
    integrate, lowering_op, CollapseChannel, DensityMatrix, FockConfig, HamiltonianBuilder,
    HamiltonianParams,
};

#[derive(Debug, Clone)]
pub struct G1Series {
    /// Offsets tau from the anchor time.
    pub tau: Vec<f64>,
    /// Raw correlation values g1(tau).
    pub raw: Vec<C64>,
    /// |g1(tau)| / g1(0).
    pub normalized: Vec<f64>,
}

impl G1Series {
    /// The sustained-coherence figure: the last normalized value.
    pub fn report_value(&self) -> f64 {
        *self.normalized.last().unwrap_or(&0.0)
    }
}

/// Correlation of the qubit lowering operator over a uniform tau grid
/// (record_stride steps of dt per grid point), anchored at absolute time
/// `t_origin` so a time-dependent Hamiltonian keeps its phase.
pub fn g1_correlation(
    p: &HamiltonianParams,
    channels: &[CollapseChannel],
    cfg: &FockConfig,
    rho_t: &DensityMatrix,
    t_origin: f64,
    dt: f64,
    tau_end: f64,
    record_stride: usize,
) -> Result<G1Series> {
    p.validate("quantum")?;
    if rho_t.dim() != cfg.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", cfg.dim()),
            got: format!("{0}x{0}", rho_t.dim()),
        });
    }
    let sigma = lowering_op(cfg);
    let lambda0 = &sigma * rho_t.matrix();
    let builder = HamiltonianBuilder::new(cfg);
    let h_at = |t: f64| builder.at(t, p);
    let steps = ((tau_end / dt).round() as usize).max(1);
    let raw_traj = integrate(
        &lambda0,
        &h_at,
        channels,
        t_origin,
        dt,
        steps,
        record_stride,
        false,
    )?;

    let sigma_dag = sigma.adjoint();
    let tau: Vec<f64> = raw_traj.times.iter().map(|t| t - t_origin).collect();
    let raw: Vec<C64> = raw_traj
        .states
        .iter()
        .map(|lambda| trace(&(&sigma_dag * lambda)))
        .collect();

    let g0 = raw[0].norm();
    if g0 <= f64::EPSILON {
        return Err(Error::UndefinedNormalization { raw });
    }
    let normalized = raw.iter().map(|z| z.norm() / g0).collect();
    Ok(G1Series { tau, raw, normalized })
}
