//! Coupled memristive burst-spiking neuron circuit.
//!
//! Two second-order oscillator neurons with state-dependent memory
//! resistances, coupled through cross terms on the second derivatives:
//!
//! ```text
//! d2v1/dt2 + (Rm2/R3 + C1/C2 + dRm2/dt*C1 + Rm1/R4) / (Rm2*C1) * dv1/dt
//!          + (1/(R3*C2) + dRm2/dt / R3) / (Rm2*C1) * v1
//!          + K1 * v2 = 0
//! ```
//!
//! and symmetrically for neuron 2 with (Rm4, R5, C5, C6, Rm3, R6, K2, v1).
//! Memristors 1 and 2 are driven by v1, memristors 3 and 4 by v2.
//! Integration is fixed-step RK4 on the eight-component state
//! (v1, dv1, v2, dv2, Rm1..Rm4); runs are fully deterministic.

mod memristor;
mod spikes;

pub use memristor::{memristance_step, MemristanceLaw};
pub use spikes::{count_spikes, phase_portrait, Spike};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronCircuitParams {
    pub c1: f64,
    pub c2: f64,
    pub c5: f64,
    pub c6: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
    pub r6: f64,
    /// Coupling of v2 into neuron 1's second derivative.
    pub k1_coupled: f64,
    /// Coupling of v1 into neuron 2's second derivative.
    pub k2_coupled: f64,
    /// Laws for Rm1..Rm4 in order.
    pub mem_laws: [MemristanceLaw; 4],
}

impl NeuronCircuitParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        let positive = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c5", self.c5),
            ("c6", self.c6),
            ("r3", self.r3),
            ("r4", self.r4),
            ("r5", self.r5),
            ("r6", self.r6),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(Error::Config {
                    path: format!("{path}.{name}"),
                    message: "must be > 0".to_string(),
                });
            }
        }
        for (name, value) in [("k1_coupled", self.k1_coupled), ("k2_coupled", self.k2_coupled)] {
            if !value.is_finite() {
                return Err(Error::Config {
                    path: format!("{path}.{name}"),
                    message: "must be finite".to_string(),
                });
            }
        }
        for (i, law) in self.mem_laws.iter().enumerate() {
            law.validate(&format!("{path}.mem_laws[{i}]"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronNetworkState {
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    pub dv1: f64,
    pub dv2: f64,
    /// Rm1..Rm4.
    pub r_mem: [f64; 4],
}

impl NeuronNetworkState {
    pub fn validate(&self, params: &NeuronCircuitParams, path: &str) -> Result<()> {
        for value in [self.t, self.v1, self.v2, self.dv1, self.dv2] {
            if !value.is_finite() {
                return Err(Error::Config {
                    path: path.to_string(),
                    message: "state entries must be finite".to_string(),
                });
            }
        }
        for (i, (&r, law)) in self.r_mem.iter().zip(&params.mem_laws).enumerate() {
            if !(law.r_on..=law.r_off).contains(&r) {
                return Err(Error::Config {
                    path: format!("{path}.r_mem[{i}]"),
                    message: format!("must lie in [{}, {}]", law.r_on, law.r_off),
                });
            }
        }
        Ok(())
    }

    fn is_finite(&self) -> bool {
        [self.v1, self.v2, self.dv1, self.dv2]
            .iter()
            .chain(self.r_mem.iter())
            .all(|x| x.is_finite())
    }
}

/// Right-hand side of the first-order system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitRhs {
    pub dv1: f64,
    pub ddv1: f64,
    pub dv2: f64,
    pub ddv2: f64,
    pub dr: [f64; 4],
}

/// Evaluate the circuit equations at a state, solving each equation for the
/// second derivative. The memristance rates come from the relaxation law.
pub fn ode_rhs(state: &NeuronNetworkState, params: &NeuronCircuitParams) -> Result<CircuitRhs> {
    if !state.is_finite() {
        return Err(Error::IntegrationFault { t: state.t });
    }
    let mut dr = [0.0; 4];
    for i in 0..4 {
        let v_drive = if i < 2 { state.v1 } else { state.v2 };
        dr[i] = params.mem_laws[i].rate(state.r_mem[i], v_drive);
    }

    let denom1 = state.r_mem[1] * params.c1;
    let denom2 = state.r_mem[3] * params.c5;
    if denom1 <= 0.0 || denom2 <= 0.0 {
        return Err(Error::SingularCoefficient {
            t: state.t,
            detail: format!("R_mem*C products: {denom1:.3e}, {denom2:.3e}"),
        });
    }

    let damping1 = (state.r_mem[1] / params.r3
        + params.c1 / params.c2
        + dr[1] * params.c1
        + state.r_mem[0] / params.r4)
        / denom1;
    let stiffness1 = (1.0 / (params.r3 * params.c2) + dr[1] / params.r3) / denom1;
    let ddv1 = -damping1 * state.dv1 - stiffness1 * state.v1 - params.k1_coupled * state.v2;

    let damping2 = (state.r_mem[3] / params.r5
        + params.c5 / params.c6
        + dr[3] * params.c5
        + state.r_mem[2] / params.r6)
        / denom2;
    let stiffness2 = (1.0 / (params.r5 * params.c6) + dr[3] / params.r5) / denom2;
    let ddv2 = -damping2 * state.dv2 - stiffness2 * state.v2 - params.k2_coupled * state.v1;

    Ok(CircuitRhs {
        dv1: state.dv1,
        ddv1,
        dv2: state.dv2,
        ddv2,
        dr,
    })
}

/// Uniformly sampled voltage trace for one neuron, with any spikes extracted
/// from it so far.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    pub dt: f64,
    /// (t, v) pairs, strictly increasing t with constant step `dt`.
    pub samples: Vec<(f64, f64)>,
    pub spikes: Vec<Spike>,
}

fn rhs_at(y: &[f64; 8], t: f64, params: &NeuronCircuitParams) -> Result<[f64; 8]> {
    let state = NeuronNetworkState {
        t,
        v1: y[0],
        dv1: y[1],
        v2: y[2],
        dv2: y[3],
        r_mem: [y[4], y[5], y[6], y[7]],
    };
    let rhs = ode_rhs(&state, params)?;
    Ok([
        rhs.dv1, rhs.ddv1, rhs.dv2, rhs.ddv2, rhs.dr[0], rhs.dr[1], rhs.dr[2], rhs.dr[3],
    ])
}

/// Integrate the coupled circuit with fixed-step RK4 and return one voltage
/// train per neuron. Identical inputs give bit-identical outputs.
///
/// The shipped reference configuration is stable at dt = 1e-6 s: halving dt
/// changes v1(t_end) by less than 1e-4 relative (regression-tested).
pub fn simulate(
    params: &NeuronCircuitParams,
    initial: &NeuronNetworkState,
    dt: f64,
    t_end: f64,
) -> Result<(SpikeTrain, SpikeTrain)> {
    params.validate("circuit")?;
    initial.validate(params, "circuit.initial")?;
    if !(dt > 0.0) {
        return Err(Error::Config {
            path: "dt".to_string(),
            message: "must be > 0".to_string(),
        });
    }
    if t_end < dt {
        return Err(Error::Config {
            path: "t_end".to_string(),
            message: "must be >= dt".to_string(),
        });
    }

    let n_steps = ((t_end / dt).round() as usize).max(1);
    let mut y = [
        initial.v1,
        initial.dv1,
        initial.v2,
        initial.dv2,
        initial.r_mem[0],
        initial.r_mem[1],
        initial.r_mem[2],
        initial.r_mem[3],
    ];
    let t0 = initial.t;

    let mut train1 = Vec::with_capacity(n_steps + 1);
    let mut train2 = Vec::with_capacity(n_steps + 1);
    train1.push((t0, y[0]));
    train2.push((t0, y[2]));

    for step in 0..n_steps {
        let t = t0 + step as f64 * dt;
        let k1 = rhs_at(&y, t, params)?;
        let k2 = rhs_at(&advance(&y, &k1, dt * 0.5), t + dt * 0.5, params)?;
        let k3 = rhs_at(&advance(&y, &k2, dt * 0.5), t + dt * 0.5, params)?;
        let k4 = rhs_at(&advance(&y, &k3, dt), t + dt, params)?;
        for i in 0..8 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        // memristance bound invariant: r_on <= Rm <= r_off at all times
        for i in 0..4 {
            y[4 + i] = params.mem_laws[i].clamp(y[4 + i]);
        }
        let t_next = t0 + (step + 1) as f64 * dt;
        if !y.iter().all(|x| x.is_finite()) {
            return Err(Error::IntegrationFault { t: t_next });
        }
        train1.push((t_next, y[0]));
        train2.push((t_next, y[2]));
    }

    Ok((
        SpikeTrain {
            dt,
            samples: train1,
            spikes: Vec::new(),
        },
        SpikeTrain {
            dt,
            samples: train2,
            spikes: Vec::new(),
        },
    ))
}

fn advance(y: &[f64; 8], k: &[f64; 8], h: f64) -> [f64; 8] {
    let mut out = *y;
    for i in 0..8 {
        out[i] += h * k[i];
    }
    out
}

#[cfg(test)]
mod tests;
