//! Hysteretic memristance law.
//!
//! Each memory resistor relaxes toward a voltage-selected target with a
//! single time constant and holds its value inside the dead band:
//!
//! ```text
//! dR/dt = (R_target(v) - R) / tau_switch
//! R_target = r_on   for v >= v_set
//!          = r_off  for v <= v_reset
//!          = R      otherwise (hold, dR/dt = 0)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemristanceLaw {
    /// Low (set) resistance.
    pub r_on: f64,
    /// High (reset) resistance.
    pub r_off: f64,
    /// Voltage at or above which R relaxes toward `r_on`.
    pub v_set: f64,
    /// Voltage at or below which R relaxes toward `r_off`.
    pub v_reset: f64,
    /// Relaxation time constant.
    pub tau_switch: f64,
}

impl MemristanceLaw {
    pub fn validate(&self, path: &str) -> Result<()> {
        let err = |field: &str, message: &str| {
            Err(Error::Config {
                path: format!("{path}.{field}"),
                message: message.to_string(),
            })
        };
        if !(self.r_on > 0.0) {
            return err("r_on", "must be > 0");
        }
        if !(self.r_off > self.r_on) {
            return err("r_off", "must be > r_on");
        }
        if !(self.v_set > self.v_reset) {
            return err("v_set", "must be > v_reset");
        }
        if !(self.tau_switch > 0.0) {
            return err("tau_switch", "must be > 0");
        }
        Ok(())
    }

    /// Relaxation target for a drive voltage, or `None` inside the dead band.
    pub fn target(&self, v: f64) -> Option<f64> {
        if v >= self.v_set {
            Some(self.r_on)
        } else if v <= self.v_reset {
            Some(self.r_off)
        } else {
            None
        }
    }

    /// Instantaneous dR/dt at resistance `r` under drive voltage `v`.
    pub fn rate(&self, r: f64, v: f64) -> f64 {
        match self.target(v) {
            Some(rt) => (rt - r) / self.tau_switch,
            None => 0.0,
        }
    }

    pub fn clamp(&self, r: f64) -> f64 {
        r.clamp(self.r_on, self.r_off)
    }
}

/// Advance one memristor by `dt` under a voltage held constant over the step.
///
/// The target is constant over the step, so the relaxation integrates in
/// closed form: `R(t+dt) = R_target + (R - R_target) * exp(-dt/tau)`.
/// Returns the clamped new resistance and the instantaneous dR/dt at the
/// start of the step.
pub fn memristance_step(r: f64, v: f64, law: &MemristanceLaw, dt: f64) -> Result<(f64, f64)> {
    if !v.is_finite() || !r.is_finite() {
        return Err(Error::IntegrationFault { t: f64::NAN });
    }
    debug_assert!(dt > 0.0);
    match law.target(v) {
        None => Ok((r, 0.0)),
        Some(rt) => {
            let rate = (rt - r) / law.tau_switch;
            let new_r = rt + (r - rt) * (-dt / law.tau_switch).exp();
            Ok((law.clamp(new_r), rate))
        }
    }
}
