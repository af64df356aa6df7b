//! Spike extraction and derivative phase portraits for voltage trains.

use serde::{Deserialize, Serialize};

use super::SpikeTrain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub t_peak: f64,
    pub v_peak: f64,
}

/// Count above-threshold spikes. A spike is a maximal contiguous run of
/// samples with `v >= threshold`, counted once at its maximum.
pub fn count_spikes(train: &SpikeTrain, threshold: f64) -> Result<(usize, Vec<Spike>)> {
    if train.samples.is_empty() {
        return Err(Error::EmptyInput("spike train has no samples"));
    }
    let mut spikes = Vec::new();
    let mut current: Option<Spike> = None;
    for &(t, v) in &train.samples {
        if v >= threshold {
            match &mut current {
                Some(peak) if v > peak.v_peak => *peak = Spike { t_peak: t, v_peak: v },
                Some(_) => {}
                None => current = Some(Spike { t_peak: t, v_peak: v }),
            }
        } else if let Some(peak) = current.take() {
            spikes.push(peak);
        }
    }
    if let Some(peak) = current {
        spikes.push(peak);
    }
    Ok((spikes.len(), spikes))
}

/// First vs. second derivative of the voltage trace, by second-order finite
/// differences (central stencils inside, one-sided at the endpoints).
pub fn phase_portrait(train: &SpikeTrain) -> Result<Vec<(f64, f64)>> {
    let v: Vec<f64> = train.samples.iter().map(|&(_, v)| v).collect();
    let n = v.len();
    if n < 5 {
        return Err(Error::InsufficientData { needed: 5, got: n });
    }
    let dt = train.dt;
    let dt2 = dt * dt;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d1 = if i == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
        } else if i == n - 1 {
            (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * dt)
        };
        let d2 = if i == 0 {
            (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dt2
        } else if i == n - 1 {
            (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / dt2
        } else {
            (v[i + 1] - 2.0 * v[i] + v[i - 1]) / dt2
        };
        out.push((d1, d2));
    }
    Ok(out)
}
