//! Dynamical-map learning.
//!
//! Evolves a complete operator basis through the master equation and
//! assembles the superoperators E_n with rho(t_n) = E_n[rho(0)]. The basis
//! is Hermitized: diagonal matrix units evolve directly, and each (i, j)
//! pair evolves the two pure states (|i> + |j>)/sqrt(2) and
//! (|i> + i|j>)/sqrt(2), from which the matrix-unit columns follow by
//! linearity. The evolution runs in linear mode so the assembled maps are
//! exactly the linear RK4 flow.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{vectorize, CMatrix};
use crate::quantum::{integrate, CollapseChannel, FockConfig, HamiltonianBuilder, HamiltonianParams};

/// Discrete series of dynamical maps on the dt_map grid; `maps[0]` is the
/// identity superoperator.
#[derive(Debug, Clone)]
pub struct DynamicalMapSeries {
    pub dim: usize,
    pub dt_map: f64,
    pub maps: Vec<CMatrix>,
}

impl DynamicalMapSeries {
    /// Memory depth: number of maps beyond the identity.
    pub fn depth(&self) -> usize {
        self.maps.len().saturating_sub(1)
    }

    /// Largest deviation of tr(E_n[rho]) from tr(rho) over the matrix-unit
    /// basis; should be at integration round-off.
    pub fn trace_preservation_residual(&self) -> f64 {
        let dim = self.dim;
        let mut worst: f64 = 0.0;
        for map in &self.maps {
            for col in 0..dim * dim {
                let (r, s) = (col % dim, col / dim);
                // tr of the image of E_rs must equal tr(E_rs) = [r == s]
                let mut tr = C64::new(0.0, 0.0);
                for d in 0..dim {
                    tr += map[(d + d * dim, col)];
                }
                let expected = if r == s { 1.0 } else { 0.0 };
                worst = worst.max((tr - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }
}

fn matrix_unit(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Learn the dynamical maps E_0..E_k on the dt_map grid by evolving the
/// Hermitized operator basis. `dt_map` must be an integer multiple of `dt`.
pub fn learn_maps(
    p: &HamiltonianParams,
    channels: &[CollapseChannel],
    cfg: &FockConfig,
    dt: f64,
    dt_map: f64,
    k: usize,
) -> Result<DynamicalMapSeries> {
    if k < 1 {
        return Err(Error::Config {
            path: "ttm.memory_depth".to_string(),
            message: "at least one map is required".to_string(),
        });
    }
    if !(dt > 0.0) || !(dt_map > 0.0) {
        return Err(Error::Config {
            path: "ttm.dt_map".to_string(),
            message: "dt and dt_map must be > 0".to_string(),
        });
    }
    let ratio = dt_map / dt;
    let stride = ratio.round();
    if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Config {
            path: "ttm.dt_map".to_string(),
            message: format!("must be an integer multiple of dt (got ratio {ratio})"),
        });
    }
    let stride = stride as usize;
    p.validate("quantum")?;

    let dim = cfg.dim();
    let builder = HamiltonianBuilder::new(cfg);
    let h_at = |t: f64| builder.at(t, p);
    let run = |rho0: &CMatrix| -> Result<Vec<CMatrix>> {
        let raw = integrate(rho0, &h_at, channels, 0.0, dt, k * stride, stride, false)?;
        Ok(raw.states)
    };

    // diagonal basis states evolve directly
    let mut diag_runs = Vec::with_capacity(dim);
    for i in 0..dim {
        diag_runs.push(run(&matrix_unit(dim, i, i))?);
    }
    // each i < j pair contributes two Hermitized pure-state evolutions
    let mut pair_runs = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            let plus = (matrix_unit(dim, i, i)
                + matrix_unit(dim, j, j)
                + matrix_unit(dim, i, j)
                + matrix_unit(dim, j, i))
            .scale(0.5);
            let mut ymix = (matrix_unit(dim, i, i) + matrix_unit(dim, j, j)).scale(0.5);
            ymix[(i, j)] = C64::new(0.0, -0.5);
            ymix[(j, i)] = C64::new(0.0, 0.5);
            pair_runs.push(((i, j), run(&plus)?, run(&ymix)?));
        }
    }

    let mut maps = Vec::with_capacity(k + 1);
    maps.push(CMatrix::identity(dim * dim, dim * dim));
    let half_one_plus_i = C64::new(0.5, 0.5);
    for n in 1..=k {
        let mut e_n = CMatrix::zeros(dim * dim, dim * dim);
        for (i, states) in diag_runs.iter().enumerate() {
            e_n.set_column(i + i * dim, &vectorize(&states[n]));
        }
        for ((i, j), plus_states, y_states) in &pair_runs {
            let image = &plus_states[n] * C64::new(1.0, 0.0)
                + &y_states[n] * C64::new(0.0, 1.0)
                - (&diag_runs[*i][n] + &diag_runs[*j][n]) * half_one_plus_i;
            e_n.set_column(i + j * dim, &vectorize(&image));
            e_n.set_column(j + i * dim, &vectorize(&image.adjoint()));
        }
        maps.push(e_n);
    }

    let series = DynamicalMapSeries { dim, dt_map, maps };
    debug_assert!(series.trace_preservation_residual() < 1e-8);
    Ok(series)
}
