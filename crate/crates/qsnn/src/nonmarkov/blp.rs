//! Trace-distance non-Markovianity (information backflow) measure.
//!
//! The qubit is the system and the cavity plus collapse channels are its
//! environment: both members of a state pair evolve on the full space, the
//! cavity is traced out, and the qubit trace distance D(t) is scanned for
//! revivals. The reported level is the raw sum of positive increments
//! `sum max(0, D(t_{i+1}) - D(t_i))`, maximized over the pair set; no
//! rescaling is applied.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::quantum::{
    self, partial_trace_to_qubit, CollapseChannel, DensityMatrix, FockConfig, HamiltonianParams,
};

/// Positive increments below this threshold are treated as round-off, so a
/// report has level 0 exactly when it has no revival intervals.
pub const REVIVAL_TOL: f64 = 1e-12;

/// D(a, b) = half the sum of singular values of a - b.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", a.dim()),
            got: format!("{0}x{0}", b.dim()),
        });
    }
    Ok(trace_distance_mat(&(a.matrix() - b.matrix())))
}

fn trace_distance_mat(diff: &CMatrix) -> f64 {
    // the difference is Hermitian, so singular values are |eigenvalues|
    0.5 * hermitian_eigenvalues(diff).iter().map(|x| x.abs()).sum::<f64>()
}

/// An initial-state pair for the backflow scan.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub label: String,
    pub a: DensityMatrix,
    pub b: DensityMatrix,
}

/// Six antipodal Bloch pairs (three axes, three diagonals), each tensored
/// with the cavity vacuum.
pub fn default_pair_set(cfg: &FockConfig) -> Vec<StatePair> {
    let axes: [(&str, [f64; 3]); 6] = [
        ("z-axis", [0.0, 0.0, 1.0]),
        ("x-axis", [1.0, 0.0, 0.0]),
        ("y-axis", [0.0, 1.0, 0.0]),
        ("xz-diagonal", [std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2]),
        ("yz-diagonal", [0.0, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]),
        ("xy-diagonal", [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0]),
    ];
    axes.iter()
        .map(|(label, n)| StatePair {
            label: (*label).to_string(),
            a: bloch_state_with_vacuum(cfg, [n[0], n[1], n[2]]),
            b: bloch_state_with_vacuum(cfg, [-n[0], -n[1], -n[2]]),
        })
        .collect()
}

/// (I + n . sigma)/2 on the qubit, tensored with |0><0| on the cavity.
pub fn bloch_state_with_vacuum(cfg: &FockConfig, n: [f64; 3]) -> DensityMatrix {
    let qubit = (CMatrix::identity(2, 2)
        + quantum::pauli_x().scale(n[0])
        + quantum::pauli_y().scale(n[1])
        + quantum::pauli_z().scale(n[2]))
    .scale(0.5);
    let mut vacuum = CMatrix::zeros(cfg.fock_dim(), cfg.fock_dim());
    vacuum[(0, 0)] = num_complex::Complex64::new(1.0, 0.0);
    DensityMatrix::new(qubit.kronecker(&vacuum)).expect("valid Bloch product state")
}

#[derive(Debug, Clone, Serialize)]
pub struct NonMarkovianityReport {
    /// Raw backflow sum for the optimizing pair.
    pub level: f64,
    /// Maximal [t_start, t_end] windows over which D(t) increases.
    pub revival_intervals: Vec<(f64, f64)>,
    /// Label of the optimizing initial-state pair.
    pub pair_used: String,
}

/// Scan every pair, sum the positive trace-distance increments of the
/// reduced qubit states on the recorded grid, and report the maximum.
pub fn blp_measure(
    p: &HamiltonianParams,
    channels: &[CollapseChannel],
    cfg: &FockConfig,
    pairs: &[StatePair],
    dt: f64,
    t_end: f64,
) -> Result<NonMarkovianityReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("BLP pair set"));
    }
    let mut best: Option<NonMarkovianityReport> = None;
    for pair in pairs {
        let traj_a = quantum::evolve(&pair.a, p, channels, cfg, dt, t_end, 1)?;
        let traj_b = quantum::evolve(&pair.b, p, channels, cfg, dt, t_end, 1)?;
        let d: Vec<f64> = traj_a
            .states
            .iter()
            .zip(&traj_b.states)
            .map(|(a, b)| {
                let qa = partial_trace_to_qubit(a, cfg)?;
                let qb = partial_trace_to_qubit(b, cfg)?;
                trace_distance(&qa, &qb)
            })
            .collect::<Result<_>>()?;

        let mut level = 0.0;
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut open: Option<f64> = None;
        for (i, w) in d.windows(2).enumerate() {
            let increment = w[1] - w[0];
            if increment > REVIVAL_TOL {
                level += increment;
                if open.is_none() {
                    open = Some(traj_a.times[i]);
                }
            } else if let Some(start) = open.take() {
                intervals.push((start, traj_a.times[i]));
            }
        }
        if let Some(start) = open {
            intervals.push((start, *traj_a.times.last().unwrap()));
        }

        if best.as_ref().map_or(true, |b| level > b.level) {
            best = Some(NonMarkovianityReport {
                level,
                revival_intervals: intervals,
                pair_used: pair.label.clone(),
            });
        }
    }
    Ok(best.expect("non-empty pair set"))
}
