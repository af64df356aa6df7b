//! Convex mixing of three reduced qubit states into the routing matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub w: [f64; 3],
}

impl MixtureWeights {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(w: [f64; 3]) -> Result<Self> {
        let weights = Self { w };
        weights.validate("network.weights")?;
        Ok(weights)
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Config {
                path: path.to_string(),
                message: "weights must be >= 0".to_string(),
            });
        }
        let sum: f64 = self.w.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::Config {
                path: path.to_string(),
                message: format!("weights must sum to 1 (got {sum})"),
            });
        }
        Ok(())
    }
}

impl Default for MixtureWeights {
    /// The (1/3, 1/2, 1/6) split; the three terms sum to exactly 1.0 in f64.
    fn default() -> Self {
        Self {
            w: [1.0 / 3.0, 0.5, 1.0 / 6.0],
        }
    }
}

/// Entrywise convex combination of three 2x2 states.
pub fn mix_density_matrices(
    rhos: &[DensityMatrix; 3],
    weights: &MixtureWeights,
) -> Result<DensityMatrix> {
    weights.validate("network.weights")?;
    for rho in rhos {
        if rho.dim() != 2 {
            return Err(Error::ShapeMismatch {
                expected: "2x2".to_string(),
                got: format!("{0}x{0}", rho.dim()),
            });
        }
    }
    let mixed = rhos[0].matrix().scale(weights.w[0])
        + rhos[1].matrix().scale(weights.w[1])
        + rhos[2].matrix().scale(weights.w[2]);
    DensityMatrix::new(mixed)
}
