//! Awareness classification of run measurements.
//!
//! Three bands map the burst spike count q, the backflow level, and the
//! sustained correlation onto an awareness class and a routing directive.
//! All comparisons are strict: a band matches when its open interval
//! contains q AND level > level_min AND correlation > corr_min. Inputs
//! matching no band fall through to `Unclassified` with directive "hold".

mod packet;

pub use packet::{InformationPacket, PacketContext, PacketWriter};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AwarenessClass {
    Regular,
    EnhancedAwareness,
    Elevated,
    Unclassified,
}

impl std::fmt::Display for AwarenessClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            AwarenessClass::Regular => "Regular",
            AwarenessClass::EnhancedAwareness => "EnhancedAwareness",
            AwarenessClass::Elevated => "Elevated",
            AwarenessClass::Unclassified => "Unclassified",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// Open interval (q_lo, q_hi): q matches when q_lo < q < q_hi.
    pub q_lo: u32,
    pub q_hi: u32,
    pub level_min: f64,
    pub corr_min: f64,
    pub class: AwarenessClass,
    pub directive: String,
}

impl Band {
    fn contains_q(&self, q: u32) -> bool {
        q > self.q_lo && q < self.q_hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationThresholds {
    pub bands: [Band; 3],
}

impl ClassificationThresholds {
    pub fn validate(&self, path: &str) -> Result<()> {
        for (i, band) in self.bands.iter().enumerate() {
            if !(band.level_min > 0.0) {
                return Err(Error::Config {
                    path: format!("{path}.bands[{i}].level_min"),
                    message: "must be > 0".to_string(),
                });
            }
            if !(band.corr_min > 0.0 && band.corr_min < 1.0) {
                return Err(Error::Config {
                    path: format!("{path}.bands[{i}].corr_min"),
                    message: "must lie in (0, 1)".to_string(),
                });
            }
            if band.q_lo >= band.q_hi {
                return Err(Error::Config {
                    path: format!("{path}.bands[{i}]"),
                    message: "q_lo must be < q_hi".to_string(),
                });
            }
        }
        // pairwise disjoint: no integer q may satisfy two open intervals
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (a, b) = (&self.bands[i], &self.bands[j]);
                if a.q_hi.min(b.q_hi) >= a.q_lo.max(b.q_lo) + 2 {
                    return Err(Error::Config {
                        path: format!("{path}.bands"),
                        message: format!("bands {i} and {j} share spike counts"),
                    });
                }
            }
        }
        Ok(())
    }
}

impl Default for ClassificationThresholds {
    fn default() -> Self {
        Self {
            bands: [
                Band {
                    q_lo: 3,
                    q_hi: 8,
                    level_min: 1.23,
                    corr_min: 0.85,
                    class: AwarenessClass::Regular,
                    directive: "continue generation".to_string(),
                },
                Band {
                    q_lo: 14,
                    q_hi: 20,
                    level_min: 0.21,
                    corr_min: 0.65,
                    class: AwarenessClass::EnhancedAwareness,
                    directive: "probe & read-out".to_string(),
                },
                Band {
                    q_lo: 22,
                    q_hi: 23,
                    level_min: 0.052,
                    corr_min: 0.55,
                    class: AwarenessClass::Elevated,
                    directive: "full route & reset".to_string(),
                },
            ],
        }
    }
}

/// Classify a measurement triple. Total: anything outside the bands (or
/// missing a strict threshold) is `Unclassified` / "hold".
pub fn classify(
    q: u32,
    level: f64,
    correlation: f64,
    thresholds: &ClassificationThresholds,
) -> (AwarenessClass, String) {
    for band in &thresholds.bands {
        if band.contains_q(q) {
            if level > band.level_min && correlation > band.corr_min {
                return (band.class, band.directive.clone());
            }
            break;
        }
    }
    (AwarenessClass::Unclassified, "hold".to_string())
}
