//! Non-Markovian propagation and measurement: dynamical-map learning,
//! transfer-tensor compression, and the trace-distance backflow level.

mod blp;
mod maps;
mod ttm;

pub use blp::{
    blp_measure, bloch_state_with_vacuum, default_pair_set, trace_distance,
    NonMarkovianityReport, StatePair, REVIVAL_TOL,
};
pub use maps::{learn_maps, DynamicalMapSeries};
pub use ttm::{compute_transfer_tensors, ttm_propagate, TransferTensorSeries, TtmTrajectory};
