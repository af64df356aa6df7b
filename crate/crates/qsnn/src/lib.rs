pub mod analysis;
pub mod artifacts;
pub mod config;
pub mod decision;
pub mod error;
pub mod linalg;
pub mod network;
pub mod nonmarkov;
pub mod pipeline;
pub mod quantum;
pub mod spiking;

pub use error::{Error, Result};
