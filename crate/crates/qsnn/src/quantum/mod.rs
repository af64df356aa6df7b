//! Qubit (x) truncated-Fock operators, the pulse-angle Hamiltonian, and
//! Lindblad density-matrix propagation.

mod density;
mod hamiltonian;
mod lindblad;
mod operators;

pub use density::{bloch_vector, partial_trace_to_qubit, DensityMatrix};
pub use hamiltonian::{hamiltonian_at, HamiltonianParams, ThetaEntry, ThetaSchedule};
pub use lindblad::{
    evolve, lindblad_rhs, CollapseChannel, QuantumTrajectory, TRACE_DRIFT_TOL,
};
pub use operators::{
    annihilation_op, lift_qubit_op, lowering_op, number_op, pauli_x, pauli_y, pauli_z, FockConfig,
};

pub(crate) use hamiltonian::HamiltonianBuilder;
pub(crate) use lindblad::{integrate, RawTrajectory};
