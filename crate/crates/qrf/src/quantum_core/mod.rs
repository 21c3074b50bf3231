//! Exact finite-dimensional quantum objects: states, channels, measurements.

pub mod channel;
pub mod linalg;
pub mod random;
pub mod state;

pub use channel::{apply_channel, sample_measurement, Povm, QuantumChannel};
pub use linalg::{C64, CMat, CVec};
pub use state::{
    entanglement_entropy, fidelity, partial_trace, tensor, von_neumann_entropy, DensityOperator, QState, StateFile,
    StateVector,
};
