//! SU(2) and U(1) representation theory used throughout the crate.

pub mod cg;
pub mod decomposition;
pub mod special;
pub mod spin;
pub mod su2;
pub mod wigner;

pub use cg::clebsch_gordan;
pub use decomposition::{
    classical_message_count, couple_qubits, decomposition, multiplicity, IrrepBlock, IrrepDecomposition,
};
pub use special::{legendre, legendre_largest_zero, su2_character};
pub use spin::Spin;
pub use su2::{haar_sample_su2, Su2Element};
pub use wigner::{wigner_big_d, wigner_d};
