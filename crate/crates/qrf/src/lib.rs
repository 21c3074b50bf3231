//! Quantum reference frames, superselection rules and quantum information.
//!
//! The crate is organized bottom-up: exact quantum objects, SU(2)/U(1)
//! representation theory, group twirls, communication without a shared
//! frame, frame alignment, bounded frames, relational maps that lift
//! superselection rules, and resource measures.

pub mod align;
pub mod bounded;
pub mod checks;
pub mod comm;
pub mod error;
pub mod group_rep;
pub mod quantum_core;
pub mod resources;
pub mod rng;
pub mod ssr_lift;
pub mod twirl;

pub use error::{QrfError, Result};
