//! Prepare-and-measure dimension witnesses.
//!
//! The crate evaluates linear dimension witnesses on observed statistics,
//! computes exact classical bounds C_d by strategy enumeration and heuristic
//! quantum lower bounds Q_d by see-saw alternation, simulates a photonic
//! qubit/qutrit/quart experiment with delay-controlled decoherence, and
//! certifies the minimum dimension and quantum nature of a system from
//! measured counts.
//!
//! The `parallel` feature (on by default) parallelizes strategy enumeration,
//! see-saw restarts and delay scans with rayon; every result is identical
//! to the sequential fallback.

pub mod bounds;
pub mod classical;
pub mod error;
pub mod linalg;
pub mod photonic;
pub mod seesaw;
pub mod stats;
pub mod witness;

pub use bounds::{BoundResult, Model, Realization};
pub use error::Error;
