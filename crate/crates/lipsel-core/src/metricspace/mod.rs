//! Finite pseudometric spaces, weighted graphs with distortion certificates,
//! and moduli of continuity.

pub mod graph;
pub mod modulus;
pub mod space;

pub use graph::WeightedGraph;
pub use modulus::Modulus;
pub use space::{lipschitz_seminorm, Metric, PseudometricSpace};
