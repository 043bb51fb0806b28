//! Lipschitz selections of set-valued mappings on finite pseudometric spaces
//! and weighted graphs, together with the applications built on top of them:
//!
//! * [`selection`] — the constructive selection engine: an inf-convolution
//!   selector for cube-valued maps and a recursive doubling construction for
//!   affine-set-valued maps `F : V -> A_k(R^n)`, with measured stage
//!   constants and validation reports.
//! * [`whitney`] — the bridge between Lipschitz selections over a space of
//!   point pairs and `C^{1,omega}` jets: given sampled scalar data, complete
//!   it to a jet whose Taylor and gradient moduli are controlled.
//! * [`envelope`] — explicit `C^{1,1}` extension of 1-jets and Kirszbraun
//!   extension of Lipschitz maps via convex envelopes of common-Hessian
//!   quadratic families (biconjugate evaluation by a small dense QP).
//! * [`linsys`] — Holder-continuous solutions of pointwise-sampled linear
//!   systems `A(x) f(x) = b(x)` through the affine selection engine.
//! * [`solvers`] — the shared numerical substrate: a dense two-phase simplex
//!   with Bland's rule, Fourier–Motzkin elimination with redundancy removal,
//!   and the strongly concave envelope QP.
//! * [`geometry`], [`metricspace`] — affine subspaces, cubes, intersection
//!   decompositions, pseudometric spaces, weighted graphs and concave moduli.
//! * [`oracle`] — independent ground-truth routes (LP-optimal selections,
//!   subset finiteness scans, grid Caratheodory envelopes) used to cross-check
//!   the constructive pipeline; they share only the LP solver with it.
//! * [`instances`] — seeded, deterministic instance generators used by the
//!   acceptance suite and the bench harness.
//!
//! All computations are deterministic: LP pivoting uses Bland's rule, ties in
//! geometric choices are broken lexicographically, and randomness appears only
//! in the seeded generators of [`instances`].

pub mod envelope;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod linsys;
pub mod metricspace;
pub mod oracle;
pub mod selection;
pub mod solvers;
pub mod whitney;

pub use error::{Error, Result};

/// Global numeric tolerances threaded through the pipelines.
///
/// `feas` guards feasibility decisions (LP constraint satisfaction, anchor
/// distance checks, 2-point hypothesis slack); `kkt` bounds the accepted KKT
/// residual of the envelope QP. Both are configurable from the CLI.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Feasibility tolerance (default `1e-9`).
    pub feas: f64,
    /// KKT residual tolerance for the envelope QP (default `1e-8`).
    pub kkt: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { feas: 1e-9, kkt: 1e-8 }
    }
}

/// Maximum norm of a vector.
pub fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Maximum-norm distance between two vectors of equal length.
pub fn max_norm_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Euclidean norm of a vector.
pub fn euclid_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean distance between two vectors of equal length.
pub fn euclid_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Inner product of two vectors of equal length.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
