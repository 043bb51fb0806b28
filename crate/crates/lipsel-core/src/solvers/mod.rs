//! Numerical workhorses shared by the selection pipelines: a two-phase
//! simplex LP solver, Fourier–Motzkin projection with LP-certified redundancy
//! removal, and a simplex-constrained convex QP solver with KKT certificates.

pub mod ineq;
pub mod lp;
pub mod qp;

pub use ineq::{fm_eliminate, remove_redundant, InequalitySystem};
pub use lp::{solve_lp, LinearProgram, LpBuilder, LpOutcome, LpRow, Relation};
pub use qp::{solve_simplex_qp, QpSolution};
