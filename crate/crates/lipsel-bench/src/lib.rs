//! Shared fixtures for the criterion benchmarks: deterministic instance
//! construction wrappers so every benchmark run measures the same inputs.

pub use lipsel_core as core;
