//! Axis-parallel cubes (max-norm balls), including the degenerate radius-0
//! point cube and the infinite-radius cube that covers all of `R^n`.

use crate::error::{Error, Result};

/// An axis-parallel cube `{ x : |x_j - center_j| <= radius }`. A radius of
/// `f64::INFINITY` denotes the whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Input("cube needs a positive ambient dimension".into()));
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("cube center must be finite".into()));
        }
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::Input("cube radius must be nonnegative or infinite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// True when the cube is all of `R^n`.
    pub fn is_unbounded(&self) -> bool {
        self.radius.is_infinite()
    }

    /// Membership up to an absolute-plus-relative tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if self.is_unbounded() {
            return true;
        }
        x.iter()
            .zip(&self.center)
            .all(|(a, c)| (a - c).abs() <= self.radius + tol * (1.0 + c.abs().max(self.radius)))
    }

    /// Worst membership violation of `x` over all coordinates (0 inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        if self.is_unbounded() {
            return 0.0;
        }
        x.iter()
            .zip(&self.center)
            .map(|(a, c)| ((a - c).abs() - self.radius).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest coordinatewise gap between two cubes: the max-norm distance
    /// between them as sets (0 when they intersect, 0 if either is
    /// unbounded).
    pub fn gap(&self, other: &Cube) -> f64 {
        if self.is_unbounded() || other.is_unbounded() {
            return 0.0;
        }
        self.center
            .iter()
            .zip(&other.center)
            .map(|(a, b)| ((a - b).abs() - self.radius - other.radius).max(0.0))
            .fold(0.0, f64::max)
    }
}
