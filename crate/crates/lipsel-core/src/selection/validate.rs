//! Post-hoc validation of a computed selection: membership of each point on
//! its flat, the Lipschitz seminorm against the original metric, and the
//! proximity guarantee relating cube-stage deviations to face radii.

use crate::error::{Error, Result};
use crate::geometry::AffineSubspace;
use crate::metricspace::{lipschitz_seminorm, Metric, PseudometricSpace};
use crate::selection::affine_select::Selection;

/// Outcome of [`validate_selection`]; every field is recomputed from the
/// selection, not copied from its diagnostics.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Max-norm Lipschitz seminorm of the points over the space.
    pub seminorm: f64,
    /// Largest max-norm distance from a selected point to its flat.
    pub max_membership_residual: f64,
    /// Largest ratio `deviation / (lambda * min_radius)` over the recorded
    /// cube-stage deviations (0 when none were recorded, or all radii were
    /// zero with zero deviation).
    pub worst_proximity_ratio: f64,
}

/// Check a selection against the data that produced it.
///
/// Fails with [`Error::Internal`] when a point strays from its flat beyond
/// `tol`, or when a recorded cube-stage deviation exceeds the proximity
/// bound `lambda * min_radius` beyond slack - either indicates a bug, not
/// bad input.
pub fn validate_selection(
    space: &PseudometricSpace,
    flats: &[AffineSubspace],
    selection: &Selection,
    tol: f64,
) -> Result<ValidationReport> {
    if flats.len() != selection.points.len() || space.len() != flats.len() {
        return Err(Error::Input(
            "selection, flats and space must agree in size".into(),
        ));
    }
    let mut max_membership = 0.0f64;
    for (f, p) in flats.iter().zip(&selection.points) {
        let r = f.projection_residual(p);
        max_membership = max_membership.max(r);
        if r > tol * (1.0 + crate::max_norm(p)) {
            return Err(Error::Internal(format!(
                "selected point {p:?} misses its flat by {r:.3e}"
            )));
        }
    }
    let lambda = selection.diagnostics.lambda;
    let mut worst_ratio = 0.0f64;
    for rec in &selection.diagnostics.center_deviations {
        let bound = lambda * rec.min_radius;
        if rec.deviation > bound + tol * (1.0 + bound) {
            return Err(Error::Internal(format!(
                "vertex {}: cube-stage deviation {:.3e} exceeds proximity bound {:.3e}",
                rec.vertex, rec.deviation, bound
            )));
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(rec.deviation / bound);
        }
    }
    Ok(ValidationReport {
        seminorm: lipschitz_seminorm(&space, &selection.points),
        max_membership_residual: max_membership,
        worst_proximity_ratio: worst_ratio,
    })
}
