//! Lipschitz selection for cube-valued maps.
//!
//! Each point of a pseudometric space carries an axis-parallel cube (possibly
//! a point, possibly all of space). If every two cubes can be bridged - the
//! coordinatewise gap between them never exceeds the distance - then a
//! selection with Lipschitz seminorm at most 1 exists, and each coordinate
//! can be resolved independently by a one-dimensional McShane-type extension:
//! take the pointwise minimum of upper endpoints propagated through the
//! metric, then propagate once more to cover the unbounded cubes.

use crate::error::{Error, Result};
use crate::geometry::Cube;
use crate::metricspace::Metric;

/// Compute a selection `f` with `f(m)` in `cubes[m]` and max-norm Lipschitz
/// seminorm at most 1 (up to roundoff) whenever the two-cube compatibility
/// condition holds; fails with [`Error::HypothesisFailure`] otherwise.
///
/// Coordinates of vertices that are infinitely far from every bounded cube
/// (or in a space with no bounded cube at all) are set to 0, which keeps the
/// seminorm bound because such pairs are never constrained.
pub fn select_cube<M: Metric>(space: &M, cubes: &[Cube], tol_feas: f64) -> Result<Vec<Vec<f64>>> {
    let m = space.len();
    if cubes.len() != m {
        return Err(Error::Input(format!(
            "{} cubes for {m} points",
            cubes.len()
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let n = cubes[0].dim();
    if cubes.iter().any(|c| c.dim() != n) {
        return Err(Error::Input("cubes must share one ambient dimension".into()));
    }

    let bounded: Vec<usize> = (0..m).filter(|&i| !cubes[i].is_unbounded()).collect();

    // Two-cube compatibility: gap(Q_i, Q_j) <= d(i, j), with a slack scaled
    // by every magnitude that enters the comparison.
    for (ai, &i) in bounded.iter().enumerate() {
        for &j in bounded.iter().skip(ai + 1) {
            let d = space.dist(i, j);
            if d.is_infinite() {
                continue;
            }
            let gap = cubes[i].gap(&cubes[j]);
            let scale = 1.0
                + d
                + cubes[i].radius
                + cubes[j].radius
                + crate::max_norm(&cubes[i].center)
                + crate::max_norm(&cubes[j].center);
            if gap > d + tol_feas * scale {
                return Err(Error::HypothesisFailure {
                    stage: "cube-compatibility".into(),
                    vertices: vec![i, j],
                    detail: format!(
                        "cube gap {gap:.6e} exceeds distance {d:.6e} between points {i} and {j}"
                    ),
                });
            }
        }
    }

    let mut points = vec![vec![0.0; n]; m];
    if bounded.is_empty() {
        return Ok(points);
    }

    // Zero-distance classes: vertices at pseudodistance 0 receive bitwise
    // identical McShane values (their candidate lists coincide), and the
    // containment nudge below must keep them identical or the seminorm
    // against a zero-distance pair becomes infinite.
    let rep: Vec<usize> = (0..m)
        .map(|i| (0..i).find(|&q| space.dist(i, q) == 0.0).unwrap_or(i))
        .collect();
    let classes: Vec<(usize, Vec<usize>)> = (0..m)
        .filter(|&i| rep[i] == i)
        .map(|i| (i, (0..m).filter(|&q| rep[q] == i).collect()))
        .collect();

    let mut f0 = vec![0.0f64; bounded.len()];
    for j in 0..n {
        // McShane step on the bounded part: minimum of propagated uppers.
        for (a, &i) in bounded.iter().enumerate() {
            let mut best = f64::INFINITY;
            for &q in &bounded {
                let d = space.dist(i, q);
                if d.is_infinite() {
                    continue;
                }
                let cand = cubes[q].center[j] + cubes[q].radius + d;
                if cand < best {
                    best = cand;
                }
            }
            f0[a] = best; // includes q = i, so finite
        }
        // Second propagation covers every vertex (bounded ones reproduce
        // their own value because f0 is 1-Lipschitz).
        for i in 0..m {
            let mut best = f64::INFINITY;
            for (a, &q) in bounded.iter().enumerate() {
                let d = space.dist(i, q);
                if d.is_infinite() {
                    continue;
                }
                let cand = f0[a] + d;
                if cand < best {
                    best = cand;
                }
            }
            points[i][j] = if best.is_finite() { best } else { 0.0 };
        }
        // The own-cube upper candidate is exact, but the McShane minimum can
        // come from a different witness whose sum rounds a few ulps below the
        // lower face. Nudge each class value into every bounded cube of the
        // class, using the same arithmetic as `Cube::violation`, so
        // containment is exact rather than up-to-roundoff.
        for (rep, members) in &classes {
            let faces: Vec<(f64, f64)> = members
                .iter()
                .filter(|&&q| !cubes[q].is_unbounded())
                .map(|&q| (cubes[q].center[j], cubes[q].radius))
                .collect();
            if faces.is_empty() {
                continue;
            }
            let lo = faces.iter().map(|(c, r)| c - r).fold(f64::NEG_INFINITY, f64::max);
            let hi = faces.iter().map(|(c, r)| c + r).fold(f64::INFINITY, f64::min);
            let mut v = points[*rep][j];
            if v < lo {
                v = lo;
            }
            if v > hi {
                v = hi;
            }
            let target = 0.5 * (lo + hi);
            let mut budget = 64;
            while faces.iter().any(|&(c, r)| (v - c).abs() > r) && budget > 0 && v != target {
                v = if v < target { v.next_up() } else { v.next_down() };
                budget -= 1;
            }
            for &q in members {
                points[q][j] = v;
            }
        }
    }
    Ok(points)
}
