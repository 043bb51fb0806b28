//! Decomposition of the near-intersection of two flats into lower-dimensional
//! faces with proximity radii.
//!
//! Given flats `U1`, `U2` attached to an edge of weight `rho`, the points of
//! `U1` that can participate in a selection compatible with the edge lie in
//! the slab of `U1` within max-norm distance `2 rho` of `U2`. That slab is a
//! symmetric polyhedron in the coordinates of `U1`; each of its facet pairs
//! `|<a, t>| <= c` yields a face: the hyperplane of `U1` through the anchor
//! orthogonal to `a`, together with a radius `c / h(a)` bounding how far slab
//! points can sit from that face. Degenerate configurations (point flats,
//! directions contained in the partner, full-dimensional parallel flats,
//! infinite edge weight) produce containment or parallel faces instead.

use crate::error::{Error, Result};
use crate::geometry::affine::{orthonormal_complement, AffineSubspace};
use crate::solvers::ineq::{fm_eliminate, InequalitySystem};
use crate::solvers::lp::{solve_lp, LpBuilder, LpOutcome};
use crate::max_norm;

/// How a face participates in the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    /// Ordinary face: enters the recursive selection.
    Regular,
    /// Face of a full-dimensional parallel (or unconstrained) edge; carries
    /// an infinite radius and is excluded from the recursion.
    ParallelFullDim,
}

/// One face of a decomposition: a flat inside `U1` and a proximity radius.
#[derive(Clone, Debug)]
pub struct Face {
    pub flat: AffineSubspace,
    pub radius: f64,
    pub kind: FaceKind,
}

/// Which branch of the decomposition fired (diagnostic).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `U1` is a single point.
    PointSource,
    /// `dir U1` is contained in `dir U2` with room below the level cap.
    ContainedLowDim,
    /// `U1` and `U2` are parallel at the level cap (or the edge weight is
    /// infinite at the cap), so the edge imposes no finite constraint.
    ParallelFullDim,
    /// Proper slab: Fourier-Motzkin projection produced facet pairs.
    Slab,
    /// The slab projection was vacuous (numerical near-containment).
    SlabVacuous,
}

/// Result of decomposing one ordered edge.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub faces: Vec<Face>,
    pub branch: Branch,
}

/// Decompose the pair `(U1, U2)` at anchor `x1` (a point of `U1` nearest to
/// `U2`) for an edge of weight `rho`, at recursion level `level >= 1`.
pub fn decompose_intersection(
    u1: &AffineSubspace,
    u2: &AffineSubspace,
    x1: &[f64],
    rho: f64,
    level: usize,
    feas_tol: f64,
) -> Result<Decomposition> {
    let n = u1.ambient_dim();
    if u2.ambient_dim() != n || x1.len() != n {
        return Err(Error::Input("decomposition inputs disagree on ambient dimension".into()));
    }
    if level == 0 {
        return Err(Error::Internal("decomposition requested at level zero".into()));
    }
    if u1.dim() > level || u2.dim() > level {
        return Err(Error::Input(format!(
            "flat dimension {} exceeds the level cap {level}",
            u1.dim().max(u2.dim())
        )));
    }
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::Input("edge weight must be nonnegative or infinite".into()));
    }

    let d1 = u1.dim();
    if d1 == 0 {
        return Ok(Decomposition {
            faces: vec![Face {
                flat: u1.clone(),
                radius: 0.0,
                kind: FaceKind::Regular,
            }],
            branch: Branch::PointSource,
        });
    }

    let containment = |branch: Branch| -> Decomposition {
        if d1 < level {
            Decomposition {
                faces: vec![Face {
                    flat: u1.clone(),
                    radius: 0.0,
                    kind: FaceKind::Regular,
                }],
                branch,
            }
        } else {
            Decomposition {
                faces: vec![Face {
                    flat: AffineSubspace::from_point(x1.to_vec())
                        .expect("anchor is a valid point"),
                    radius: f64::INFINITY,
                    kind: FaceKind::ParallelFullDim,
                }],
                branch: Branch::ParallelFullDim,
            }
        }
    };

    // An infinite edge weight constrains nothing: same effect as containment.
    if rho.is_infinite() {
        return Ok(containment(Branch::ParallelFullDim));
    }
    if u1.direction_contained_in(u2, 1e-9) {
        return Ok(containment(if d1 < level {
            Branch::ContainedLowDim
        } else {
            Branch::ParallelFullDim
        }));
    }

    // Proper slab: |(B1 t - B2 s)_j| <= 2 rho, eliminate s.
    let d2 = u2.dim();
    let nv = d1 + d2;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        for sign in [1.0f64, -1.0] {
            let mut coeffs = vec![0.0; nv];
            for (i, b) in u1.basis().iter().enumerate() {
                coeffs[i] = sign * b[j];
            }
            for (i, b) in u2.basis().iter().enumerate() {
                coeffs[d1 + i] = -sign * b[j];
            }
            rows.push((coeffs, 2.0 * rho));
        }
    }
    let sys = InequalitySystem::new(nv, rows, true)?;
    let proj = fm_eliminate(&sys, &(d1..nv).collect::<Vec<_>>(), feas_tol)?;
    if proj.is_trivially_infeasible() {
        return Err(Error::Internal(
            "slab projection lost the origin, which is always feasible".into(),
        ));
    }

    // Collect facet pairs (a, c), a over the t coordinates only.
    let mut pairs: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut used = vec![false; proj.rows.len()];
    for i in 0..proj.rows.len() {
        if used[i] {
            continue;
        }
        let (coeffs, c) = &proj.rows[i];
        let a: Vec<f64> = coeffs[0..d1].to_vec();
        if max_norm(&a) <= 1e-10 {
            used[i] = true;
            continue; // vacuous row
        }
        let mut partner = None;
        for (j, (other, d)) in proj.rows.iter().enumerate().skip(i + 1) {
            if used[j] {
                continue;
            }
            let scale = 1.0 + max_norm(&a) + c.abs();
            let mirrored = (c - d).abs() <= 1e-8 * scale
                && a.iter()
                    .zip(&other[0..d1])
                    .all(|(x, y)| (x + y).abs() <= 1e-8 * scale);
            if mirrored {
                partner = Some(j);
                break;
            }
        }
        let j = partner.ok_or_else(|| {
            Error::Internal("slab projection row lacks its mirror".into())
        })?;
        used[i] = true;
        used[j] = true;
        pairs.push((a, *c));
    }

    if pairs.is_empty() {
        // The projection is all of the flat: numerically the edge does not
        // constrain U1 at all, which mirrors the containment situation.
        return Ok(match containment(Branch::ParallelFullDim) {
            Decomposition { faces, .. } => Decomposition {
                faces,
                branch: Branch::SlabVacuous,
            },
        });
    }

    let mut faces = Vec::with_capacity(pairs.len());
    for (a, c) in &pairs {
        let h = support_in_unit_cube(u1, a, feas_tol)?;
        if h <= 0.0 {
            return Err(Error::Internal("degenerate support value for a nonzero facet".into()));
        }
        let radius = c / h;
        // Face flat: x1 + B1 . (orthogonal complement of a in R^{d1}).
        let flat = if d1 == 1 {
            AffineSubspace::from_point(x1.to_vec())?
        } else {
            let comp = orthonormal_complement(a)?;
            let images: Vec<Vec<f64>> = comp
                .iter()
                .map(|w| {
                    let mut img = vec![0.0; n];
                    for (wk, b) in w.iter().zip(u1.basis()) {
                        for (ii, bi) in img.iter_mut().zip(b) {
                            *ii += wk * bi;
                        }
                    }
                    img
                })
                .collect();
            AffineSubspace::new(x1.to_vec(), images)?
        };
        faces.push(Face {
            flat,
            radius,
            kind: FaceKind::Regular,
        });
    }
    Ok(Decomposition {
        faces,
        branch: Branch::Slab,
    })
}

/// `h(a) = max { <a, t> : || B1 t ||_inf <= 1 }` - the support value of the
/// facet normal over the unit max-norm cube pulled back to `U1` coordinates.
fn support_in_unit_cube(u1: &AffineSubspace, a: &[f64], feas_tol: f64) -> Result<f64> {
    let d1 = u1.dim();
    let n = u1.ambient_dim();
    let mut b = LpBuilder::new(d1).minimize(a.iter().map(|x| -x).collect());
    for j in 0..n {
        for sign in [1.0f64, -1.0] {
            let coeffs: Vec<f64> = u1.basis().iter().map(|bv| sign * bv[j]).collect();
            b.le(coeffs, 1.0);
        }
    }
    match solve_lp(&b.build(), feas_tol)? {
        LpOutcome::Optimal { value, .. } => Ok(-value),
        _ => Err(Error::Internal(
            "support LP over the unit cube must have an optimum".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::affine::nearest_pair;

    fn line(p: [f64; 2], d: [f64; 2]) -> AffineSubspace {
        AffineSubspace::span(p.to_vec(), &[d.to_vec()]).unwrap()
    }

    #[test]
    fn crossed_axes_give_a_point_face_with_doubled_radius() {
        // U1 = x-axis, U2 = y-axis, rho = 1: points of the x-axis within
        // max-norm distance 2 of the y-axis form |t| <= 2, so the single
        // face is the origin with radius exactly 2.
        let u1 = line([0.0, 0.0], [1.0, 0.0]);
        let u2 = line([0.0, 0.0], [0.0, 1.0]);
        let dec = decompose_intersection(&u1, &u2, &[0.0, 0.0], 1.0, 1, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::Slab);
        assert_eq!(dec.faces.len(), 1);
        let f = &dec.faces[0];
        assert_eq!(f.flat.dim(), 0);
        assert_eq!(f.flat.point(), &[0.0, 0.0]);
        assert!((f.radius - 2.0).abs() < 1e-9, "radius = {}", f.radius);
    }

    #[test]
    fn parallel_lines_at_the_cap_are_parallel_faces() {
        let u1 = line([0.0, 0.0], [1.0, 0.0]);
        let u2 = line([0.0, 3.0], [2.0, 0.0]);
        let dec = decompose_intersection(&u1, &u2, &[0.0, 0.0], 1.0, 1, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::ParallelFullDim);
        assert_eq!(dec.faces.len(), 1);
        assert_eq!(dec.faces[0].kind, FaceKind::ParallelFullDim);
        assert!(dec.faces[0].radius.is_infinite());
    }

    #[test]
    fn contained_direction_below_the_cap_keeps_the_whole_flat() {
        let u1 = AffineSubspace::span(vec![0.0, 0.0, 1.0], &[vec![1.0, 0.0, 0.0]]).unwrap();
        let u2 = AffineSubspace::span(
            vec![0.0, 0.0, 0.0],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let dec =
            decompose_intersection(&u1, &u2, &[0.0, 0.0, 1.0], 0.5, 2, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::ContainedLowDim);
        assert_eq!(dec.faces.len(), 1);
        assert_eq!(dec.faces[0].radius, 0.0);
        assert_eq!(dec.faces[0].flat.dim(), 1);
    }

    #[test]
    fn infinite_edge_weight_is_unconstrained() {
        let u1 = line([0.0, 0.0], [1.0, 0.0]);
        let u2 = line([0.0, 1.0], [0.0, 1.0]);
        let dec =
            decompose_intersection(&u1, &u2, &[0.0, 0.0], f64::INFINITY, 1, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::ParallelFullDim);
        assert!(dec.faces[0].radius.is_infinite());
    }

    #[test]
    fn crossing_planes_give_line_faces_near_the_intersection() {
        // Two non-parallel planes in R^3 at level 2: the faces are lines
        // through the anchor, and every slab point must lie within the face
        // radius of some face.
        let u1 = AffineSubspace::span(
            vec![0.0, 0.0, 0.0],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let u2 = AffineSubspace::span(
            vec![0.0, 0.0, 0.5],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let anchor = nearest_pair(&u1, &u2, 1e-9).unwrap();
        let rho = 1.0;
        let dec =
            decompose_intersection(&u1, &u2, &anchor.x1, rho, 2, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::Slab);
        assert!(!dec.faces.is_empty());
        for f in &dec.faces {
            assert_eq!(f.flat.dim(), 1);
            assert!(f.radius.is_finite());
            assert!(f.radius >= 0.0);
        }
        // The slab here is |t_2| <= 2 rho in U1 coordinates (y-direction of
        // U1 is orthogonal to U2), so the unique face is the x-axis with
        // radius 2 rho.
        assert_eq!(dec.faces.len(), 1);
        let f = &dec.faces[0];
        assert!((f.radius - 2.0 * rho).abs() < 1e-8);
        assert!(f.flat.direction_contained_in(
            &AffineSubspace::span(vec![0.0; 3], &[vec![1.0, 0.0, 0.0]]).unwrap(),
            1e-8
        ));
    }

    #[test]
    fn slab_points_are_near_every_face() {
        // Slanted planes: sample points of U1 whose direction offset from
        // the anchor stays within the 2 rho slab of U2's direction space,
        // and verify each face's proximity radius bound.
        let u1 = AffineSubspace::span(
            vec![0.0, 0.0, 0.0],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let u2 = AffineSubspace::span(
            vec![0.2, -0.1, 0.3],
            &[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0]],
        )
        .unwrap();
        let anchor = nearest_pair(&u1, &u2, 1e-9).unwrap();
        let rho = 0.7;
        let dec =
            decompose_intersection(&u1, &u2, &anchor.x1, rho, 2, 1e-9).unwrap();
        assert_eq!(dec.branch, Branch::Slab);
        let u2_dir = AffineSubspace::new(vec![0.0; 3], u2.basis().to_vec()).unwrap();
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.5).collect();
        let mut checked = 0;
        for &t0 in &grid {
            for &t1 in &grid {
                // Direction offset tau from the anchor within U1.
                let offset = {
                    let mut v = vec![0.0; 3];
                    for (k, b) in u1.basis().iter().enumerate() {
                        let t = if k == 0 { t0 } else { t1 };
                        for (vi, bi) in v.iter_mut().zip(b) {
                            *vi += t * bi;
                        }
                    }
                    v
                };
                let off_flat = AffineSubspace::from_point(offset.clone()).unwrap();
                let d = nearest_pair(&off_flat, &u2_dir, 1e-9).unwrap().distance;
                if d <= 2.0 * rho {
                    checked += 1;
                    let p: Vec<f64> =
                        anchor.x1.iter().zip(&offset).map(|(a, o)| a + o).collect();
                    let pt = AffineSubspace::from_point(p.clone()).unwrap();
                    for f in &dec.faces {
                        let d_face =
                            nearest_pair(&pt, &f.flat, 1e-9).unwrap().distance;
                        assert!(
                            d_face <= f.radius + 1e-7,
                            "slab point {p:?} at distance {d_face} from a face of radius {}",
                            f.radius
                        );
                    }
                }
            }
        }
        assert!(checked > 10, "test grid missed the slab entirely");
    }
}
