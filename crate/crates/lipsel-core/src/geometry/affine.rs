//! Affine subspaces (flats) of `R^n` with orthonormal direction bases, and
//! canonical nearest pairs between two flats under the max norm.

use crate::error::{Error, Result};
use crate::solvers::lp::{solve_lp, LpBuilder, LpOutcome};
use crate::{dot, euclid_norm, max_norm};

/// Orthonormality / rank tolerance for direction bases.
const ORTHO_TOL: f64 = 1e-9;
/// Relative rank cutoff when spanning a flat from raw vectors.
const RANK_TOL: f64 = 1e-10;

/// An affine subspace `point + span(basis)` of `R^n`. The direction basis is
/// orthonormal in the Euclidean inner product; a flat with an empty basis is
/// a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    point: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffineSubspace {
    /// Build a flat from a base point and an orthonormal direction basis.
    pub fn new(point: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = point.len();
        if n == 0 {
            return Err(Error::Input("flat needs a positive ambient dimension".into()));
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("flat base point must be finite".into()));
        }
        if basis.len() > n {
            return Err(Error::Input(format!(
                "flat has {} direction vectors in ambient dimension {n}",
                basis.len()
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != n {
                return Err(Error::Input(format!(
                    "direction vector {i} has length {}, expected {n}",
                    b.len()
                )));
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input("direction vectors must be finite".into()));
            }
            for (j, c) in basis.iter().enumerate().take(i + 1) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(b, c) - want).abs() > ORTHO_TOL {
                    return Err(Error::Input(format!(
                        "direction basis is not orthonormal (pair {j},{i})"
                    )));
                }
            }
        }
        Ok(Self { point, basis })
    }

    /// A zero-dimensional flat: a single point.
    pub fn from_point(point: Vec<f64>) -> Result<Self> {
        Self::new(point, Vec::new())
    }

    /// Span a flat through `point` by raw (not necessarily independent)
    /// direction vectors, orthonormalizing by modified Gram-Schmidt with
    /// re-orthogonalization and dropping numerically dependent vectors.
    pub fn span(point: Vec<f64>, raw: &[Vec<f64>]) -> Result<Self> {
        let n = point.len();
        let scale = raw
            .iter()
            .map(|v| euclid_norm(v))
            .fold(1.0f64, f64::max);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in raw {
            if v.len() != n {
                return Err(Error::Input("direction vector length mismatch".into()));
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= p * bi;
                    }
                }
            }
            let norm = euclid_norm(&w);
            if norm > RANK_TOL * scale {
                for wi in w.iter_mut() {
                    *wi /= norm;
                }
                basis.push(w);
            }
        }
        Self::new(point, basis)
    }

    /// The affine hull of a point set: anchored at the first point, spanned
    /// by differences to it.
    pub fn hull(points: &[Vec<f64>]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Input("affine hull of an empty point set".into()))?;
        let raw: Vec<Vec<f64>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
            .collect();
        Self::span(first.clone(), &raw)
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Dimension of the flat (number of direction vectors).
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    /// Euclidean orthogonal projection of `x` onto the flat.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.point.clone();
        for b in &self.basis {
            let diff: Vec<f64> = x.iter().zip(&self.point).map(|(a, p)| a - p).collect();
            let t = dot(&diff, b);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += t * bi;
            }
        }
        out
    }

    /// The point `point + basis . t` for coordinates `t` in the basis.
    pub fn at(&self, t: &[f64]) -> Vec<f64> {
        let mut out = self.point.clone();
        for (ti, b) in t.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += ti * bi;
            }
        }
        out
    }

    /// Max-norm distance from `x` to the flat's nearest Euclidean projection.
    pub fn projection_residual(&self, x: &[f64]) -> f64 {
        let p = self.project(x);
        x.iter()
            .zip(&p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when `x` lies on the flat up to a relative tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.projection_residual(x) <= tol * (1.0 + max_norm(x))
    }

    /// True when this flat's direction space is contained in `other`'s.
    pub fn direction_contained_in(&self, other: &AffineSubspace, tol: f64) -> bool {
        self.basis.iter().all(|b| {
            let mut res = b.clone();
            for c in &other.basis {
                let p = dot(&res, c);
                for (ri, ci) in res.iter_mut().zip(c) {
                    *ri -= p * ci;
                }
            }
            max_norm(&res) <= tol
        })
    }

    /// True when the two flats are translates of the same direction space.
    pub fn parallel_to(&self, other: &AffineSubspace, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.direction_contained_in(other, tol)
            && other.direction_contained_in(self, tol)
    }

    /// Intersection of two flats, or `None` when they miss each other by
    /// more than `tol` (relative to the anchors' size).
    ///
    /// The intersection is the solution set of
    /// `(I - B2 B2^T)(p1 + B1 t - p2) = 0` in the parameters `t` of `self`,
    /// solved by singular value decomposition: the least-squares particular
    /// solution anchors the result, the null directions of the system span
    /// it.
    pub fn intersect(&self, other: &AffineSubspace, tol: f64) -> Result<Option<AffineSubspace>> {
        let n = self.ambient_dim();
        if other.ambient_dim() != n {
            return Err(Error::Input(
                "intersecting flats of different ambient dimensions".into(),
            ));
        }
        let scale = 1.0 + max_norm(&self.point) + max_norm(&other.point);
        // Residual of a candidate point against `other`, in the max norm.
        let miss = |x: &[f64]| other.projection_residual(x);
        if self.dim() == 0 {
            return Ok(if miss(&self.point) <= tol * scale {
                Some(self.clone())
            } else {
                None
            });
        }
        if other.dim() == 0 {
            return Ok(if self.projection_residual(&other.point) <= tol * scale {
                Some(other.clone())
            } else {
                None
            });
        }

        let d1 = self.dim();
        let b1 = nalgebra::DMatrix::from_fn(n, d1, |i, j| self.basis[j][i]);
        let b2 = nalgebra::DMatrix::from_fn(n, other.dim(), |i, j| other.basis[j][i]);
        let proj_out = nalgebra::DMatrix::identity(n, n) - &b2 * b2.transpose();
        let m = &proj_out * &b1;
        let rhs = &proj_out
            * nalgebra::DVector::from_fn(n, |i, _| other.point[i] - self.point[i]);
        let svd = m.clone().svd(true, true);
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let rank_tol = RANK_TOL * sigma_max.max(1.0);
        let t0 = svd
            .solve(&rhs, rank_tol)
            .map_err(|e| Error::Internal(format!("flat intersection solve: {e}")))?;
        if (&m * &t0 - &rhs).amax() > tol * scale {
            return Ok(None);
        }
        let anchor: Vec<f64> = (0..n)
            .map(|i| self.point[i] + (0..d1).map(|j| b1[(i, j)] * t0[j]).sum::<f64>())
            .collect();
        let v_t = svd
            .v_t
            .as_ref()
            .expect("v_t requested from svd");
        let mut dirs = Vec::new();
        for r in 0..v_t.nrows() {
            if svd.singular_values[r] <= rank_tol {
                let t_dir = v_t.row(r);
                dirs.push(
                    (0..n)
                        .map(|i| (0..d1).map(|j| b1[(i, j)] * t_dir[j]).sum::<f64>())
                        .collect::<Vec<f64>>(),
                );
            }
        }
        Ok(Some(AffineSubspace::span(anchor, &dirs)?))
    }
}

/// Complete `v / |v|` to an orthonormal basis of `R^n` and return the
/// complement: an orthonormal basis of the hyperplane `v ^ perp`.
pub fn orthonormal_complement(v: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = v.len();
    let norm = euclid_norm(v);
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::Input("complement of a zero or non-finite vector".into()));
    }
    let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let mut basis = vec![unit];
    for i in 0..n {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= p * bi;
                }
            }
        }
        let wn = euclid_norm(&w);
        if wn > 1e-6 {
            for wi in w.iter_mut() {
                *wi /= wn;
            }
            basis.push(w);
        }
        if basis.len() == n {
            break;
        }
    }
    if basis.len() != n {
        return Err(Error::Internal("failed to complete an orthonormal basis".into()));
    }
    basis.remove(0);
    Ok(basis)
}

/// The hyperplane `{ z : <normal, z> = offset }`.
pub fn hyperplane(normal: &[f64], offset: f64) -> Result<AffineSubspace> {
    let nn = euclid_norm(normal);
    if nn <= 0.0 || !nn.is_finite() || !offset.is_finite() {
        return Err(Error::Input("hyperplane needs a nonzero finite normal".into()));
    }
    let point: Vec<f64> = normal.iter().map(|x| x * offset / (nn * nn)).collect();
    AffineSubspace::new(point, orthonormal_complement(normal)?)
}

/// A canonical pair of mutually nearest points on two flats.
#[derive(Clone, Debug)]
pub struct NearestPair {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// Max-norm distance between the flats (realized by `x1`, `x2` up to the
    /// canonicalization slack).
    pub distance: f64,
}

/// Compute the max-norm distance between two flats and a canonical pair
/// realizing it.
///
/// The optimal face of the distance LP can contain many pairs; to make the
/// output a deterministic, scale-consistent function of the flats alone, each
/// coordinate of `x1` and then `x2` is canonicalized in turn by minimizing
/// its absolute value and then its signed value, pinning it before moving on.
pub fn nearest_pair(u1: &AffineSubspace, u2: &AffineSubspace, feas_tol: f64) -> Result<NearestPair> {
    let n = u1.ambient_dim();
    if u2.ambient_dim() != n {
        return Err(Error::Input("flats live in different ambient dimensions".into()));
    }
    let d1 = u1.dim();
    let d2 = u2.dim();
    if d1 == 0 && d2 == 0 {
        // Two points: no optimization needed.
        return Ok(NearestPair {
            x1: u1.point().to_vec(),
            x2: u2.point().to_vec(),
            distance: crate::max_norm_dist(u1.point(), u2.point()),
        });
    }
    // Variables: t (d1) | s (d2) | d.
    let nv = d1 + d2 + 1;
    let d_col = d1 + d2;

    // Rows shared by every stage: +/- (x1(t) - x2(s))_j <= d.
    let mut base_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        for sign in [1.0f64, -1.0] {
            let mut coeffs = vec![0.0; nv];
            for (i, b) in u1.basis().iter().enumerate() {
                coeffs[i] = sign * b[j];
            }
            for (i, b) in u2.basis().iter().enumerate() {
                coeffs[d1 + i] = -sign * b[j];
            }
            coeffs[d_col] = -1.0;
            base_rows.push((coeffs, sign * (u2.point()[j] - u1.point()[j])));
        }
    }

    let solve_stage = |rows: &[(Vec<f64>, f64)], objective: Vec<f64>| -> Result<Vec<f64>> {
        let mut b = LpBuilder::new(nv).minimize(objective);
        for (coeffs, rhs) in rows {
            b.le(coeffs.clone(), *rhs);
        }
        match solve_lp(&b.build(), feas_tol)? {
            LpOutcome::Optimal { x, .. } => Ok(x),
            LpOutcome::Infeasible => Err(Error::Internal(
                "nearest-pair stage is infeasible despite slack pins".into(),
            )),
            LpOutcome::Unbounded => Err(Error::Internal(
                "nearest-pair stage is unbounded despite abs-value pinning".into(),
            )),
        }
    };

    // Stage one: minimize the distance variable itself.
    let mut obj = vec![0.0; nv];
    obj[d_col] = 1.0;
    let x = solve_stage(&base_rows, obj)?;
    let distance = x[d_col];

    // Stage two: among distance-optimal pairs (the optimal face can be
    // unbounded, e.g. for parallel flats), pick the pair minimizing the sum
    // of output-coordinate magnitudes. A single auxiliary LP with one mild
    // distance slab keeps the anchors bounded and deterministic; stacking
    // per-coordinate pins instead would narrow the feasible set into slivers
    // thinner than the simplex tolerances can navigate. If the auxiliary LP
    // fails numerically, the stage-one vertex is still a valid nearest pair.
    // Variables: t (d1) | s (d2) | d | u1 (n) | u2 (n).
    let nv2 = nv + 2 * n;
    let mut rows2: Vec<(Vec<f64>, f64)> = Vec::with_capacity(base_rows.len() + 1 + 4 * n);
    for (coeffs, rhs) in &base_rows {
        let mut r = coeffs.clone();
        r.resize(nv2, 0.0);
        rows2.push((r, *rhs));
    }
    {
        let mut d_coeffs = vec![0.0; nv2];
        d_coeffs[d_col] = 1.0;
        rows2.push((d_coeffs, distance + 1e-9 * (1.0 + distance.abs())));
    }
    let mut obj2 = vec![0.0; nv2];
    for (which, flat) in [(0usize, u1), (1usize, u2)] {
        let var_base = if which == 0 { 0 } else { d1 };
        for j in 0..n {
            let uj = nv + which * n + j;
            obj2[uj] = 1.0;
            // +/- (flat coordinate j) <= u_j.
            for sign in [1.0f64, -1.0] {
                let mut r = vec![0.0; nv2];
                for (i, b) in flat.basis().iter().enumerate() {
                    r[var_base + i] = sign * b[j];
                }
                r[uj] = -1.0;
                rows2.push((r, -sign * flat.point()[j]));
            }
        }
    }
    let final_x = {
        let mut b = LpBuilder::new(nv2).minimize(obj2);
        for (coeffs, rhs) in &rows2 {
            b.le(coeffs.clone(), *rhs);
        }
        match solve_lp(&b.build(), feas_tol) {
            Ok(LpOutcome::Optimal { x: sol, .. }) => sol,
            Ok(_) | Err(Error::Internal(_)) => x.clone(),
            Err(e) => return Err(e),
        }
    };

    let t = &final_x[0..d1];
    let s = &final_x[d1..d1 + d2];
    Ok(NearestPair {
        x1: u1.at(t),
        x2: u2.at(s),
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::max_norm_dist;

    #[test]
    fn span_drops_dependent_vectors() {
        let flat = AffineSubspace::span(
            vec![0.0, 0.0, 0.0],
            &[
                vec![1.0, 0.0, 0.0],
                vec![2.0, 0.0, 0.0],
                vec![1.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(flat.dim(), 2);
        assert!(flat.contains(&[3.5, -2.0, 0.0], 1e-9));
        assert!(!flat.contains(&[0.0, 0.0, 0.1], 1e-9));
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        let flat = AffineSubspace::span(
            vec![1.0, 1.0, 1.0],
            &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]],
        )
        .unwrap();
        let x = vec![3.0, -1.0, 0.5];
        let p = flat.project(&x);
        let pp = flat.project(&p);
        assert!(max_norm_dist(&p, &pp) < 1e-12);
        // Residual is Euclidean-orthogonal to every basis vector.
        let res: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        for b in flat.basis() {
            assert!(dot(&res, b).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperplane_contains_solutions() {
        let h = hyperplane(&[1.0, 2.0, -1.0], 3.0).unwrap();
        assert_eq!(h.dim(), 2);
        assert!(h.contains(&[3.0, 0.0, 0.0], 1e-9));
        assert!(h.contains(&[1.0, 1.0, 0.0], 1e-9));
        assert!(!h.contains(&[0.0, 0.0, 0.0], 1e-9));
    }

    #[test]
    fn nearest_pair_between_parallel_lines() {
        // Lines y = 0 and y = 3 in the plane: distance 3, and the canonical
        // pair minimizes |x| on both lines, landing at the origin column.
        let l1 = AffineSubspace::span(vec![7.0, 0.0], &[vec![1.0, 0.0]]).unwrap();
        let l2 = AffineSubspace::span(vec![-4.0, 3.0], &[vec![1.0, 0.0]]).unwrap();
        let p = nearest_pair(&l1, &l2, 1e-9).unwrap();
        assert!((p.distance - 3.0).abs() < 1e-7);
        assert!(max_norm(&p.x1[..1]) < 1e-6, "x1 = {:?}", p.x1);
        assert!(max_norm(&p.x2[..1]) < 1e-6, "x2 = {:?}", p.x2);
        assert!((p.x2[1] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn nearest_pair_of_crossing_lines_is_the_crossing() {
        let l1 = AffineSubspace::span(vec![0.0, 1.0], &[vec![1.0, 1.0]]).unwrap();
        let l2 = AffineSubspace::span(vec![0.0, -1.0], &[vec![1.0, -1.0]]).unwrap();
        let p = nearest_pair(&l1, &l2, 1e-9).unwrap();
        assert!(p.distance < 1e-9);
        // Crossing of y = x + 1 and y = -x - 1 is (-1, 0).
        assert!(max_norm_dist(&p.x1, &[-1.0, 0.0]) < 1e-6);
        assert!(max_norm_dist(&p.x2, &[-1.0, 0.0]) < 1e-6);
    }

    #[test]
    fn nearest_pair_max_norm_differs_from_euclidean() {
        // Point vs diagonal line: under the max norm the distance to the
        // line x = y through the origin from (1, 0) is 1/2 (at (1/2, 1/2)),
        // not the Euclidean sqrt(2)/2 scaled value.
        let pt = AffineSubspace::from_point(vec![1.0, 0.0]).unwrap();
        let diag = AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 1.0]]).unwrap();
        let p = nearest_pair(&pt, &diag, 1e-9).unwrap();
        assert!((p.distance - 0.5).abs() < 1e-7);
        assert!(max_norm_dist(&p.x2, &[0.5, 0.5]) < 1e-6);
    }

    #[test]
    fn nearest_pair_is_swap_consistent() {
        let a = AffineSubspace::span(vec![0.5, 2.0, -1.0], &[vec![1.0, 0.0, 1.0]]).unwrap();
        let b = AffineSubspace::span(vec![0.0, -1.0, 3.0], &[vec![0.0, 1.0, 0.0]]).unwrap();
        let p1 = nearest_pair(&a, &b, 1e-9).unwrap();
        let p2 = nearest_pair(&b, &a, 1e-9).unwrap();
        assert!((p1.distance - p2.distance).abs() < 1e-9);
        assert!(max_norm_dist(&p1.x1, &p1.x1) < 1e-12);
        assert!(crate::max_norm_dist(&p1.x1, &p2.x2) < 1e-6);
        assert!(crate::max_norm_dist(&p1.x2, &p2.x1) < 1e-6);
    }

    #[test]
    fn direction_containment_and_parallelism() {
        let line = AffineSubspace::span(vec![0.0, 0.0, 0.0], &[vec![1.0, 1.0, 0.0]]).unwrap();
        let plane =
            AffineSubspace::span(vec![5.0, 5.0, 5.0], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
                .unwrap();
        assert!(line.direction_contained_in(&plane, 1e-9));
        assert!(!plane.direction_contained_in(&line, 1e-9));
        let shifted = AffineSubspace::span(vec![0.0, 9.0, 0.0], &[vec![-2.0, -2.0, 0.0]]).unwrap();
        assert!(line.parallel_to(&shifted, 1e-9));
        assert!(!line.parallel_to(&plane, 1e-9));
    }

    #[test]
    fn intersect_crossing_lines_is_a_point() {
        let a = AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 1.0]]).unwrap();
        let b = AffineSubspace::span(vec![2.0, 0.0], &[vec![1.0, -1.0]]).unwrap();
        let k = a.intersect(&b, 1e-9).unwrap().unwrap();
        assert_eq!(k.dim(), 0);
        assert!(max_norm_dist(k.point(), &[1.0, 1.0]) < 1e-9);
    }

    #[test]
    fn intersect_identical_lines_in_different_representations() {
        let a = AffineSubspace::span(vec![0.0, 1.0], &[vec![2.0, 0.0]]).unwrap();
        let b = AffineSubspace::span(vec![7.0, 1.0], &[vec![-1.0, 0.0]]).unwrap();
        let k = a.intersect(&b, 1e-9).unwrap().unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[3.5, 1.0], 1e-9));
        assert!(!k.contains(&[3.5, 1.5], 1e-9));
    }

    #[test]
    fn intersect_parallel_distinct_lines_is_empty() {
        let a = AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap();
        let b = AffineSubspace::span(vec![0.0, 1.0], &[vec![1.0, 0.0]]).unwrap();
        assert!(a.intersect(&b, 1e-9).unwrap().is_none());
    }

    #[test]
    fn intersect_plane_and_line_in_r3() {
        let plane = AffineSubspace::span(
            vec![0.0, 0.0, 1.0],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let diag = AffineSubspace::span(vec![0.0, 0.0, 0.0], &[vec![1.0, 1.0, 1.0]]).unwrap();
        let k = plane.intersect(&diag, 1e-9).unwrap().unwrap();
        assert_eq!(k.dim(), 0);
        assert!(max_norm_dist(k.point(), &[1.0, 1.0, 1.0]) < 1e-9);
        // Swapping the operands meets at the same point.
        let k2 = diag.intersect(&plane, 1e-9).unwrap().unwrap();
        assert!(max_norm_dist(k.point(), k2.point()) < 1e-9);
        // A point operand: contained vs not.
        let on = AffineSubspace::from_point(vec![4.0, -3.0, 1.0]).unwrap();
        assert!(plane.intersect(&on, 1e-9).unwrap().is_some());
        let off = AffineSubspace::from_point(vec![4.0, -3.0, 1.5]).unwrap();
        assert!(plane.intersect(&off, 1e-9).unwrap().is_none());
    }
}
