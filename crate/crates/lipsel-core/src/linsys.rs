//! ω-Hölder solutions of pointwise linear systems on a finite sample.
//!
//! Each sample point `x` carries a linear system `A(x) v = b(x)` whose
//! solution set is an affine flat in `R^M`. Pulling the sample geometry
//! through the modulus, `ρ(x, y) = ω(‖x − y‖∞)`, turns "solve every system
//! with an ω-Hölder dependence on the point" into a Lipschitz-selection
//! problem for the flat-valued map, which the selection engine answers with
//! the full ambient dimension bound `k = M`. The returned seminorm is
//! measured against ρ, i.e. it is exactly the ω-Hölder seminorm of the
//! solution family.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::AffineSubspace;
use crate::metricspace::{Modulus, PseudometricSpace, WeightedGraph};
use crate::selection::{select_affine_autoscale, Selection};
use crate::{max_norm, max_norm_dist, Tolerances};

/// Relative residual above which a pointwise system counts as inconsistent,
/// and which the returned solution must also satisfy at every point.
const RESIDUAL_TOL: f64 = 1e-8;

/// Relative rank tolerance of the rank-revealing decomposition.
const RANK_TOL: f64 = 1e-10;

/// A finite family of pointwise linear systems with a shared modulus.
#[derive(Clone, Debug)]
pub struct SampledSystem {
    /// Sample points in `R^n`.
    pub points: Vec<Vec<f64>>,
    /// Per-point coefficient matrices as rows; `N × M` everywhere.
    pub matrices: Vec<Vec<Vec<f64>>>,
    /// Per-point right-hand sides of length `N`.
    pub rhs: Vec<Vec<f64>>,
    /// Modulus of continuity defining `ρ(x, y) = ω(‖x − y‖∞)`.
    pub modulus: Modulus,
}

impl SampledSystem {
    /// Validate shapes and finiteness: every point lives in the same `R^n`,
    /// every matrix is `N × M` with matching right-hand side, and the
    /// modulus passes its axioms on the sampled distance range.
    pub fn new(
        points: Vec<Vec<f64>>,
        matrices: Vec<Vec<Vec<f64>>>,
        rhs: Vec<Vec<f64>>,
        modulus: Modulus,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("sampled system needs at least one point".into()));
        }
        if matrices.len() != points.len() || rhs.len() != points.len() {
            return Err(Error::Input(format!(
                "{} points but {} matrices and {} right-hand sides",
                points.len(),
                matrices.len(),
                rhs.len()
            )));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::Input("sample points must have positive dimension".into()));
        }
        let n_rows = matrices[0].len();
        if n_rows == 0 {
            return Err(Error::Input("each system needs at least one equation".into()));
        }
        let m_cols = matrices[0][0].len();
        if m_cols == 0 {
            return Err(Error::Input("each system needs at least one unknown".into()));
        }
        for idx in 0..points.len() {
            if points[idx].len() != n {
                return Err(Error::Input(format!("point {idx} has a different dimension")));
            }
            if matrices[idx].len() != n_rows || rhs[idx].len() != n_rows {
                return Err(Error::Input(format!(
                    "system at point {idx} does not have {n_rows} equations"
                )));
            }
            if matrices[idx].iter().any(|row| row.len() != m_cols) {
                return Err(Error::Input(format!(
                    "system at point {idx} does not have {m_cols} unknowns"
                )));
            }
            let finite = points[idx].iter().all(|v| v.is_finite())
                && rhs[idx].iter().all(|v| v.is_finite())
                && matrices[idx].iter().flatten().all(|v| v.is_finite());
            if !finite {
                return Err(Error::Input(format!("data at point {idx} must be finite")));
            }
        }
        let mut t_max = 0.0f64;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                t_max = t_max.max(max_norm_dist(&points[i], &points[j]));
            }
        }
        modulus.audit(1.1 * t_max.max(1.0))?;
        Ok(Self { points, matrices, rhs, modulus })
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the sample is empty (never true for a validated system).
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of unknowns `M`.
    pub fn unknowns(&self) -> usize {
        self.matrices[0][0].len()
    }
}

/// The solution flat `{v : A v = b}` of one consistent linear system:
/// anchored at the minimum-norm particular solution, spanned by an
/// orthonormal, sign-canonicalized null-space basis, both obtained from a
/// rank-revealing orthogonal decomposition with relative rank tolerance
/// 1e-10. An inconsistent system (least-squares residual above 1e-8
/// relative) is rejected as input.
pub fn solution_flat(a: &[Vec<f64>], b: &[f64]) -> Result<AffineSubspace> {
    let (flat, residual, scale) = flat_with_residual(a, b)?;
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::Input(format!(
            "linear system is inconsistent: least-squares residual {residual:.3e}"
        )));
    }
    Ok(flat)
}

/// Shared worker: minimum-norm least-squares solution, null basis, and the
/// residual with its comparison scale, leaving the consistency verdict to
/// the caller.
fn flat_with_residual(a: &[Vec<f64>], b: &[f64]) -> Result<(AffineSubspace, f64, f64)> {
    let n_rows = a.len();
    if n_rows == 0 || b.len() != n_rows {
        return Err(Error::Input("system needs equations with matching right-hand side".into()));
    }
    let m_cols = a[0].len();
    if m_cols == 0 || a.iter().any(|row| row.len() != m_cols) {
        return Err(Error::Input("system rows must share one positive width".into()));
    }
    // Pad with zero rows so the decomposition carries all M right vectors.
    let padded = n_rows.max(m_cols);
    let mat = DMatrix::from_fn(padded, m_cols, |i, j| if i < n_rows { a[i][j] } else { 0.0 });
    let rhs = DVector::from_fn(padded, |i, _| if i < n_rows { b[i] } else { 0.0 });
    let svd = mat.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let eps = RANK_TOL * sigma_max.max(1.0);
    let particular = svd
        .solve(&rhs, eps)
        .map_err(|msg| Error::Internal(format!("least-squares solve failed: {msg}")))?;

    let mut residual = 0.0f64;
    for i in 0..n_rows {
        let mut row = -b[i];
        for j in 0..m_cols {
            row += a[i][j] * particular[j];
        }
        residual = residual.max(row.abs());
    }
    let scale = 1.0 + max_norm(b);

    let v_t = svd.v_t.as_ref().ok_or_else(|| {
        Error::Internal("rank-revealing decomposition returned no right vectors".into())
    })?;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in 0..v_t.nrows() {
        if svd.singular_values[r] <= eps {
            let mut v: Vec<f64> = (0..m_cols).map(|j| v_t[(r, j)]).collect();
            // Sign canonicalization: the largest-magnitude entry is positive.
            let lead = (0..m_cols)
                .max_by(|&p, &q| v[p].abs().partial_cmp(&v[q].abs()).unwrap())
                .unwrap_or(0);
            if v[lead] < 0.0 {
                for t in v.iter_mut() {
                    *t = -*t;
                }
            }
            basis.push(v);
        }
    }
    basis.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let flat = AffineSubspace::new(particular.iter().copied().collect(), basis)?;
    Ok((flat, residual, scale))
}

/// Solve all pointwise systems simultaneously with ω-Hölder regularity:
/// builds the solution flat of every sample point, equips the sample with
/// the pseudometric `ρ(x, y) = ω(‖x − y‖∞)` on its complete graph, and runs
/// the affine selection engine with `k = M`. The returned
/// [`Selection::seminorm`] is the ω-Hölder seminorm of the solution family;
/// every returned vector satisfies its system to within 1e-8 relative.
pub fn solve_holder_system(sys: &SampledSystem, tol: &Tolerances) -> Result<Selection> {
    let mut flats = Vec::with_capacity(sys.len());
    for idx in 0..sys.len() {
        let (flat, residual, scale) = flat_with_residual(&sys.matrices[idx], &sys.rhs[idx])?;
        if residual > RESIDUAL_TOL * scale {
            return Err(Error::InconsistentSystem { point: idx, residual });
        }
        flats.push(flat);
    }
    let space = PseudometricSpace::new(&metric_rows(sys))?;
    let graph = WeightedGraph::complete(&space);
    let selection = select_affine_autoscale(&space, &graph, &flats, 1.0, sys.unknowns(), tol)?;
    for idx in 0..sys.len() {
        let mut residual = 0.0f64;
        for (row, &bi) in sys.matrices[idx].iter().zip(&sys.rhs[idx]) {
            let ax: f64 = row.iter().zip(&selection.points[idx]).map(|(c, v)| c * v).sum();
            residual = residual.max((ax - bi).abs());
        }
        if residual > RESIDUAL_TOL * (1.0 + max_norm(&sys.rhs[idx])) {
            return Err(Error::Internal(format!(
                "selected solution violates the system at point {idx}: residual {residual:.3e}"
            )));
        }
    }
    Ok(selection)
}

/// Pairwise modulus-of-continuity distances `ρ_ij = ω(‖x_i − x_j‖∞)`.
fn metric_rows(sys: &SampledSystem) -> Vec<Vec<f64>> {
    let m = sys.len();
    let mut rows = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let d = sys.modulus.eval(max_norm_dist(&sys.points[i], &sys.points[j]));
            rows[i][j] = d;
            rows[j][i] = d;
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::lipschitz_seminorm;

    #[test]
    fn identity_system_pins_the_point() {
        let flat =
            solution_flat(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[3.0, -4.0]).unwrap();
        assert_eq!(flat.dim(), 0);
        assert!(max_norm_dist(flat.point(), &[3.0, -4.0]) < 1e-12);
    }

    #[test]
    fn zero_system_spans_everything() {
        let flat = solution_flat(&[vec![0.0, 0.0, 0.0]], &[0.0]).unwrap();
        assert_eq!(flat.dim(), 3);
        assert!(max_norm(flat.point()) < 1e-12);
    }

    #[test]
    fn sum_equation_gives_the_diagonal_line() {
        // x + y = 1: minimum-norm solution (1/2, 1/2), direction (1, -1)/sqrt(2).
        let flat = solution_flat(&[vec![1.0, 1.0]], &[1.0]).unwrap();
        assert_eq!(flat.dim(), 1);
        assert!(max_norm_dist(flat.point(), &[0.5, 0.5]) < 1e-12);
        let d = &flat.basis()[0];
        let s = 0.5f64.sqrt();
        assert!(
            max_norm_dist(d, &[s, -s]) < 1e-12 || max_norm_dist(d, &[-s, s]) < 1e-12,
            "direction {d:?}"
        );
    }

    #[test]
    fn inconsistent_rows_are_rejected() {
        let err = solution_flat(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn wide_system_keeps_all_null_directions() {
        // One equation in four unknowns: a 3-dimensional solution flat.
        let flat = solution_flat(&[vec![1.0, 2.0, 0.0, -1.0]], &[2.0]).unwrap();
        assert_eq!(flat.dim(), 3);
        assert!(flat.projection_residual(&[2.0, 0.0, 0.0, 0.0]) < 1e-10);
    }

    fn planted_unique_system() -> (SampledSystem, Vec<Vec<f64>>) {
        // Unique pointwise solution f*(x) = (sqrt(x), 1 - sqrt(x)), which is
        // exactly (1/2)-Hölder on [0, 1].
        let points: Vec<Vec<f64>> = [0.0, 0.09, 0.25, 0.64, 1.0].iter().map(|&t| vec![t]).collect();
        let truth: Vec<Vec<f64>> =
            points.iter().map(|p| vec![p[0].sqrt(), 1.0 - p[0].sqrt()]).collect();
        let a = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let matrices = vec![a; points.len()];
        let rhs: Vec<Vec<f64>> = truth.iter().map(|f| vec![f[0], f[0] + f[1]]).collect();
        let sys =
            SampledSystem::new(points, matrices, rhs, Modulus::power(0.5).unwrap()).unwrap();
        (sys, truth)
    }

    #[test]
    fn unique_solutions_are_returned_verbatim() {
        let (sys, truth) = planted_unique_system();
        let sel = solve_holder_system(&sys, &Tolerances::default()).unwrap();
        for (got, want) in sel.points.iter().zip(&truth) {
            assert!(max_norm_dist(got, want) < 1e-8, "{got:?} vs {want:?}");
        }
        // sqrt is exactly 1-Lipschitz against rho = |x - y|^(1/2)... measured
        // seminorm must match the planted family's.
        let rows = metric_rows(&sys);
        let space = PseudometricSpace::new(&rows).unwrap();
        let planted = lipschitz_seminorm(&space, &truth);
        assert!((sel.seminorm - planted).abs() < 1e-9 * (1.0 + planted));
    }

    #[test]
    fn underdetermined_systems_admit_a_hoelder_selection() {
        // One equation in two unknowns whose solution line translates
        // Hölder-continuously: v1 + v2 = sqrt(x).
        let points: Vec<Vec<f64>> = [0.0, 0.25, 1.0, 2.25].iter().map(|&t| vec![t]).collect();
        let matrices = vec![vec![vec![1.0, 1.0]]; points.len()];
        let rhs: Vec<Vec<f64>> = points.iter().map(|p| vec![p[0].sqrt()]).collect();
        let sys = SampledSystem::new(
            points.clone(),
            matrices,
            rhs.clone(),
            Modulus::power(0.5).unwrap(),
        )
        .unwrap();
        let sel = solve_holder_system(&sys, &Tolerances::default()).unwrap();
        for (idx, v) in sel.points.iter().enumerate() {
            assert!((v[0] + v[1] - rhs[idx][0]).abs() < 1e-8);
        }
        assert!(sel.seminorm.is_finite());
    }

    #[test]
    fn inconsistent_point_is_named() {
        let points = vec![vec![0.0], vec![1.0]];
        let matrices =
            vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 1.0], vec![1.0, 1.0]]];
        let rhs = vec![vec![0.0, 0.0], vec![1.0, 2.0]];
        let sys =
            SampledSystem::new(points, matrices, rhs, Modulus::power(1.0).unwrap()).unwrap();
        match solve_holder_system(&sys, &Tolerances::default()) {
            Err(Error::InconsistentSystem { point, residual }) => {
                assert_eq!(point, 1);
                assert!(residual > 0.1);
            }
            other => panic!("expected an inconsistency error, got {other:?}"),
        }
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        assert!(SampledSystem::new(
            vec![vec![0.0]],
            vec![vec![vec![1.0, 0.0]]],
            vec![vec![0.0, 1.0]],
            Modulus::power(1.0).unwrap()
        )
        .is_err());
        assert!(solution_flat(&[], &[]).is_err());
        assert!(solution_flat(&[vec![1.0]], &[1.0, 2.0]).is_err());
    }
}
