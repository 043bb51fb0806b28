//! Convex quadratic minimization over the probability simplex.
//!
//! Solves `min (1/2) l' Q l + q' l  s.t.  sum(l) = 1, l >= 0` for positive
//! semidefinite `Q` by a short-step primal-dual interior-point method,
//! followed by an active-support polish that resolves the KKT system on the
//! detected support by SVD least squares. The returned solution carries a
//! composite KKT residual so callers can enforce their own certificate
//! tolerance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Maximum interior-point iterations; the problems this crate builds have at
/// most a few hundred pieces, for which convergence takes far fewer steps.
const MAX_ITERS: usize = 200;

/// A certified solution of the simplex-constrained QP.
#[derive(Clone, Debug)]
pub struct QpSolution {
    /// Optimal weights on the simplex.
    pub lambda: Vec<f64>,
    /// Objective value `(1/2) l' Q l + q' l` at `lambda`.
    pub value: f64,
    /// Multiplier of the `sum(l) = 1` constraint.
    pub nu: f64,
    /// Composite KKT residual (stationarity, primal/dual feasibility and
    /// complementarity, each normalized by the data magnitude).
    pub kkt_residual: f64,
}

/// Solve `min (1/2) l' Q l + q' l` over the probability simplex.
///
/// `q_mat` must be symmetric positive semidefinite. Fails with
/// [`Error::Internal`] if the final composite KKT residual exceeds `kkt_tol`.
pub fn solve_simplex_qp(
    q_mat: &DMatrix<f64>,
    q_lin: &DVector<f64>,
    kkt_tol: f64,
) -> Result<QpSolution> {
    let n = q_lin.len();
    if q_mat.nrows() != n || q_mat.ncols() != n {
        return Err(Error::Input(format!(
            "quadratic term is {}x{}, expected {n}x{n}",
            q_mat.nrows(),
            q_mat.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::Input("simplex QP needs at least one variable".into()));
    }
    if q_mat.iter().any(|v| !v.is_finite()) || q_lin.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("simplex QP data must be finite".into()));
    }
    if n == 1 {
        let lambda = vec![1.0];
        let value = 0.5 * q_mat[(0, 0)] + q_lin[0];
        // Stationarity fixes nu = -(Q l + q); the single multiplier mu is 0.
        let nu = -(q_mat[(0, 0)] + q_lin[0]);
        return Ok(QpSolution { lambda, value, nu, kkt_residual: 0.0 });
    }

    let scale = 1.0
        + q_mat.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        + q_lin.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let (mut lambda, mut nu) = interior_point(q_mat, q_lin, scale)?;

    // Active-support polish: re-solve the stationarity system exactly on the
    // support detected by the interior-point iterate.
    if let Some((pl, pn)) = polish(q_mat, q_lin, &lambda) {
        let r_pol = kkt_residual(q_mat, q_lin, &pl, pn, scale);
        let r_ipm = kkt_residual(q_mat, q_lin, &lambda, nu, scale);
        if r_pol <= r_ipm {
            lambda = pl;
            nu = pn;
        }
    }

    let kkt = kkt_residual(q_mat, q_lin, &lambda, nu, scale);
    if kkt > kkt_tol {
        return Err(Error::Internal(format!(
            "simplex QP certificate residual {kkt:.3e} exceeds tolerance {kkt_tol:.3e}"
        )));
    }
    let lv = DVector::from_column_slice(&lambda);
    let value = 0.5 * (q_mat * &lv).dot(&lv) + q_lin.dot(&lv);
    Ok(QpSolution { lambda, value, nu, kkt_residual: kkt })
}

/// Primal-dual interior point with fraction-to-boundary steps. Returns the
/// final `(lambda, nu)` iterate; the caller measures its KKT residual.
fn interior_point(
    q_mat: &DMatrix<f64>,
    q_lin: &DVector<f64>,
    scale: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = q_lin.len();
    let ones = DVector::from_element(n, 1.0);
    let mut l = DVector::from_element(n, 1.0 / n as f64);
    let mut mu = DVector::from_element(n, scale.max(1.0));
    let mut nu = 0.0f64;

    for _ in 0..MAX_ITERS {
        let theta = l.dot(&mu) / n as f64;
        let r_dual = q_mat * &l + q_lin + &ones * nu - &mu;
        let r_prim = l.sum() - 1.0;
        let stat = r_dual.amax() / scale;
        if theta / scale < 1e-13 && stat < 1e-11 && r_prim.abs() < 1e-12 {
            break;
        }
        let sigma = 0.2;
        // Reduced Newton system: (Q + diag(mu/l)) dl + 1 dnu = rhs.
        let mut h = q_mat.clone();
        for i in 0..n {
            h[(i, i)] += mu[i] / l[i];
        }
        let mut rhs = -&r_dual - &mu;
        for i in 0..n {
            rhs[i] += sigma * theta / l[i];
        }
        let chol = match h.clone().cholesky() {
            Some(c) => c,
            None => {
                // PSD + positive diagonal barrier should be SPD; if rounding
                // broke that, regularize proportionally to the data scale.
                let mut hr = h;
                for i in 0..n {
                    hr[(i, i)] += 1e-10 * scale;
                }
                hr.cholesky().ok_or_else(|| {
                    Error::Internal("interior-point Newton matrix is not positive definite".into())
                })?
            }
        };
        let hinv_rhs = chol.solve(&rhs);
        let hinv_ones = chol.solve(&ones);
        let denom = ones.dot(&hinv_ones);
        if denom.abs() < 1e-300 {
            return Err(Error::Internal("interior-point equality row degenerated".into()));
        }
        let dnu = (ones.dot(&hinv_rhs) + r_prim) / denom;
        let dl = &hinv_rhs - &hinv_ones * dnu;
        let mut dmu = DVector::zeros(n);
        for i in 0..n {
            dmu[i] = (sigma * theta - mu[i] * dl[i]) / l[i] - mu[i];
        }
        // Fraction-to-boundary step lengths keep l and mu strictly positive.
        let mut alpha_p = 1.0f64;
        let mut alpha_d = 1.0f64;
        for i in 0..n {
            if dl[i] < 0.0 {
                alpha_p = alpha_p.min(-0.99 * l[i] / dl[i]);
            }
            if dmu[i] < 0.0 {
                alpha_d = alpha_d.min(-0.99 * mu[i] / dmu[i]);
            }
        }
        l += &dl * alpha_p;
        mu += &dmu * alpha_d;
        nu += alpha_d * dnu;
    }
    Ok((l.iter().copied().collect(), nu))
}

/// Resolve the KKT stationarity system on the support of `lambda` by SVD
/// least squares, returning `None` when the polished point leaves the
/// simplex.
fn polish(q_mat: &DMatrix<f64>, q_lin: &DVector<f64>, lambda: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = lambda.len();
    let lmax = lambda.iter().fold(0.0f64, |m, v| m.max(*v));
    let support: Vec<usize> = (0..n).filter(|&i| lambda[i] > 1e-7 * lmax.max(1e-300)).collect();
    let s = support.len();
    if s == 0 {
        return None;
    }
    // KKT system on the support: [Q_SS 1; 1' 0] [l_S; nu] = [-q_S; 1].
    let mut kkt = DMatrix::zeros(s + 1, s + 1);
    let mut rhs = DVector::zeros(s + 1);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[(a, b)] = q_mat[(i, j)];
        }
        kkt[(a, s)] = 1.0;
        kkt[(s, a)] = 1.0;
        rhs[a] = -q_lin[i];
    }
    rhs[s] = 1.0;
    let svd = kkt.svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    let mut out = vec![0.0; n];
    for (a, &i) in support.iter().enumerate() {
        if sol[a] < -1e-9 {
            return None;
        }
        out[i] = sol[a].max(0.0);
    }
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for v in out.iter_mut() {
        *v /= total;
    }
    Some((out, sol[s]))
}

/// Composite KKT residual: the largest of the normalized stationarity,
/// primal feasibility, dual feasibility, and complementarity violations,
/// with the inequality multipliers eliminated as `mu = Q l + q + nu 1`.
fn kkt_residual(
    q_mat: &DMatrix<f64>,
    q_lin: &DVector<f64>,
    lambda: &[f64],
    nu: f64,
    scale: f64,
) -> f64 {
    let n = lambda.len();
    let lv = DVector::from_column_slice(lambda);
    let grad = q_mat * &lv + q_lin;
    let mut worst = (lv.sum() - 1.0).abs();
    for i in 0..n {
        let mu_i = grad[i] + nu;
        worst = worst.max(-lambda[i]); // primal feasibility
        worst = worst.max(-mu_i / scale); // dual feasibility
        worst = worst.max((lambda[i] * mu_i).abs() / scale); // complementarity
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve(q: &[&[f64]], lin: &[f64]) -> QpSolution {
        let n = lin.len();
        let qm = DMatrix::from_fn(n, n, |i, j| q[i][j]);
        let ql = DVector::from_column_slice(lin);
        solve_simplex_qp(&qm, &ql, 1e-8).unwrap()
    }

    #[test]
    fn single_variable_is_forced() {
        let s = solve(&[&[3.0]], &[-2.0]);
        assert_eq!(s.lambda, vec![1.0]);
        assert!((s.value - (1.5 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn identity_quadratic_centers_the_simplex() {
        let s = solve(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0]);
        assert!((s.lambda[0] - 0.5).abs() < 1e-7);
        assert!((s.lambda[1] - 0.5).abs() < 1e-7);
        assert!((s.value - 0.25).abs() < 1e-9);
        assert!(s.kkt_residual <= 1e-8);
    }

    #[test]
    fn linear_objective_picks_a_vertex() {
        let s = solve(&[&[0.0, 0.0], &[0.0, 0.0]], &[0.0, -1.0]);
        assert!(s.lambda[0].abs() < 1e-8);
        assert!((s.lambda[1] - 1.0).abs() < 1e-8);
        assert!((s.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank_deficient_quadratic_still_certifies() {
        // (1/2)(l1+l2)^2 - (l1+l2) is constant (-1/2) on the simplex; every
        // feasible point is optimal and the certificate must still close.
        let s = solve(&[&[1.0, 1.0], &[1.0, 1.0]], &[-1.0, -1.0]);
        assert!((s.value + 0.5).abs() < 1e-9);
        assert!(s.kkt_residual <= 1e-8);
    }

    #[test]
    fn beats_dense_simplex_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..10 {
            let n = 3 + trial % 4;
            let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let qm = &b.transpose() * &b;
            let ql = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            let sol = solve_simplex_qp(&qm, &ql, 1e-8).unwrap();
            let obj = |l: &DVector<f64>| 0.5 * (&qm * l).dot(l) + ql.dot(l);
            // Exponential-gap sampling of the simplex.
            let mut best = f64::INFINITY;
            for _ in 0..20_000 {
                let mut raw = DVector::from_fn(n, |_, _| -f64::ln(rng.gen_range(1e-12..1.0)));
                raw /= raw.sum();
                best = best.min(obj(&raw));
            }
            for i in 0..n {
                let mut vertex = DVector::zeros(n);
                vertex[i] = 1.0;
                best = best.min(obj(&vertex));
            }
            assert!(
                sol.value <= best + 1e-6,
                "solver value {} exceeds sampled minimum {best}",
                sol.value
            );
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let qm = DMatrix::<f64>::zeros(2, 3);
        let ql = DVector::from_column_slice(&[0.0, 0.0]);
        assert!(solve_simplex_qp(&qm, &ql, 1e-8).is_err());
    }
}
