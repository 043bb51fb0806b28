//! Explicit `C^{1,1}` and Kirszbraun extension operators.
//!
//! Both operators share one mechanism. The data is encoded as a finite family
//! of quadratics with a common positive curvature,
//! `q_y(w) = c‖w‖₂² + ⟨β_y, w⟩ + γ_y`, and the extension is read off the
//! convex envelope of `h = min_y q_y`. The envelope is evaluated exactly by
//! biconjugation: the conjugate `h*(ξ) = ‖ξ‖₂²/(4c) + max_y(⟨a_y, ξ⟩ + e_y)`
//! is a maximum of affine functions plus a fixed quadratic, so evaluating
//! `h** = conv(h)` at one point reduces to a strongly convex quadratic
//! program over the probability simplex, and the unique conjugate maximizer
//! `ξ*` is the gradient of the envelope there.
//!
//! For a scalar 1-jet `(f, g)` on `X ⊆ R^n` the pieces are built from
//! `f(y) + ⟨g(y), w−y⟩ + (c/2)‖w−y‖₂² + (c/2)‖w‖₂²` with `c = √n·M`, and the
//! extension is `F = h** − (c/2)‖·‖₂²`, which interpolates the jet and has
//! gradient max-norm Lipschitz constant at most `n·M`. For a vector-valued
//! Lipschitz map `f : X → R^m` the same construction runs on the lifted jet
//! `((0), (0, f))` on `X × {0} ⊆ R^{n+m}` with curvature `M`, and the
//! extension value is the `R^m` block of `ξ*` at `(x, 0)` — Kirszbraun
//! extension with the same Euclidean Lipschitz constant.
//!
//! Admissibility is gated by the sharp two-point condition: the least
//! Euclidean curvature for which a `C^{1,1}` extension of the jet exists
//! (Le Gruyer's two-point formula). The supplied bound must dominate it, and
//! for the lifted Kirszbraun jet it reduces exactly to the Euclidean
//! Lipschitz constant of the data.
//!
//! The formulas are global: no cutoff is applied, so values far from the
//! data grow quadratically and boundedness at infinity is not enforced.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::solvers::solve_simplex_qp;
use crate::whitney::Jet1;
use crate::{dot, euclid_dist, euclid_norm, max_norm, max_norm_dist, Tolerances};

/// Relative tolerance for the internal certificates (duality gap, convex-hull
/// box of the conjugate maximizer) checked on every envelope evaluation.
const CERT_SLACK: f64 = 1e-7;

/// Relative tolerance for the interpolation certificate at the data points.
const INTERP_SLACK: f64 = 1e-6;

/// Number of sample points at which a freshly built family is checked to
/// reproduce its defining minimum of shifted quadratics.
const REPRO_SAMPLES: usize = 1000;

/// A finite family of quadratics with one shared curvature:
/// `q_y(w) = c‖w‖₂² + ⟨β_y, w⟩ + γ_y`, standing for `h = min_y q_y`.
#[derive(Clone, Debug)]
pub struct QuadraticFamily {
    c: f64,
    /// Per-piece linear and constant coefficients `(β_y, γ_y)`.
    pieces: Vec<(Vec<f64>, f64)>,
    dim: usize,
}

impl QuadraticFamily {
    /// Build a family after validating curvature, dimensions and finiteness.
    pub fn new(c: f64, pieces: Vec<(Vec<f64>, f64)>, dim: usize) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Input(format!("curvature must be positive and finite, got {c}")));
        }
        if pieces.is_empty() {
            return Err(Error::Input("quadratic family needs at least one piece".into()));
        }
        for (beta, gamma) in &pieces {
            if beta.len() != dim {
                return Err(Error::Input(format!(
                    "piece has dimension {}, expected {dim}",
                    beta.len()
                )));
            }
            if beta.iter().any(|v| !v.is_finite()) || !gamma.is_finite() {
                return Err(Error::Input("piece coefficients must be finite".into()));
            }
        }
        Ok(Self { c, pieces, dim })
    }

    /// Shared curvature coefficient `c`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Ambient dimension of the pieces.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of pieces.
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    /// Whether the family has no pieces (never true for a validated family).
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Linear and constant coefficients `(β_y, γ_y)` of every piece.
    pub fn pieces(&self) -> &[(Vec<f64>, f64)] {
        &self.pieces
    }

    /// Value of a single piece `q_y(w)`.
    pub fn piece_eval(&self, idx: usize, w: &[f64]) -> f64 {
        let (beta, gamma) = &self.pieces[idx];
        let n2 = dot(w, w);
        self.c * n2 + dot(beta, w) + gamma
    }

    /// Pointwise minimum `h(w) = min_y q_y(w)`.
    pub fn eval_min(&self, w: &[f64]) -> f64 {
        (0..self.pieces.len()).map(|i| self.piece_eval(i, w)).fold(f64::INFINITY, f64::min)
    }
}

/// `C^{1,1}` jet seminorm: the sum of the Taylor sup
/// `|f(x)−f(y)−⟨g(y),x−y⟩| / ‖x−y‖∞²` and the gradient-Lipschitz sup
/// `‖g(x)−g(y)‖∞ / ‖x−y‖∞` over distinct sample pairs. All norms are
/// max-norms and the modulus is the identity, uncapped.
pub fn c11_jet_seminorm(jet: &Jet1) -> f64 {
    let m = jet.points.len();
    let mut taylor = 0.0f64;
    let mut hoelder = 0.0f64;
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let d = max_norm_dist(&jet.points[x], &jet.points[y]);
            let step: Vec<f64> =
                (0..jet.points[x].len()).map(|i| jet.points[x][i] - jet.points[y][i]).collect();
            let defect = jet.values[x] - jet.values[y] - dot(&jet.gradients[y], &step);
            taylor = taylor.max(defect.abs() / (d * d));
            if x < y {
                hoelder = hoelder.max(max_norm_dist(&jet.gradients[x], &jet.gradients[y]) / d);
            }
        }
    }
    taylor + hoelder
}

/// The least Euclidean curvature `K` for which the jet admits a `C^{1,1}`
/// extension with `‖∇F(a)−∇F(b)‖₂ ≤ K‖a−b‖₂` (Le Gruyer's two-point
/// formula): the max over pairs of `|a| + √(a² + b²)` with
/// `a = 2·(f(x)−f(y)−⟨(g(x)+g(y))/2, x−y⟩)/‖x−y‖₂²` and
/// `b = ‖g(x)−g(y)‖₂/‖x−y‖₂`.
pub fn minimal_curvature(jet: &Jet1) -> f64 {
    let m = jet.points.len();
    let mut worst = 0.0f64;
    for x in 0..m {
        for y in (x + 1)..m {
            let d2 = euclid_dist(&jet.points[x], &jet.points[y]);
            let step: Vec<f64> =
                (0..jet.points[x].len()).map(|i| jet.points[x][i] - jet.points[y][i]).collect();
            let mean_grad: Vec<f64> = (0..step.len())
                .map(|i| 0.5 * (jet.gradients[x][i] + jet.gradients[y][i]))
                .collect();
            let sym_defect = jet.values[x] - jet.values[y] - dot(&mean_grad, &step);
            let a = 2.0 * sym_defect / (d2 * d2);
            let b = euclid_dist(&jet.gradients[x], &jet.gradients[y]) / d2;
            worst = worst.max(a.abs() + (a * a + b * b).sqrt());
        }
    }
    worst
}

/// Build the quadratic family of the `C^{1,1}` extension of a scalar 1-jet:
/// curvature `c = √n·M` and pieces `β_y = g(y) − c·y`,
/// `γ_y = f(y) − ⟨g(y), y⟩ + (c/2)‖y‖₂²`, so that
/// `min_y q_y(w)` equals `min_y [f(y) + ⟨g(y), w−y⟩ + (c/2)‖w−y‖₂²] +
/// (c/2)‖w‖₂²`.
///
/// Rejects with an input error when `c` is below the jet's sharp two-point
/// admissibility constant ([`minimal_curvature`]): beyond that threshold the
/// envelope construction provably interpolates; below it no `C^{1,1}`
/// extension with that curvature exists at all.
pub fn family_from_jet(jet: &Jet1, m_bound: f64) -> Result<QuadraticFamily> {
    if !(m_bound > 0.0) || !m_bound.is_finite() {
        return Err(Error::Input(format!(
            "curvature bound must be positive and finite, got {m_bound}"
        )));
    }
    let n = jet.points[0].len();
    let c = (n as f64).sqrt() * m_bound;
    let sharp = minimal_curvature(jet);
    if c < sharp * (1.0 - 1e-12) {
        return Err(Error::Input(format!(
            "curvature {c:.6e} (bound {m_bound:.6e} in dimension {n}) is below the least \
             admissible curvature {sharp:.6e} of this jet; no extension with that bound exists"
        )));
    }
    let mut pieces = Vec::with_capacity(jet.points.len());
    for idx in 0..jet.points.len() {
        let y = &jet.points[idx];
        let g = &jet.gradients[idx];
        let beta: Vec<f64> = (0..n).map(|i| g[i] - c * y[i]).collect();
        let gamma = jet.values[idx] - dot(g, y) + 0.5 * c * dot(y, y);
        pieces.push((beta, gamma));
    }
    let fam = QuadraticFamily::new(c, pieces, n)?;
    verify_family_reproduction(jet, &fam)?;
    Ok(fam)
}

/// Check at deterministic sample points that the stored pieces reproduce the
/// defining minimum of shifted quadratics. The two forms are algebraically
/// identical; a mismatch indicates a construction bug.
fn verify_family_reproduction(jet: &Jet1, fam: &QuadraticFamily) -> Result<()> {
    let n = fam.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in &jet.points {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = fam.c();
    for _ in 0..REPRO_SAMPLES {
        let w: Vec<f64> = (0..n)
            .map(|i| {
                let pad = 1.0 + hi[i] - lo[i];
                rng.gen_range((lo[i] - pad)..(hi[i] + pad))
            })
            .collect();
        let mut direct = f64::INFINITY;
        for idx in 0..jet.points.len() {
            let y = &jet.points[idx];
            let shift: Vec<f64> = (0..n).map(|i| w[i] - y[i]).collect();
            direct = direct.min(
                jet.values[idx] + dot(&jet.gradients[idx], &shift) + 0.5 * c * dot(&shift, &shift),
            );
        }
        direct += 0.5 * c * dot(&w, &w);
        let stored = fam.eval_min(&w);
        if (direct - stored).abs() > 1e-9 * (1.0 + direct.abs()) {
            return Err(Error::Internal(format!(
                "family pieces disagree with their defining quadratics: {direct} vs {stored}"
            )));
        }
    }
    Ok(())
}

/// Evaluate the convex envelope `h**` of the family at `w`, returning the
/// value and the gradient `∇h**(w) = ξ*`, the unique maximizer of the
/// conjugate representation (unique because `h*` is strongly convex).
///
/// Computed as `h**(w) = min_{λ∈Δ} [c‖w − Aλ‖₂² − eᵀλ]` with columns
/// `a_y = −β_y/(2c)` and `e_y = ‖β_y‖₂²/(4c) − γ_y`, a simplex QP; then
/// `ξ* = 2c(w − Aλ*)`. Every call checks a duality-gap certificate
/// (`⟨w,ξ*⟩ − h*(ξ*) = h**(w)`) and that `ξ*` stays in the convex hull of
/// the per-piece gradients `{2c·w + β_y}`.
pub fn envelope_eval(fam: &QuadraticFamily, w: &[f64], tol: &Tolerances) -> Result<(f64, Vec<f64>)> {
    if w.len() != fam.dim() {
        return Err(Error::Input(format!(
            "query has dimension {}, family has {}",
            w.len(),
            fam.dim()
        )));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("query point must be finite".into()));
    }
    let c = fam.c();
    if fam.len() == 1 {
        let value = fam.piece_eval(0, w);
        let grad: Vec<f64> = (0..w.len()).map(|i| 2.0 * c * w[i] + fam.pieces[0].0[i]).collect();
        return Ok((value, grad));
    }

    let n = fam.dim();
    let k = fam.len();
    // Columns a_y = −β_y/(2c); offsets e_y = ‖β_y‖₂²/(4c) − γ_y.
    let a_mat = DMatrix::from_fn(n, k, |i, j| -fam.pieces[j].0[i] / (2.0 * c));
    let e: Vec<f64> =
        fam.pieces.iter().map(|(beta, gamma)| dot(beta, beta) / (4.0 * c) - gamma).collect();
    let q_mat = 2.0 * c * a_mat.transpose() * &a_mat;
    let wv = DVector::from_column_slice(w);
    let atw = a_mat.transpose() * &wv;
    let q_lin = DVector::from_fn(k, |j, _| -(2.0 * c * atw[j] + e[j]));

    let sol = solve_simplex_qp(&q_mat, &q_lin, tol.kkt).map_err(|err| match err {
        Error::Internal(msg) => Error::Internal(format!("envelope QP failed: {msg}")),
        other => other,
    })?;
    let value = c * dot(w, w) + sol.value;

    let lambda = DVector::from_column_slice(&sol.lambda);
    let a_lambda = &a_mat * &lambda;
    let xi: Vec<f64> = (0..n).map(|i| 2.0 * c * (w[i] - a_lambda[i])).collect();

    // Duality-gap certificate: Fenchel equality at the optimum.
    let mut hstar = f64::NEG_INFINITY;
    for j in 0..k {
        let mut affine = e[j];
        for i in 0..n {
            affine += a_mat[(i, j)] * xi[i];
        }
        hstar = hstar.max(affine);
    }
    hstar += dot(&xi, &xi) / (4.0 * c);
    let pairing = dot(w, &xi);
    let scale = 1.0 + value.abs() + pairing.abs() + hstar.abs();
    if (pairing - hstar - value).abs() > CERT_SLACK * scale {
        return Err(Error::Internal(format!(
            "envelope duality gap {:.3e} exceeds tolerance (value {value}, KKT residual {:.3e})",
            (pairing - hstar - value).abs(),
            sol.kkt_residual
        )));
    }
    // Hull certificate: ξ* = Σ λ_y (2c·w + β_y) must stay in the coordinate
    // bounding box of the per-piece gradients.
    for i in 0..n {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (beta, _) in &fam.pieces {
            let gi = 2.0 * c * w[i] + beta[i];
            lo = lo.min(gi);
            hi = hi.max(gi);
        }
        let pad = CERT_SLACK * (1.0 + lo.abs().max(hi.abs()));
        if xi[i] < lo - pad || xi[i] > hi + pad {
            return Err(Error::Internal(format!(
                "conjugate maximizer coordinate {i} = {} leaves the piece-gradient hull \
                 [{lo}, {hi}]",
                xi[i]
            )));
        }
    }
    Ok((value, xi))
}

/// Evaluate the `C^{1,1}` extension `F = h** − (c/2)‖·‖₂²` of the jet and its
/// gradient `∇F = ξ* − c·x` at each query. The curvature bound `m_bound` must
/// dominate the jet's sharp admissibility constant divided by `√n`; the jet
/// seminorm is a valid (if conservative) choice for jets sampled from twice
/// differentiable functions. Interpolation of values and gradients at the
/// data points is certified on every call.
pub fn extend_c11(
    jet: &Jet1,
    m_bound: f64,
    queries: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let fam = family_from_jet(jet, m_bound)?;
    let c = fam.c();
    let eval = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (value, xi) = envelope_eval(&fam, x, tol)?;
        let f_val = value - 0.5 * c * dot(x, x);
        let grad: Vec<f64> = (0..x.len()).map(|i| xi[i] - c * x[i]).collect();
        Ok((f_val, grad))
    };
    for idx in 0..jet.points.len() {
        let (f_val, grad) = eval(&jet.points[idx])?;
        let value_err = (f_val - jet.values[idx]).abs();
        let grad_err = max_norm_dist(&grad, &jet.gradients[idx]);
        if value_err > INTERP_SLACK * (1.0 + jet.values[idx].abs())
            || grad_err > INTERP_SLACK * (1.0 + max_norm(&jet.gradients[idx]))
        {
            return Err(Error::Internal(format!(
                "extension fails to interpolate data point {idx}: value error {value_err:.3e}, \
                 gradient error {grad_err:.3e}"
            )));
        }
    }
    queries.iter().map(|x| eval(x)).collect()
}

/// Kirszbraun extension of a vector-valued Lipschitz map `f : X → R^m` with
/// Euclidean Lipschitz bound `m_bound`: runs the envelope construction on the
/// lifted jet `((0), (0, f))` on `X × {0} ⊆ R^{n+m}` with curvature `m_bound`
/// and returns the `R^m` block of the conjugate maximizer at `(query, 0)`.
/// The extension agrees with `f` on `X` and has the same Euclidean Lipschitz
/// bound; data reproduction is certified on every call.
pub fn kirszbraun_extend(
    points: &[Vec<f64>],
    values: &[Vec<f64>],
    m_bound: f64,
    queries: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>> {
    if points.is_empty() {
        return Err(Error::Input("Kirszbraun extension needs at least one data point".into()));
    }
    if points.len() != values.len() {
        return Err(Error::Input(format!(
            "{} data points but {} values",
            points.len(),
            values.len()
        )));
    }
    let n = points[0].len();
    let m_dim = values[0].len();
    if n == 0 || m_dim == 0 {
        return Err(Error::Input("domain and codomain must have positive dimension".into()));
    }
    for (p, v) in points.iter().zip(values) {
        if p.len() != n || v.len() != m_dim {
            return Err(Error::Input("inconsistent point or value dimensions".into()));
        }
        if p.iter().chain(v.iter()).any(|t| !t.is_finite()) {
            return Err(Error::Input("data must be finite".into()));
        }
    }
    if !(m_bound > 0.0) || !m_bound.is_finite() {
        return Err(Error::Input(format!(
            "Lipschitz bound must be positive and finite, got {m_bound}"
        )));
    }
    let mut lip = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let dx = euclid_dist(&points[i], &points[j]);
            let df = euclid_dist(&values[i], &values[j]);
            if dx == 0.0 {
                if df > 0.0 {
                    return Err(Error::Input(format!(
                        "points {i} and {j} coincide but carry different values"
                    )));
                }
                continue;
            }
            lip = lip.max(df / dx);
        }
    }
    if lip > m_bound * (1.0 + 1e-12) {
        return Err(Error::Input(format!(
            "data has Euclidean Lipschitz constant {lip:.6e}, above the supplied bound \
             {m_bound:.6e}"
        )));
    }

    let c = m_bound;
    let dim = n + m_dim;
    let mut pieces = Vec::with_capacity(points.len());
    for (z, fz) in points.iter().zip(values) {
        let mut beta = Vec::with_capacity(dim);
        beta.extend(z.iter().map(|zi| -c * zi));
        beta.extend(fz.iter().copied());
        let gamma = 0.5 * c * dot(z, z);
        pieces.push((beta, gamma));
    }
    let fam = QuadraticFamily::new(c, pieces, dim)?;

    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        if x.len() != n {
            return Err(Error::Input(format!(
                "query has dimension {}, data lives in dimension {n}",
                x.len()
            )));
        }
        let mut w = vec![0.0; dim];
        w[..n].copy_from_slice(x);
        let (_, xi) = envelope_eval(&fam, &w, tol)?;
        Ok(xi[n..].to_vec())
    };
    for idx in 0..points.len() {
        let out = eval(&points[idx])?;
        let err = euclid_dist(&out, &values[idx]);
        if err > INTERP_SLACK * (1.0 + euclid_norm(&values[idx])) {
            return Err(Error::Internal(format!(
                "extension fails to reproduce data point {idx}: error {err:.3e}"
            )));
        }
    }
    queries.iter().map(|x| eval(x)).collect()
}
