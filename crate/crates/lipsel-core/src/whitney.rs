//! Completion of scalar data on a finite point set to first-order Whitney
//! jets with a prescribed gradient modulus of continuity.
//!
//! The bridge is a space of ordered point pairs: a function `f` on
//! `X ⊂ R^n` admits a gradient `g` making `(f, g)` a jet with modulus `ω`
//! exactly when the map sending each pair `(x, y)` to the hyperplane
//! `{z : ⟨z, x−y⟩ = f(x)−f(y)}` of secant-compatible gradients admits a
//! Lipschitz selection over the metric
//! `ρ_ω((x,y),(x′,y′)) = ω(‖x−y‖) + ω(‖x′−y′‖) + ω(‖x−x′‖)`.
//! A star vertex at distance 2 from every pair, holding the flat `{0}`,
//! absorbs the boundedness requirement into the Lipschitz condition. The
//! pairs carry a sparse weighted graph (pairs sharing a point are joined,
//! the star is joined to all) whose path metric matches `ρ_ω` within a
//! factor of 2, which is what the selection engine processes.
//!
//! All norms on points and gradients are max norms; the modulus is always
//! capped at 1, which the jet norms require and the star triangle
//! inequality uses.

use crate::error::{Error, Result};
use crate::geometry::AffineSubspace;
use crate::metricspace::{Metric, Modulus, PseudometricSpace, WeightedGraph};
use crate::selection::{select_affine, select_affine_autoscale, Selection, StageDiagnostics};
use crate::{dot, euclid_norm, max_norm, max_norm_dist, Tolerances};

/// Relative slack for the constant bounds that the conversion routines
/// verify on their own output.
const BOUND_SLACK: f64 = 1e-7;

/// Scalar samples on a finite set of distinct points, with the modulus of
/// continuity intended for the gradient.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Stored in normalized (capped at 1) form.
    pub modulus: Modulus,
}

impl SampledFunction {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, modulus: Modulus) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("sampled function needs at least one point".into()));
        }
        if points.len() != values.len() {
            return Err(Error::Input(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::Input("points need a positive dimension".into()));
        }
        let mut t_max = 1.0f64;
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Input("points must share one dimension".into()));
            }
            if p.iter().any(|c| !c.is_finite()) || !values[i].is_finite() {
                return Err(Error::Input("points and values must be finite".into()));
            }
            for q in points.iter().take(i) {
                let d = max_norm_dist(p, q);
                if d == 0.0 {
                    return Err(Error::Input("points must be pairwise distinct".into()));
                }
                t_max = t_max.max(d);
            }
        }
        let modulus = modulus.normalized();
        modulus.audit(1.1 * t_max)?;
        Ok(Self { points, values, modulus })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// A first-order jet: values and gradients on a finite point set, measured
/// against a gradient modulus.
#[derive(Clone, Debug)]
pub struct Jet1 {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec<f64>>,
    /// Stored in normalized (capped at 1) form.
    pub modulus: Modulus,
}

impl Jet1 {
    pub fn new(
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        gradients: Vec<Vec<f64>>,
        modulus: Modulus,
    ) -> Result<Self> {
        let base = SampledFunction::new(points, values, modulus)?;
        let n = base.dim();
        if gradients.len() != base.len() {
            return Err(Error::Input(format!(
                "{} gradients for {} points",
                gradients.len(),
                base.len()
            )));
        }
        for g in &gradients {
            if g.len() != n || g.iter().any(|c| !c.is_finite()) {
                return Err(Error::Input("gradients must be finite vectors in R^n".into()));
            }
        }
        Ok(Self {
            points: base.points,
            values: base.values,
            gradients,
            modulus: base.modulus,
        })
    }

    /// The scalar part, for rebuilding pair spaces.
    pub fn scalar_part(&self) -> SampledFunction {
        SampledFunction {
            points: self.points.clone(),
            values: self.values.clone(),
            modulus: self.modulus.clone(),
        }
    }
}

/// Jet norm and seminorm.
///
/// The seminorm is the sum of the Taylor-defect supremum
/// `sup |f(x)−f(y)−⟨g(y),x−y⟩| / (‖x−y‖ ω(‖x−y‖))` and the gradient
/// Hölder supremum `sup ‖g(x)−g(y)‖ / ω(‖x−y‖)` over ordered pairs; the
/// norm adds `sup |f|` and `sup ‖g‖`.
pub fn jet_norm_seminorm(jet: &Jet1) -> (f64, f64) {
    let m = jet.points.len();
    let mut taylor = 0.0f64;
    let mut hoelder = 0.0f64;
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let d = max_norm_dist(&jet.points[x], &jet.points[y]);
            let w = jet.modulus.eval(d);
            let diff: Vec<f64> = jet.points[x]
                .iter()
                .zip(&jet.points[y])
                .map(|(a, b)| a - b)
                .collect();
            let defect =
                (jet.values[x] - jet.values[y] - dot(&jet.gradients[y], &diff)).abs();
            taylor = taylor.max(defect / (d * w));
            hoelder = hoelder.max(max_norm_dist(&jet.gradients[x], &jet.gradients[y]) / w);
        }
    }
    let seminorm = taylor + hoelder;
    let sup_f = jet.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let sup_g = jet.gradients.iter().fold(0.0f64, |a, g| a.max(max_norm(g)));
    (sup_f + sup_g + seminorm, seminorm)
}

/// The space of ordered point pairs, optionally with a star vertex, its
/// pair metric, and the sparse weighted graph the selection engine runs on.
#[derive(Clone, Debug)]
pub struct PairSpace {
    /// Number of sample points the pairs index into.
    pub n_points: usize,
    /// Ordered index pairs `(i, j)`, `i ≠ j`, into the sample points.
    pub pairs: Vec<(usize, usize)>,
    /// Index of the star vertex in `space` (always `pairs.len()`), if built.
    pub star: Option<usize>,
    pub space: PseudometricSpace,
    pub graph: WeightedGraph,
}

impl PairSpace {
    /// Vertex index of the ordered pair `(i, j)`.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < self.n_points && j < self.n_points);
        i * (self.n_points - 1) + if j < i { j } else { j - 1 }
    }
}

/// Build the pair space of a sampled function; with `starred`, append the
/// star vertex at distance 2 from every pair.
///
/// The graph joins two pairs when they share a point, with weight
/// `ω(‖x−y‖) + ω(‖x′−y′‖)`, and joins the star to every pair with weight 2.
/// The construction verifies entrywise that the graph's path metric `σ`
/// satisfies `ρ/2 ≤ σ ≤ 2ρ`; a violation is an internal error, not bad
/// input.
pub fn build_pair_space(sf: &SampledFunction, starred: bool) -> Result<PairSpace> {
    let m = sf.len();
    if m < 2 {
        return Err(Error::Input("pair space needs at least two points".into()));
    }
    let mut pairs = Vec::with_capacity(m * (m - 1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    // ω̄ of the point distances, reused by metric and graph weights.
    let wdist = |a: usize, b: usize| {
        sf.modulus
            .eval(max_norm_dist(&sf.points[a], &sf.points[b]))
    };
    let p = pairs.len();
    let n_vertices = p + usize::from(starred);
    let mut rows = vec![vec![0.0f64; n_vertices]; n_vertices];
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(i2, j2)) in pairs.iter().enumerate() {
            if a == b {
                continue;
            }
            rows[a][b] = wdist(i, j) + wdist(i2, j2) + wdist(i, i2);
        }
        if starred {
            rows[a][p] = 2.0;
            rows[p][a] = 2.0;
        }
    }
    let space = PseudometricSpace::new(&rows)?;

    let mut edges = Vec::new();
    for a in 0..p {
        let (i, j) = pairs[a];
        for (b, &(i2, j2)) in pairs.iter().enumerate().skip(a + 1) {
            if i == i2 || i == j2 || j == i2 || j == j2 {
                edges.push((a, b, wdist(i, j) + wdist(i2, j2)));
            }
        }
        if starred {
            edges.push((a, p, 2.0));
        }
    }
    let graph = WeightedGraph::new(n_vertices, edges)?;

    let sigma = graph.path_metric();
    for a in 0..n_vertices {
        for b in 0..n_vertices {
            let rho = space.dist(a, b);
            let s = sigma.dist(a, b);
            if s > 2.0 * rho * (1.0 + 1e-9) + 1e-12 || s < 0.5 * rho * (1.0 - 1e-9) - 1e-12 {
                return Err(Error::Internal(format!(
                    "pair-graph path metric escapes the factor-2 band at ({a},{b}): \
                     sigma {s}, rho {rho}"
                )));
            }
        }
    }

    Ok(PairSpace {
        n_points: m,
        pairs,
        star: starred.then_some(p),
        space,
        graph,
    })
}

/// The hyperplane of secant-compatible gradients for every ordered pair:
/// `(x, y) ↦ {z : ⟨z, x−y⟩ = f(x)−f(y)}`; the star vertex carries `{0}`.
pub fn secant_hyperplanes(sf: &SampledFunction, ps: &PairSpace) -> Result<Vec<AffineSubspace>> {
    let n = sf.dim();
    let mut flats = Vec::with_capacity(ps.space.len());
    for &(i, j) in &ps.pairs {
        let normal: Vec<f64> = sf.points[i]
            .iter()
            .zip(&sf.points[j])
            .map(|(a, b)| a - b)
            .collect();
        flats.push(crate::geometry::hyperplane(
            &normal,
            sf.values[i] - sf.values[j],
        )?);
    }
    if ps.star.is_some() {
        flats.push(AffineSubspace::from_point(vec![0.0; n])?);
    }
    Ok(flats)
}

/// Turn a jet into a selection of the secant hyperplanes: at each pair,
/// the Euclidean-closest point of the hyperplane to `g(x)`, which is
/// `g(x) + ((f(x)−f(y)−⟨g(x),x−y⟩)/‖x−y‖₂²)(x−y)`; the star gets `0`.
///
/// Verifies the two constant bounds the construction guarantees —
/// `sup ‖ℓ‖ ≤ 2‖(f,g)‖` and `|ℓ|_Lip ≤ ‖(f,g)‖` — and reports a violation
/// as an internal error.
pub fn selection_from_jet(jet: &Jet1, ps: &PairSpace) -> Result<Vec<Vec<f64>>> {
    let n = jet.points[0].len();
    let (norm, _) = jet_norm_seminorm(jet);
    let mut ell = Vec::with_capacity(ps.space.len());
    for &(i, j) in &ps.pairs {
        let u: Vec<f64> = jet.points[i]
            .iter()
            .zip(&jet.points[j])
            .map(|(a, b)| a - b)
            .collect();
        let defect = jet.values[i] - jet.values[j] - dot(&jet.gradients[i], &u);
        let scale = defect / euclid_norm(&u).powi(2);
        ell.push(
            jet.gradients[i]
                .iter()
                .zip(&u)
                .map(|(g, ui)| g + scale * ui)
                .collect::<Vec<f64>>(),
        );
    }
    if ps.star.is_some() {
        ell.push(vec![0.0; n]);
    }

    let sup = ps
        .pairs
        .iter()
        .enumerate()
        .fold(0.0f64, |a, (idx, _)| a.max(max_norm(&ell[idx])));
    if sup > 2.0 * norm * (1.0 + BOUND_SLACK) + BOUND_SLACK {
        return Err(Error::Internal(format!(
            "selection sup {sup} exceeds twice the jet norm {norm}"
        )));
    }
    let lip = crate::metricspace::lipschitz_seminorm(&ps.space, &ell);
    if lip > norm * (1.0 + BOUND_SLACK) + BOUND_SLACK {
        return Err(Error::Internal(format!(
            "selection Lipschitz seminorm {lip} exceeds the jet norm {norm}"
        )));
    }
    Ok(ell)
}

/// Read a jet off a selection of the secant hyperplanes: the gradient at
/// `x` is the selection at the pair `(x, x̂)`, where `x̂` is the max-norm
/// nearest other point (ties broken by lexicographically smallest
/// coordinates).
///
/// Verifies the three bounds the construction guarantees in terms of
/// `C_ℓ = sup ‖ℓ‖ + |ℓ|_Lip`: `‖g‖ ≤ C_ℓ`, the gradient is
/// `3C_ℓ`-Hölder against ω, and the Taylor defect is at most
/// `2n C_ℓ ‖x−y‖ ω(‖x−y‖)`. A selection that misses its hyperplane by more
/// than `1e-8` is rejected as input error.
pub fn jet_from_selection(
    sf: &SampledFunction,
    ps: &PairSpace,
    ell: &[Vec<f64>],
) -> Result<Jet1> {
    let m = sf.len();
    let n = sf.dim();
    if ell.len() != ps.space.len() {
        return Err(Error::Input(format!(
            "selection has {} entries for {} vertices",
            ell.len(),
            ps.space.len()
        )));
    }
    for (idx, &(i, j)) in ps.pairs.iter().enumerate() {
        let u: Vec<f64> = sf.points[i]
            .iter()
            .zip(&sf.points[j])
            .map(|(a, b)| a - b)
            .collect();
        let residual =
            (dot(&ell[idx], &u) - (sf.values[i] - sf.values[j])).abs() / euclid_norm(&u);
        if residual > 1e-8 * (1.0 + max_norm(&ell[idx])) {
            return Err(Error::Input(format!(
                "selection misses the hyperplane of pair ({i},{j}) by {residual:.3e}"
            )));
        }
    }

    // C_ℓ over the pair part only (the star is an auxiliary vertex).
    let sup = ps
        .pairs
        .iter()
        .enumerate()
        .fold(0.0f64, |a, (idx, _)| a.max(max_norm(&ell[idx])));
    let mut lip = 0.0f64;
    for a in 0..ps.pairs.len() {
        for b in (a + 1)..ps.pairs.len() {
            lip = lip.max(max_norm_dist(&ell[a], &ell[b]) / ps.space.dist(a, b));
        }
    }
    let c_ell = sup + lip;

    let mut gradients = Vec::with_capacity(m);
    for i in 0..m {
        let mut best: Option<usize> = None;
        let mut best_d = f64::INFINITY;
        for j in 0..m {
            if j == i {
                continue;
            }
            let d = max_norm_dist(&sf.points[i], &sf.points[j]);
            let better = d < best_d
                || (d == best_d
                    && best.is_some_and(|b| lex_less(&sf.points[j], &sf.points[b])));
            if better {
                best = Some(j);
                best_d = d;
            }
        }
        let j = best.expect("m >= 2 in a pair space");
        gradients.push(ell[ps.pair_index(i, j)].clone());
    }

    let slack = BOUND_SLACK * (1.0 + c_ell);
    for g in &gradients {
        if max_norm(g) > c_ell + slack {
            return Err(Error::Internal(format!(
                "gradient norm {} exceeds the selection constant {c_ell}",
                max_norm(g)
            )));
        }
    }
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let d = max_norm_dist(&sf.points[x], &sf.points[y]);
            let w = sf.modulus.eval(d);
            let gd = max_norm_dist(&gradients[x], &gradients[y]);
            if gd > 3.0 * c_ell * w + slack {
                return Err(Error::Internal(format!(
                    "gradient jump {gd} exceeds the Hölder bound {} at pair ({x},{y})",
                    3.0 * c_ell * w
                )));
            }
            let diff: Vec<f64> = sf.points[x]
                .iter()
                .zip(&sf.points[y])
                .map(|(a, b)| a - b)
                .collect();
            let defect = (sf.values[x] - sf.values[y] - dot(&gradients[x], &diff)).abs();
            let bound = 2.0 * n as f64 * c_ell * d * w;
            if defect > bound + slack {
                return Err(Error::Internal(format!(
                    "Taylor defect {defect} exceeds the bound {bound} at pair ({x},{y})"
                )));
            }
        }
    }

    Jet1::new(
        sf.points.clone(),
        sf.values.clone(),
        gradients,
        sf.modulus.clone(),
    )
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Everything a jet-completion run produces: the jet, its measured norms,
/// and the selection-stage constants.
#[derive(Clone, Debug)]
pub struct WhitneyReport {
    pub jet: Jet1,
    pub jet_norm: f64,
    pub jet_seminorm: f64,
    /// Lipschitz seminorm of the pair selection against the pair metric.
    pub selection_seminorm: f64,
    /// Largest max norm of the selection over the pairs.
    pub selection_sup: f64,
    /// Metric scale the selection engine settled on (1 when the data
    /// already satisfies the unit-seminorm hypothesis).
    pub scale: f64,
    pub diagnostics: StageDiagnostics,
}

fn finish_whitney(
    sf: &SampledFunction,
    ps: &PairSpace,
    sel: Selection,
) -> Result<WhitneyReport> {
    let jet = jet_from_selection(sf, ps, &sel.points)?;
    let (jet_norm, jet_seminorm) = jet_norm_seminorm(&jet);
    let selection_sup = ps
        .pairs
        .iter()
        .enumerate()
        .fold(0.0f64, |a, (idx, _)| a.max(max_norm(&sel.points[idx])));
    Ok(WhitneyReport {
        jet,
        jet_norm,
        jet_seminorm,
        selection_seminorm: sel.seminorm,
        selection_sup,
        scale: sel.scale,
        diagnostics: sel.diagnostics,
    })
}

/// A common point of all pair hyperplanes, if one exists: the gradient of
/// an affine function interpolating the data. Returns the smallest such
/// gradient (Euclidean projection of the origin onto the intersection).
fn common_secant_gradient(
    pair_flats: &[AffineSubspace],
    tol: &Tolerances,
) -> Result<Option<Vec<f64>>> {
    let mut common = pair_flats[0].clone();
    for f in &pair_flats[1..] {
        match common.intersect(f, tol.feas)? {
            Some(k) => common = k,
            None => return Ok(None),
        }
    }
    let n = pair_flats[0].ambient_dim();
    let g = common.project(&vec![0.0; n]);
    // The iterated intersection accumulates rounding; accept the shortcut
    // only when the candidate hits every hyperplane essentially exactly.
    for f in pair_flats {
        if f.projection_residual(&g) > 1e-9 * (1.0 + max_norm(&g)) {
            return Ok(None);
        }
    }
    Ok(Some(g))
}

/// Complete scalar samples to a first-order jet: build the starred pair
/// space and the secant hyperplanes, compute a Lipschitz selection (with
/// flat dimension cap `n−1` and graph distortion 2, rescaling the metric as
/// the data requires), and read the gradient off the selection.
///
/// When the secant system is globally consistent — `f` is the restriction
/// of an affine function — every hyperplane contains the common gradient,
/// and the constant selection there is exactly optimal; this case is
/// detected and short-circuits the induction.
///
/// A hypothesis failure here means the selection engine rejected the data
/// even at the largest scale it tried.
pub fn whitney_select(sf: &SampledFunction, tol: &Tolerances) -> Result<WhitneyReport> {
    let ps = build_pair_space(sf, true)?;
    let flats = secant_hyperplanes(sf, &ps)?;
    if let Some(g) = common_secant_gradient(&flats[..ps.pairs.len()], tol)? {
        let mut points = vec![g; ps.pairs.len()];
        points.push(vec![0.0; sf.dim()]);
        let sel = Selection {
            seminorm: crate::metricspace::lipschitz_seminorm(&ps.space, &points),
            points,
            scale: 1.0,
            diagnostics: StageDiagnostics {
                level: 0,
                stage_c: 1.0,
                lambda: 0.0,
                cube_radius_factor: 0.0,
                faces_total: 0,
                faces_parallel: 0,
                isolated_vertices: 0,
                center_deviations: Vec::new(),
                sublevel_constants: Vec::new(),
            },
        };
        return finish_whitney(sf, &ps, sel);
    }
    let sel =
        select_affine_autoscale(&ps.space, &ps.graph, &flats, 2.0, sf.dim() - 1, tol)?;
    finish_whitney(sf, &ps, sel)
}

/// Like [`whitney_select`], but at the fixed unit scale of the pair metric:
/// fails with a hypothesis error as soon as the data rejects the
/// unit-seminorm hypothesis, instead of rescaling. This is the test for
/// "does a jet with the unit selection constant exist".
pub fn whitney_select_unit_scale(
    sf: &SampledFunction,
    tol: &Tolerances,
) -> Result<WhitneyReport> {
    let ps = build_pair_space(sf, true)?;
    let flats = secant_hyperplanes(sf, &ps)?;
    let sel = select_affine(&ps.space, &ps.graph, &flats, 2.0, sf.dim() - 1, tol)?;
    finish_whitney(sf, &ps, sel)
}
