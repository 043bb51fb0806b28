//! Lipschitz selection for affine-set-valued maps on finite pseudometric
//! spaces, by induction on the dimension of the flats.
//!
//! Level 0 (all flats are points) is immediate. At level `K >= 1`, every
//! ordered graph edge is decomposed into faces - lower-dimensional flats with
//! proximity radii - producing a new space whose points are the faces and
//! whose metric adds the radii to the distance of the source vertices. A
//! selection on the face space is computed recursively, its Lipschitz
//! constant `C` is measured, and the face values are turned into cubes of
//! radius `C` times the face radius. The cube-valued selection on the face
//! space then factors through the source vertices, and projecting the common
//! value back onto each vertex's flat yields the selection.
//!
//! The construction assumes the input admits a selection with seminorm at
//! most 1; use [`select_affine_autoscale`] to run at the scale the data
//! actually requires.

use crate::error::{Error, Result};
use crate::geometry::{
    decompose_intersection, nearest_pair, AffineSubspace, Cube, Face, FaceKind,
};
use crate::metricspace::{lipschitz_seminorm, Metric, PseudometricSpace, WeightedGraph};
use crate::selection::cube_select::select_cube;
use crate::{max_norm, max_norm_dist, Tolerances};

/// Per-vertex record of how far the cube-stage value had to travel to reach
/// the vertex's flat, together with the smallest face radius that the theory
/// compares it against.
#[derive(Clone, Debug)]
pub struct CenterDeviation {
    pub vertex: usize,
    /// `|| hf(v) - f(v) ||_inf`: distance from the cube-stage value to its
    /// projection on the flat.
    pub deviation: f64,
    /// Smallest face radius among the vertex's faces.
    pub min_radius: f64,
}

/// Diagnostics of one selection run (top level of the recursion).
#[derive(Clone, Debug)]
pub struct StageDiagnostics {
    /// Effective induction level that was executed.
    pub level: usize,
    /// `C`: the measured Lipschitz constant of the recursive face selection,
    /// clamped below by 1. Equal to 1 at level 0.
    pub stage_c: f64,
    /// `(1 + sqrt(n)) * stage_c`: the proximity factor that bounds how far
    /// the cube-stage value can sit from each vertex flat.
    pub lambda: f64,
    /// `4 n lambda^2`: the guaranteed cube-radius factor per unit distance.
    pub cube_radius_factor: f64,
    pub faces_total: usize,
    pub faces_parallel: usize,
    /// Vertices not covered by any face (no usable incident edges).
    pub isolated_vertices: usize,
    pub center_deviations: Vec<CenterDeviation>,
    /// `stage_c` of each deeper level, outermost first.
    pub sublevel_constants: Vec<f64>,
}

impl StageDiagnostics {
    fn base(level: usize) -> Self {
        Self {
            level,
            stage_c: 1.0,
            lambda: 0.0,
            cube_radius_factor: 0.0,
            faces_total: 0,
            faces_parallel: 0,
            isolated_vertices: 0,
            center_deviations: Vec::new(),
            sublevel_constants: Vec::new(),
        }
    }
}

/// A computed selection: one point per vertex, each on its flat.
#[derive(Clone, Debug)]
pub struct Selection {
    pub points: Vec<Vec<f64>>,
    /// Max-norm Lipschitz seminorm of `points` with respect to the original
    /// (unscaled) space metric.
    pub seminorm: f64,
    /// The metric was multiplied by this factor before running (1 when the
    /// input already satisfies the unit-seminorm hypothesis).
    pub scale: f64,
    pub diagnostics: StageDiagnostics,
}

/// Compute a Lipschitz selection of `flats` over `space`, processing the
/// edges of `graph`, whose path metric must distort `space` by at most
/// `distortion`.
///
/// Fails with [`Error::HypothesisFailure`] when the data rejects the
/// unit-seminorm hypothesis (an edge whose flats are farther apart than the
/// edge allows, or an incompatibility discovered at the cube stage).
pub fn select_affine(
    space: &PseudometricSpace,
    graph: &WeightedGraph,
    flats: &[AffineSubspace],
    distortion: f64,
    k: usize,
    tol: &Tolerances,
) -> Result<Selection> {
    validate_inputs(space, graph, flats, distortion, k)?;
    if let Some(q) = zero_quotient(space, graph, flats, tol)? {
        let inner = select_affine(&q.space, &q.graph, &q.flats, distortion, k, tol)
            .map_err(|e| relabel_vertices(e, &q.reps))?;
        let points = q.broadcast(&inner.points);
        return Ok(Selection {
            seminorm: lipschitz_seminorm(space, &points),
            points,
            scale: inner.scale,
            diagnostics: inner.diagnostics,
        });
    }
    let edges = unordered_edge_list(graph);
    let (mut points, diagnostics) =
        select_level(space, Some(&edges), flats, k.min(max_dim(flats)), tol)?;
    snap_zero_classes(space, flats, &mut points, tol)?;
    Ok(Selection {
        seminorm: lipschitz_seminorm(&space, &points),
        points,
        scale: 1.0,
        diagnostics,
    })
}

/// Like [`select_affine`], but first rescales the metric so the
/// unit-seminorm hypothesis plausibly holds: the scale starts at the largest
/// edge-wise distance-to-metric ratio and doubles on hypothesis failures, up
/// to a bounded number of retries. The reported seminorm always refers to
/// the original metric.
pub fn select_affine_autoscale(
    space: &PseudometricSpace,
    graph: &WeightedGraph,
    flats: &[AffineSubspace],
    distortion: f64,
    k: usize,
    tol: &Tolerances,
) -> Result<Selection> {
    validate_inputs(space, graph, flats, distortion, k)?;
    if let Some(q) = zero_quotient(space, graph, flats, tol)? {
        let inner = select_affine_autoscale(&q.space, &q.graph, &q.flats, distortion, k, tol)
            .map_err(|e| relabel_vertices(e, &q.reps))?;
        let points = q.broadcast(&inner.points);
        return Ok(Selection {
            seminorm: lipschitz_seminorm(space, &points),
            points,
            scale: inner.scale,
            diagnostics: inner.diagnostics,
        });
    }
    let edges = unordered_edge_list(graph);
    let mut scale = 1.0f64;
    for &(u, v) in &edges {
        let rho = space.dist(u, v);
        if rho.is_infinite() {
            continue;
        }
        let d = nearest_pair(&flats[u], &flats[v], tol.feas)?.distance;
        if rho == 0.0 {
            if d > tol.feas * (1.0 + max_norm(flats[u].point())) {
                return Err(Error::HypothesisFailure {
                    stage: "edge-anchor".into(),
                    vertices: vec![u, v],
                    detail: format!(
                        "flats at zero distance are {d:.3e} apart; no scale can fix this"
                    ),
                });
            }
        } else {
            scale = scale.max((d / rho) * (1.0 + 1e-9));
        }
    }
    let k_eff = k.min(max_dim(flats));
    let mut last_err = None;
    for attempt in 0..7 {
        let factor = scale * (1u64 << attempt) as f64;
        let scaled = PseudometricSpace::from_fn_trusted(space.len(), |i, j| {
            factor * space.dist(i, j)
        });
        match select_level(&scaled, Some(&edges), flats, k_eff, tol) {
            Ok((mut points, diagnostics)) => {
                snap_zero_classes(space, flats, &mut points, tol)?;
                return Ok(Selection {
                    seminorm: lipschitz_seminorm(&space, &points),
                    points,
                    scale: factor,
                    diagnostics,
                });
            }
            Err(e @ Error::HypothesisFailure { .. }) => last_err = Some(e),
            Err(other) => return Err(other),
        }
    }
    Err(last_err.expect("retries happen only after a failure"))
}

fn validate_inputs(
    space: &PseudometricSpace,
    graph: &WeightedGraph,
    flats: &[AffineSubspace],
    distortion: f64,
    k: usize,
) -> Result<()> {
    let m = space.len();
    if flats.len() != m {
        return Err(Error::Input(format!("{} flats for {m} points", flats.len())));
    }
    if graph.n_vertices() != m {
        return Err(Error::Input(format!(
            "graph has {} vertices for {m} points",
            graph.n_vertices()
        )));
    }
    let n = flats[0].ambient_dim();
    for (i, f) in flats.iter().enumerate() {
        if f.ambient_dim() != n {
            return Err(Error::Input("flats must share one ambient dimension".into()));
        }
        if f.dim() > k {
            return Err(Error::Input(format!(
                "flat {i} has dimension {} above the cap k = {k}",
                f.dim()
            )));
        }
    }
    graph.distortion_within(space, distortion)?;
    Ok(())
}

fn max_dim(flats: &[AffineSubspace]) -> usize {
    flats.iter().map(|f| f.dim()).max().unwrap_or(0)
}

fn unordered_edge_list(graph: &WeightedGraph) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(u, v, _)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// One face produced by decomposing an ordered edge: remembers its source
/// vertex.
struct FaceEntry {
    v1: usize,
    face: Face,
}

/// Metric of the face space: distance of the source vertices plus both
/// proximity radii.
struct FaceSpaceMetric<'a> {
    base: &'a dyn Metric,
    v1: Vec<usize>,
    radius: Vec<f64>,
}

impl Metric for FaceSpaceMetric<'_> {
    fn len(&self) -> usize {
        self.v1.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.base.dist(self.v1[i], self.v1[j]) + self.radius[i] + self.radius[j]
        }
    }
}

/// Metric of the cube stage: `C` times the source-vertex distance (faces of
/// one vertex are at distance zero, forcing a common value).
struct CubeStageMetric<'a> {
    base: &'a dyn Metric,
    v1: Vec<usize>,
    c: f64,
}

impl Metric for CubeStageMetric<'_> {
    fn len(&self) -> usize {
        self.v1.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.c * self.base.dist(self.v1[i], self.v1[j])
        }
    }
}

/// Recursive worker. `edges = None` means the complete graph (used for the
/// internally built face spaces, whose metric is exact by construction).
fn select_level(
    space: &dyn Metric,
    edges: Option<&[(usize, usize)]>,
    flats: &[AffineSubspace],
    level: usize,
    tol: &Tolerances,
) -> Result<(Vec<Vec<f64>>, StageDiagnostics)> {
    let m = space.len();
    let level = level.min(max_dim(flats));
    if level == 0 {
        return select_base(space, edges, flats, tol);
    }

    let n = flats[0].ambient_dim();
    let mut entries: Vec<FaceEntry> = Vec::new();
    let mut covered: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut faces_parallel = 0usize;

    let process_pair = |u: usize, v: usize, entries: &mut Vec<FaceEntry>| -> Result<()> {
        let rho = space.dist(u, v);
        let pair = nearest_pair(&flats[u], &flats[v], tol.feas)?;
        if rho.is_finite() {
            let slack = tol.feas
                * (1.0 + rho + max_norm(&pair.x1) + max_norm(&pair.x2));
            if pair.distance > rho * (1.0 + 1e-9) + slack {
                return Err(Error::HypothesisFailure {
                    stage: "edge-anchor".into(),
                    vertices: vec![u, v],
                    detail: format!(
                        "flats are {:.6e} apart but the edge allows {rho:.6e}",
                        pair.distance
                    ),
                });
            }
        }
        for (v1, v2, x1) in [(u, v, &pair.x1), (v, u, &pair.x2)] {
            let dec = decompose_intersection(&flats[v1], &flats[v2], x1, rho, level, tol.feas)?;
            for face in dec.faces {
                entries.push(FaceEntry { v1, face });
            }
        }
        Ok(())
    };

    match edges {
        Some(list) => {
            for &(u, v) in list {
                process_pair(u, v, &mut entries)?;
            }
        }
        None => {
            for u in 0..m {
                for v in (u + 1)..m {
                    process_pair(u, v, &mut entries)?;
                }
            }
        }
    }
    for (idx, e) in entries.iter().enumerate() {
        covered[e.v1].push(idx);
        if e.face.kind == FaceKind::ParallelFullDim {
            faces_parallel += 1;
        }
    }

    // Recursive selection on the regular faces.
    let regular: Vec<usize> = (0..entries.len())
        .filter(|&i| entries[i].face.kind == FaceKind::Regular)
        .collect();
    let (face_values, c, sub_diag) = if regular.is_empty() {
        (Vec::new(), 1.0, StageDiagnostics::base(level.saturating_sub(1)))
    } else {
        let face_metric = FaceSpaceMetric {
            base: space,
            v1: regular.iter().map(|&i| entries[i].v1).collect(),
            radius: regular.iter().map(|&i| entries[i].face.radius).collect(),
        };
        let sub_flats: Vec<AffineSubspace> = regular
            .iter()
            .map(|&i| entries[i].face.flat.clone())
            .collect();
        let (vals, sub_diag) = select_level(&face_metric, None, &sub_flats, level - 1, tol)?;
        let c = stage_constant(&face_metric, &vals, tol)?;
        (vals, c, sub_diag)
    };

    // Cube stage over all faces (parallel faces carry unbounded cubes).
    let mut cubes = Vec::with_capacity(entries.len());
    for (idx, e) in entries.iter().enumerate() {
        let center = match regular.binary_search(&idx) {
            Ok(pos) => face_values[pos].clone(),
            Err(_) => e.face.flat.point().to_vec(),
        };
        cubes.push(Cube::new(center, c * e.face.radius)?);
    }
    let cube_metric = CubeStageMetric {
        base: space,
        v1: entries.iter().map(|e| e.v1).collect(),
        c,
    };
    let hf = select_cube(&cube_metric, &cubes, tol.feas)?;

    // The cube-stage value factors through the source vertex: all faces of a
    // vertex see identical metric rows and cubes built from the same data,
    // so their values agree bitwise up to degenerate rounding.
    let mut points = vec![Vec::new(); m];
    let mut center_deviations = Vec::new();
    let mut isolated = 0usize;
    for v in 0..m {
        if covered[v].is_empty() {
            points[v] = flats[v].point().to_vec();
            isolated += 1;
            continue;
        }
        let first = &hf[covered[v][0]];
        for &other in &covered[v][1..] {
            let dev = max_norm_dist(first, &hf[other]);
            if dev > 1e-8 * (1.0 + max_norm(first)) {
                return Err(Error::Internal(format!(
                    "cube-stage value failed to factor through vertex {v} (spread {dev:.3e})"
                )));
            }
        }
        let proj = flats[v].project(first);
        center_deviations.push(CenterDeviation {
            vertex: v,
            deviation: max_norm_dist(first, &proj),
            min_radius: covered[v]
                .iter()
                .map(|&i| entries[i].face.radius)
                .fold(f64::INFINITY, f64::min),
        });
        points[v] = proj;
    }

    let lambda = (1.0 + (n as f64).sqrt()) * c;
    let mut sublevel_constants = vec![sub_diag.stage_c];
    sublevel_constants.extend(sub_diag.sublevel_constants.iter().copied());
    let diagnostics = StageDiagnostics {
        level,
        stage_c: c,
        lambda,
        cube_radius_factor: 4.0 * n as f64 * lambda * lambda,
        faces_total: entries.len(),
        faces_parallel,
        isolated_vertices: isolated,
        center_deviations,
        sublevel_constants,
    };
    Ok((points, diagnostics))
}

/// Measure the stage constant `C`: the Lipschitz seminorm of the recursive
/// face selection, clamped below by 1. Pairs at distance zero cannot enter
/// the ratio; their values must agree up to floating-point slack (they are
/// built from solver outputs), and a larger disagreement is a genuine
/// incompatibility of the input.
fn stage_constant(space: &dyn Metric, values: &[Vec<f64>], tol: &Tolerances) -> Result<f64> {
    let m = values.len();
    let mut c = 1.0f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let d = space.dist(i, j);
            if d.is_infinite() {
                continue;
            }
            let diff = max_norm_dist(&values[i], &values[j]);
            if d == 0.0 {
                if diff > tol.feas * (1.0 + max_norm(&values[i]) + max_norm(&values[j])) {
                    return Err(Error::HypothesisFailure {
                        stage: "face-selection-seminorm".into(),
                        vertices: vec![i, j],
                        detail: format!(
                            "faces at distance zero hold values {diff:.3e} apart"
                        ),
                    });
                }
            } else {
                c = c.max(diff / d);
            }
        }
    }
    Ok(c)
}

/// Force exactly one value per zero-distance class of vertices, lying on the
/// intersection of the class's flats.
///
/// Vertices at metric distance zero must share their value for the seminorm
/// to stay finite, and the shared value must then lie on every flat of the
/// class. The cube stage already places all class values within solver
/// tolerance of such a common point; this pass replaces them with the
/// projection of their mean onto the intersection flat. An empty
/// intersection is a genuine incompatibility of the input.
/// The quotient of an instance by its zero-distance classes.
///
/// Vertices at pseudometric distance zero must receive one common selected
/// point, which therefore lies in the intersection of their flats; and a
/// selection of the quotient broadcasts back with the same seminorm, because
/// distances to any third vertex agree across a zero-distance pair by the
/// triangle inequality. Collapsing the classes before the induction runs
/// keeps the later stages away from `0 / 0` comparisons, where the
/// independently computed descents of two twins can disagree by more than
/// any tolerance a zero distance affords.
struct ZeroQuotient {
    space: PseudometricSpace,
    graph: WeightedGraph,
    flats: Vec<AffineSubspace>,
    /// Original vertex -> quotient vertex.
    class_of: Vec<usize>,
    /// Quotient vertex -> representative original vertex.
    reps: Vec<usize>,
}

impl ZeroQuotient {
    /// Copy the quotient selection back to every member of each class.
    fn broadcast(&self, inner: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.class_of.iter().map(|&qi| inner[qi].clone()).collect()
    }
}

/// Collapse zero-distance classes, or return `None` when every class is a
/// singleton (the common case, which then pays nothing).
fn zero_quotient(
    space: &PseudometricSpace,
    graph: &WeightedGraph,
    flats: &[AffineSubspace],
    tol: &Tolerances,
) -> Result<Option<ZeroQuotient>> {
    let m = space.len();
    let mut class_of = vec![usize::MAX; m];
    let mut reps: Vec<usize> = Vec::new();
    let mut qflats: Vec<AffineSubspace> = Vec::new();
    for v in 0..m {
        if class_of[v] != usize::MAX {
            continue;
        }
        let qi = reps.len();
        class_of[v] = qi;
        reps.push(v);
        qflats.push(flats[v].clone());
        // Breadth-first closure over zero-distance pairs.
        let mut queue = vec![v];
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for w in 0..m {
                if class_of[w] == usize::MAX && space.dist(u, w) == 0.0 {
                    class_of[w] = qi;
                    queue.push(w);
                    qflats[qi] =
                        qflats[qi].intersect(&flats[w], tol.feas)?.ok_or_else(|| {
                            Error::HypothesisFailure {
                                stage: "zero-distance".into(),
                                vertices: vec![v, w],
                                detail: "flats at distance zero have an empty intersection"
                                    .into(),
                            }
                        })?;
                }
            }
        }
    }
    if reps.len() == m {
        return Ok(None);
    }
    let qspace = space.restriction(&reps)?;
    // Keep the lightest edge between each pair of classes; edges inside a
    // class connect vertices that are now identified and disappear.
    let mut qedges: Vec<(usize, usize, f64)> = Vec::new();
    for &(u, v, w) in graph.edges() {
        let a = class_of[u].min(class_of[v]);
        let b = class_of[u].max(class_of[v]);
        if a == b {
            continue;
        }
        match qedges.iter_mut().find(|e| (e.0, e.1) == (a, b)) {
            Some(e) => e.2 = e.2.min(w),
            None => qedges.push((a, b, w)),
        }
    }
    let qgraph = WeightedGraph::new(reps.len(), qedges)?;
    Ok(Some(ZeroQuotient { space: qspace, graph: qgraph, flats: qflats, class_of, reps }))
}

/// Translate failure indices from quotient coordinates back to the original
/// vertex numbering, so diagnostics name vertices the caller recognizes.
fn relabel_vertices(e: Error, reps: &[usize]) -> Error {
    match e {
        Error::HypothesisFailure { stage, vertices, detail } => Error::HypothesisFailure {
            stage,
            vertices: vertices
                .iter()
                .map(|&v| reps.get(v).copied().unwrap_or(v))
                .collect(),
            detail,
        },
        other => other,
    }
}

fn snap_zero_classes(
    space: &PseudometricSpace,
    flats: &[AffineSubspace],
    points: &mut [Vec<f64>],
    tol: &Tolerances,
) -> Result<()> {
    let m = space.len();
    let mut assigned = vec![false; m];
    for v in 0..m {
        if assigned[v] {
            continue;
        }
        assigned[v] = true;
        let mut class = vec![v];
        let mut head = 0;
        while head < class.len() {
            let u = class[head];
            head += 1;
            for w in 0..m {
                if !assigned[w] && space.dist(u, w) == 0.0 {
                    assigned[w] = true;
                    class.push(w);
                }
            }
        }
        if class.len() < 2 {
            continue;
        }
        let mut common = flats[class[0]].clone();
        for &u in &class[1..] {
            common = common.intersect(&flats[u], tol.feas)?.ok_or_else(|| {
                Error::HypothesisFailure {
                    stage: "zero-distance-intersection".into(),
                    vertices: vec![class[0], u],
                    detail: "flats at distance zero have an empty intersection".into(),
                }
            })?;
        }
        let n = points[class[0]].len();
        let mut mean = vec![0.0; n];
        for &u in &class {
            for (s, x) in mean.iter_mut().zip(&points[u]) {
                *s += x;
            }
        }
        for s in &mut mean {
            *s /= class.len() as f64;
        }
        let shared = common.project(&mean);
        for &u in &class {
            points[u].clone_from(&shared);
        }
    }
    Ok(())
}

/// Base case: every flat is a point; validate the edge-local hypothesis and
/// return the points.
fn select_base(
    space: &dyn Metric,
    edges: Option<&[(usize, usize)]>,
    flats: &[AffineSubspace],
    tol: &Tolerances,
) -> Result<(Vec<Vec<f64>>, StageDiagnostics)> {
    let m = space.len();
    let points: Vec<Vec<f64>> = flats.iter().map(|f| f.point().to_vec()).collect();
    let check = |u: usize, v: usize| -> Result<()> {
        let rho = space.dist(u, v);
        if rho.is_infinite() {
            return Ok(());
        }
        let d = max_norm_dist(&points[u], &points[v]);
        let slack = tol.feas * (1.0 + rho + max_norm(&points[u]) + max_norm(&points[v]));
        if d > rho * (1.0 + 1e-9) + slack {
            return Err(Error::HypothesisFailure {
                stage: "base-edge".into(),
                vertices: vec![u, v],
                detail: format!("points are {d:.6e} apart but the edge allows {rho:.6e}"),
            });
        }
        Ok(())
    };
    match edges {
        Some(list) => {
            for &(u, v) in list {
                check(u, v)?;
            }
        }
        None => {
            for u in 0..m {
                for v in (u + 1)..m {
                    check(u, v)?;
                }
            }
        }
    }
    Ok((points, StageDiagnostics::base(0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn complete_space(pts: &[Vec<f64>]) -> (PseudometricSpace, WeightedGraph) {
        let s = PseudometricSpace::from_fn_trusted(pts.len(), |i, j| {
            max_norm_dist(&pts[i], &pts[j])
        });
        let g = WeightedGraph::complete(&s);
        (s, g)
    }

    #[test]
    fn base_case_returns_the_points() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 2.0]];
        let (s, g) = complete_space(&pts);
        let flats: Vec<AffineSubspace> = pts
            .iter()
            .map(|p| AffineSubspace::from_point(p.clone()).unwrap())
            .collect();
        let sel = select_affine(&s, &g, &flats, 1.0, 0, &tol()).unwrap();
        assert_eq!(sel.points, pts);
        assert!(sel.seminorm <= 1.0 + 1e-9);
        assert_eq!(sel.diagnostics.level, 0);
    }

    #[test]
    fn base_case_chain_reaches_the_squared_distortion() {
        // Chain 0-1-2 with graph weights w and space distances
        // rho(0,1) = rho(1,2) = 2w, rho(0,2) = w: a valid distortion-2
        // graph. Point flats 0, 2w, 4w satisfy every edge check, yet the
        // full-pair seminorm is exactly 4 = distortion^2.
        let w = 0.5;
        let s = PseudometricSpace::new(&[
            vec![0.0, 2.0 * w, w],
            vec![2.0 * w, 0.0, 2.0 * w],
            vec![w, 2.0 * w, 0.0],
        ])
        .unwrap();
        let g = WeightedGraph::new(3, vec![(0, 1, w), (1, 2, w)]).unwrap();
        let flats = vec![
            AffineSubspace::from_point(vec![0.0]).unwrap(),
            AffineSubspace::from_point(vec![2.0 * w]).unwrap(),
            AffineSubspace::from_point(vec![4.0 * w]).unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 2.0, 0, &tol()).unwrap();
        assert!((sel.seminorm - 4.0).abs() < 1e-12, "seminorm {}", sel.seminorm);
    }

    #[test]
    fn two_crossing_lines_select_near_the_crossing() {
        // Lines y = x and y = -x at distance 0: any selection with finite
        // seminorm must take the same value at both vertices, hence the
        // crossing (the origin).
        let s = PseudometricSpace::new(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 1.0]]).unwrap(),
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, -1.0]]).unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert!(max_norm(&sel.points[0]) < 1e-7);
        assert!(max_norm(&sel.points[1]) < 1e-7);
        assert!(sel.seminorm < 1e-6);
    }

    #[test]
    fn parallel_lines_stay_within_their_gap() {
        // Lines y = 0 and y = 1 at distance 1: selection must bridge the
        // gap with seminorm close to 1.
        let s = PseudometricSpace::new(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap(),
            AffineSubspace::span(vec![0.0, 1.0], &[vec![1.0, 0.0]]).unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert!(flats[0].contains(&sel.points[0], 1e-8));
        assert!(flats[1].contains(&sel.points[1], 1e-8));
        assert!(sel.seminorm <= 2.0 + 1e-9, "seminorm {}", sel.seminorm);
    }

    #[test]
    fn incompatible_edge_is_reported() {
        // Two points far apart with a short edge: hypothesis fails.
        let s = PseudometricSpace::new(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::from_point(vec![0.0, 0.0]).unwrap(),
            AffineSubspace::from_point(vec![5.0, 0.0]).unwrap(),
        ];
        let err = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap_err();
        assert!(err.is_mathematical(), "unexpected error {err:?}");
    }

    #[test]
    fn autoscale_recovers_from_steep_data() {
        // Same as above, but autoscaling stretches the metric until the
        // hypothesis holds; the reported seminorm refers to the original
        // metric and so stays large.
        let s = PseudometricSpace::new(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::from_point(vec![0.0, 0.0]).unwrap(),
            AffineSubspace::from_point(vec![5.0, 0.0]).unwrap(),
        ];
        let sel = select_affine_autoscale(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert!(sel.scale >= 50.0 * (1.0 - 1e-6), "scale {}", sel.scale);
        assert!((sel.seminorm - 50.0).abs() < 1e-6);
    }

    #[test]
    fn three_planes_in_r3_admit_a_level_two_selection() {
        // Three pairwise crossing planes with a planted common structure:
        // plant a 1-Lipschitz selection and tilt planes through it.
        let planted = [
            vec![0.0, 0.0, 0.0],
            vec![0.4, -0.2, 0.1],
            vec![-0.3, 0.5, 0.2],
        ];
        let s = PseudometricSpace::from_fn_trusted(3, |i, j| {
            max_norm_dist(&planted[i], &planted[j])
        });
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::span(
                planted[0].clone(),
                &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            )
            .unwrap(),
            AffineSubspace::span(
                planted[1].clone(),
                &[vec![1.0, 0.0, 0.5], vec![0.0, 1.0, -0.25]],
            )
            .unwrap(),
            AffineSubspace::span(
                planted[2].clone(),
                &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            )
            .unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 1.0, 2, &tol()).unwrap();
        for (f, p) in flats.iter().zip(&sel.points) {
            assert!(f.contains(p, 1e-7), "selection off its flat: {p:?}");
        }
        assert!(sel.seminorm.is_finite());
        // The guaranteed constant at this level is generous; the planted
        // instance must stay well inside it.
        assert!(
            sel.seminorm <= sel.diagnostics.cube_radius_factor.max(25.0),
            "seminorm {} vs factor {}",
            sel.seminorm,
            sel.diagnostics.cube_radius_factor
        );
    }

    #[test]
    fn isolated_vertices_fall_back_to_base_points() {
        let s = PseudometricSpace::new(&[
            vec![0.0, 1.0, f64::INFINITY],
            vec![1.0, 0.0, f64::INFINITY],
            vec![f64::INFINITY, f64::INFINITY, 0.0],
        ])
        .unwrap();
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0)]).unwrap();
        let flats = vec![
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap(),
            AffineSubspace::span(vec![0.0, 0.5], &[vec![0.0, 1.0]]).unwrap(),
            AffineSubspace::span(vec![9.0, 9.0], &[vec![1.0, 0.0]]).unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert_eq!(sel.diagnostics.isolated_vertices, 1);
        assert_eq!(sel.points[2], vec![9.0, 9.0]);
        assert!(sel.seminorm.is_finite());
    }

    #[test]
    fn deterministic_across_runs() {
        let planted = [vec![0.0, 0.0], vec![1.0, -0.5], vec![0.25, 0.75]];
        let s = PseudometricSpace::from_fn_trusted(3, |i, j| {
            max_norm_dist(&planted[i], &planted[j])
        });
        let g = WeightedGraph::complete(&s);
        let flats = vec![
            AffineSubspace::span(planted[0].clone(), &[vec![1.0, 2.0]]).unwrap(),
            AffineSubspace::span(planted[1].clone(), &[vec![1.0, -1.0]]).unwrap(),
            AffineSubspace::span(planted[2].clone(), &[vec![0.0, 1.0]]).unwrap(),
        ];
        let a = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        let b = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.seminorm, b.seminorm);
    }

    #[test]
    fn zero_distance_twins_collapse_to_one_exact_point() {
        // Vertices 0 and 1 sit at distance zero with crossing lines (the x-
        // and y-axes); vertex 2 is a point flat one unit away. The twins
        // must receive the same point bit for bit — two independently
        // computed approximations would make the seminorm infinite.
        let d = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 0.0],
        ];
        let s = PseudometricSpace::new(&d.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap();
        let g = WeightedGraph::new(3, vec![(0, 1, 0.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let flats = vec![
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap(),
            AffineSubspace::span(vec![0.0, 0.0], &[vec![0.0, 1.0]]).unwrap(),
            AffineSubspace::from_point(vec![1.0, 1.0]).unwrap(),
        ];
        let sel = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap();
        assert_eq!(sel.points[0], sel.points[1]);
        assert!(max_norm(&sel.points[0]) <= 1e-9, "twins select the crossing");
        assert_eq!(sel.points[2], vec![1.0, 1.0]);
        assert!(sel.seminorm.is_finite());
    }

    #[test]
    fn zero_distance_twins_with_disjoint_flats_are_rejected() {
        // Parallel lines y = 0 and y = 1 at pseudometric distance zero: no
        // selection exists, and the failure names the twin pair.
        let d = [[0.0, 0.0], [0.0, 0.0]];
        let s = PseudometricSpace::new(&d.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap();
        let g = WeightedGraph::new(2, vec![(0, 1, 0.0)]).unwrap();
        let flats = vec![
            AffineSubspace::span(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap(),
            AffineSubspace::span(vec![0.0, 1.0], &[vec![1.0, 0.0]]).unwrap(),
        ];
        let err = select_affine(&s, &g, &flats, 1.0, 1, &tol()).unwrap_err();
        match err {
            Error::HypothesisFailure { stage, vertices, .. } => {
                assert_eq!(stage, "zero-distance");
                assert_eq!(vertices, vec![0, 1]);
            }
            other => panic!("expected a hypothesis failure, got {other:?}"),
        }
    }
}
