//! Seeded random instance generators for the validation suites and the
//! benchmark harness.
//!
//! Every generator is a deterministic function of the `ChaCha8Rng` it is
//! handed, so a fixed seed reproduces an instance bit for bit. Generators
//! plant a known witness wherever a pipeline needs its hypothesis to hold
//! (a unit-seminorm selection, a consistent solution, an admissible
//! curvature), and they say so in their postconditions; nothing here reads
//! answers back from the code under test.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::envelope::{c11_jet_seminorm, minimal_curvature};
use crate::geometry::{nearest_pair, AffineSubspace, Cube};
use crate::linsys::SampledSystem;
use crate::metricspace::{lipschitz_seminorm, Metric, Modulus, PseudometricSpace, WeightedGraph};
use crate::whitney::{Jet1, SampledFunction};
use crate::{euclid_dist, max_norm_dist};

/// A cube-selection instance together with the planted unit selection that
/// certifies the two-point hypothesis.
#[derive(Clone, Debug)]
pub struct CubeInstance {
    pub space: PseudometricSpace,
    pub cubes: Vec<Cube>,
    /// A selection with Lipschitz seminorm at most 1 and exact membership.
    pub planted: Vec<Vec<f64>>,
}

/// An affine-selection instance together with its planted witness.
#[derive(Clone, Debug)]
pub struct AffineInstance {
    pub space: PseudometricSpace,
    pub graph: WeightedGraph,
    pub flats: Vec<AffineSubspace>,
    /// A selection with Lipschitz seminorm at most 1; lies on the flats.
    pub planted: Vec<Vec<f64>>,
    /// Largest flat dimension (the `k` to run the engine with).
    pub k: usize,
    /// Distortion bound the graph provably satisfies.
    pub distortion: f64,
}

/// A vector-valued Lipschitz dataset with a certified Lipschitz constant.
#[derive(Clone, Debug)]
pub struct LipschitzData {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
    /// Euclidean Lipschitz constant of the data, with a hair of headroom.
    pub m_bound: f64,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}

/// Distinct points in `[-half, half]^n` with pairwise max-norm separation
/// at least `min_sep`.
fn distinct_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    n: usize,
    half: f64,
    min_sep: f64,
) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    while out.len() < count {
        let p = uniform_vec(rng, n, -half, half);
        if out.iter().all(|q| max_norm_dist(&p, q) >= min_sep) {
            out.push(p);
        }
    }
    out
}

/// A random modulus: a power `t^alpha` or a concave piecewise-linear table.
/// With `cap_visible`, the modulus exceeds 1 well inside the sampling range,
/// so normalization genuinely changes it.
pub fn random_modulus(rng: &mut ChaCha8Rng, cap_visible: bool) -> Modulus {
    if rng.gen_bool(0.6) {
        let alpha = if rng.gen_bool(0.3) { 1.0 } else { uniform(rng, 0.4, 1.0) };
        Modulus::power(alpha).expect("alpha is in range by construction")
    } else {
        let mut knots = Vec::new();
        let mut t = 0.0f64;
        let mut v = 0.0f64;
        let mut slope = if cap_visible { uniform(rng, 1.2, 3.0) } else { uniform(rng, 0.5, 1.5) };
        for _ in 0..3 {
            t += uniform(rng, 0.3, 1.2);
            v += slope * (t - knots.last().map_or(0.0, |&(kt, _)| kt));
            knots.push((t, v));
            slope *= uniform(rng, 0.4, 0.9);
        }
        Modulus::tabulated(knots).expect("knots are concave by construction")
    }
}

/// Recenter `values` and shrink them so their Lipschitz seminorm over
/// `space` is exactly `target` (no-op on constant maps).
fn rescale_to_seminorm(
    space: &PseudometricSpace,
    values: &mut [Vec<f64>],
    target: f64,
) {
    let l = lipschitz_seminorm(space, values);
    if l == 0.0 || !l.is_finite() {
        return;
    }
    let n = values[0].len();
    let m = values.len() as f64;
    let mut mean = vec![0.0; n];
    for v in values.iter() {
        for i in 0..n {
            mean[i] += v[i] / m;
        }
    }
    let s = target / l;
    for v in values.iter_mut() {
        for i in 0..n {
            v[i] = mean[i] + (v[i] - mean[i]) * s;
        }
    }
}

/// Embed random points in `R^3` (with occasional exact duplicates when
/// `duplicates` is set) and return the max-norm pseudometric they induce.
fn embedded_space(
    rng: &mut ChaCha8Rng,
    count: usize,
    duplicates: bool,
) -> (PseudometricSpace, Vec<usize>) {
    let mut anchors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut class = Vec::with_capacity(count);
    for v in 0..count {
        if duplicates && v > 0 && rng.gen_bool(0.2) {
            let twin = rng.gen_range(0..v);
            anchors.push(anchors[twin].clone());
            class.push(class[twin]);
        } else {
            anchors.push(uniform_vec(rng, 3, -2.0, 2.0));
            class.push(v);
        }
    }
    let matrix: Vec<Vec<f64>> = anchors
        .iter()
        .map(|a| anchors.iter().map(|b| max_norm_dist(a, b)).collect())
        .collect();
    let space = PseudometricSpace::new(&matrix).expect("embedded distances form a metric");
    (space, class)
}

/// A cube-selection instance (criterion: two-point hypothesis holds with
/// constant 1). Mixes point, finite and unbounded radii; the planted map is
/// a sub-unit-seminorm selection contained in every cube.
pub fn cube_instance(rng: &mut ChaCha8Rng, max_dim: usize, max_points: usize) -> CubeInstance {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_points);
    let (space, class) = embedded_space(rng, count, true);

    let mut planted: Vec<Vec<f64>> = Vec::with_capacity(count);
    for v in 0..count {
        if class[v] != v {
            planted.push(planted[class[v]].clone());
        } else {
            planted.push(uniform_vec(rng, n, -3.0, 3.0));
        }
    }
    rescale_to_seminorm(&space, &mut planted, uniform(rng, 0.3, 0.98));

    let cubes: Vec<Cube> = planted
        .iter()
        .map(|p| {
            let roll = uniform(rng, 0.0, 1.0);
            if roll < 0.2 {
                Cube::new(p.clone(), 0.0)
            } else if roll < 0.35 {
                let off = uniform_vec(rng, n, -5.0, 5.0);
                let center = p.iter().zip(&off).map(|(a, b)| a + b).collect();
                Cube::new(center, f64::INFINITY)
            } else {
                let r = 10.0f64.powf(uniform(rng, -1.3, 0.7));
                let center = p
                    .iter()
                    .map(|&a| a + uniform(rng, -0.999 * r, 0.999 * r))
                    .collect();
                Cube::new(center, r)
            }
            .expect("generated cubes are valid")
        })
        .collect();
    CubeInstance { space, cubes, planted }
}

/// An affine-selection instance whose planted selection has seminorm below 1
/// and lies on every flat, so the unit-seminorm hypothesis holds on every
/// subset. `sparse` draws a random connected graph and takes its path metric
/// as the space (distortion exactly 1); otherwise the graph is complete.
pub fn affine_instance(
    rng: &mut ChaCha8Rng,
    max_k: usize,
    max_dim: usize,
    max_vertices: usize,
    sparse: bool,
) -> AffineInstance {
    // Tiny instances often have flats with a common point (two lines in the
    // plane, full-dimensional flats), making the optimal seminorm zero and
    // every engine-to-optimum ratio meaningless. Any edge whose flats sit
    // `d` apart certifies optimum >= d / rho(edge), so redraw until that
    // bound clears a floor.
    for _ in 0..20 {
        let inst = affine_instance_raw(rng, max_k, max_dim, max_vertices, sparse);
        if edge_gap_bound(&inst) >= 0.02 {
            return inst;
        }
    }
    affine_instance_raw(rng, max_k, max_dim, max_vertices, sparse)
}

/// Largest edge-wise `dist(F_u, F_v) / rho(u, v)`: a certified lower bound
/// for the optimal selection seminorm, since any selection bridges each
/// flat gap over the edge's distance.
fn edge_gap_bound(inst: &AffineInstance) -> f64 {
    let mut bound = 0.0f64;
    for &(u, v, _) in inst.graph.edges() {
        let rho = inst.space.dist(u, v);
        if rho > 0.0 && rho.is_finite() {
            if let Ok(pair) = nearest_pair(&inst.flats[u], &inst.flats[v], 1e-9) {
                bound = bound.max(pair.distance / rho);
            }
        }
    }
    bound
}

fn affine_instance_raw(
    rng: &mut ChaCha8Rng,
    max_k: usize,
    max_dim: usize,
    max_vertices: usize,
    sparse: bool,
) -> AffineInstance {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_vertices);
    let (embedded, class) = embedded_space(rng, count, true);

    let (space, graph) = if sparse {
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for v in 1..count {
            let u = rng.gen_range(0..v);
            edges.push((u, v, embedded.dist(u, v)));
        }
        for _ in 0..count / 2 {
            let u = rng.gen_range(0..count);
            let v = rng.gen_range(0..count);
            if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v), embedded.dist(u, v)));
            }
        }
        let graph = WeightedGraph::new(count, edges).expect("edges are in range");
        let sigma = graph.path_metric();
        let matrix: Vec<Vec<f64>> = (0..count)
            .map(|i| (0..count).map(|j| sigma.dist(i, j)).collect())
            .collect();
        let space = PseudometricSpace::new(&matrix).expect("path metrics are metrics");
        (space, graph)
    } else {
        let graph = WeightedGraph::complete(&embedded);
        (embedded, graph)
    };

    let mut planted: Vec<Vec<f64>> = Vec::with_capacity(count);
    for v in 0..count {
        if class[v] != v {
            planted.push(planted[class[v]].clone());
        } else {
            planted.push(uniform_vec(rng, n, -2.0, 2.0));
        }
    }
    rescale_to_seminorm(&space, &mut planted, uniform(rng, 0.3, 0.95));

    let k_target = rng.gen_range(0..=max_k.min(n));
    let mut k = 0usize;
    let flats: Vec<AffineSubspace> = planted
        .iter()
        .enumerate()
        .map(|(v, p)| {
            let want = if v == 0 { k_target } else { rng.gen_range(0..=k_target) };
            let dirs: Vec<Vec<f64>> =
                (0..want).map(|_| uniform_vec(rng, n, -1.0, 1.0)).collect();
            let flat = AffineSubspace::span(p.clone(), &dirs)
                .expect("random spans through a finite point are valid");
            k = k.max(flat.dim());
            flat
        })
        .collect();
    AffineInstance { space, graph, flats, planted, k, distortion: 1.0 }
}

/// A point-flat (`k = 0`) instance on a sparse graph whose path metric
/// distorts the space by at most `a` in both directions, with the planted
/// values satisfying the edge-local hypothesis at scale 1. Along graph
/// paths the values may drift up to `a²` times the space distance, which is
/// exactly the slack the base-case bound grants.
pub fn base_case_instance(
    rng: &mut ChaCha8Rng,
    a: f64,
    max_dim: usize,
    max_vertices: usize,
) -> AffineInstance {
    assert!(a == 1.0 || a == 2.0, "synthetic distortion is 1 or 2");
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(3..=max_vertices.max(3));
    let anchors = distinct_points(rng, count, 3, 2.0, 0.05);

    // Connected sparse graph with edge weights shrunk below the anchor
    // distances by per-edge factors in [1/a, 1].
    let shrink = |rng: &mut ChaCha8Rng| if a == 1.0 { 1.0 } else { uniform(rng, 1.0 / a, 1.0) };
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..count {
        let u = rng.gen_range(0..v);
        let f = shrink(rng);
        edges.push((u, v, max_norm_dist(&anchors[u], &anchors[v]) * f));
    }
    for _ in 0..count / 2 {
        let u = rng.gen_range(0..count);
        let v = rng.gen_range(0..count);
        if u != v && !edges.iter().any(|&(x, y, _)| (x, y) == (u.min(v), u.max(v))) {
            let w = max_norm_dist(&anchors[u], &anchors[v]) * shrink(rng);
            edges.push((u.min(v), u.max(v), w));
        }
    }
    let graph = WeightedGraph::new(count, edges).expect("edges are in range");
    let sigma = graph.path_metric();

    // Space metric: max(sigma / a, c* anchor-metric), with c* chosen so the
    // second term stays below a·sigma. Both terms are pseudometrics, hence
    // so is their max, and sigma distorts it by at most a on every pair.
    let mut c_star = f64::INFINITY;
    for i in 0..count {
        for j in (i + 1)..count {
            let rho0 = max_norm_dist(&anchors[i], &anchors[j]);
            c_star = c_star.min(a * sigma.dist(i, j) / rho0);
        }
    }
    c_star *= 1.0 - 1e-9;
    let matrix: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            (0..count)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        (sigma.dist(i, j) / a)
                            .max(c_star * max_norm_dist(&anchors[i], &anchors[j]))
                    }
                })
                .collect()
        })
        .collect();
    let space = PseudometricSpace::new(&matrix).expect("max of pseudometrics is one");

    // Plant values and scale them so the worst edge ratio is just below 1.
    let mut values: Vec<Vec<f64>> = (0..count).map(|_| uniform_vec(rng, n, -2.0, 2.0)).collect();
    let mut worst = 0.0f64;
    for &(u, v, _) in graph.edges() {
        worst = worst.max(max_norm_dist(&values[u], &values[v]) / space.dist(u, v));
    }
    if worst > 0.0 {
        let s = uniform(rng, 0.7, 0.999) / worst;
        for v in values.iter_mut() {
            for c in v.iter_mut() {
                *c *= s;
            }
        }
    }

    let flats: Vec<AffineSubspace> = values
        .iter()
        .map(|p| AffineSubspace::from_point(p.clone()).expect("finite points"))
        .collect();
    AffineInstance { space, graph, flats, planted: values, k: 0, distortion: a }
}

/// A random first-order jet with unconstrained values and gradients,
/// carrying a random modulus.
pub fn jet_instance(rng: &mut ChaCha8Rng, max_dim: usize, max_points: usize) -> Jet1 {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 2.0, 0.05);
    let values = (0..count).map(|_| uniform(rng, -2.0, 2.0)).collect();
    let gradients = (0..count).map(|_| uniform_vec(rng, n, -2.0, 2.0)).collect();
    Jet1::new(points, values, gradients, random_modulus(rng, false))
        .expect("generated jets are valid")
}

/// A jet sampled from one global quadratic, rescaled so its second-order
/// seminorm lands in `[0.5, 2]`. Sampling a quadratic zeroes the symmetrized
/// Taylor defect of every pair, which makes the least admissible curvature
/// at most `sqrt(n)` times the seminorm — the generator asserts this, so
/// extension with the seminorm as curvature bound always proceeds.
pub fn quadratic_jet_instance(rng: &mut ChaCha8Rng, max_dim: usize, max_points: usize) -> Jet1 {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 1.5, 0.05);

    let mut hess = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let e = uniform(rng, -1.0, 1.0) + if i == j { 0.3 } else { 0.0 };
            hess[i][j] = e;
            hess[j][i] = e;
        }
    }
    let lin = uniform_vec(rng, n, -1.0, 1.0);
    let off = uniform(rng, -1.0, 1.0);

    let mut values = Vec::with_capacity(count);
    let mut gradients = Vec::with_capacity(count);
    for p in &points {
        let hp: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hess[i][j] * p[j]).sum()).collect();
        values.push(0.5 * crate::dot(&hp, p) + crate::dot(&lin, p) + off);
        gradients.push((0..n).map(|i| hp[i] + lin[i]).collect());
    }
    let jet = Jet1::new(points, values, gradients, Modulus::power(1.0).unwrap())
        .expect("quadratic samples are valid jets");

    let seminorm = c11_jet_seminorm(&jet);
    if seminorm == 0.0 {
        return jet;
    }
    let s = uniform(rng, 0.5, 2.0) / seminorm;
    let values: Vec<f64> = jet.values.iter().map(|v| v * s).collect();
    let gradients: Vec<Vec<f64>> =
        jet.gradients.iter().map(|g| g.iter().map(|c| c * s).collect()).collect();
    let jet = Jet1::new(jet.points.clone(), values, gradients, Modulus::power(1.0).unwrap())
        .expect("rescaled jets stay valid");

    let m = c11_jet_seminorm(&jet);
    let sharp = minimal_curvature(&jet);
    assert!(
        sharp <= (n as f64).sqrt() * m * (1.0 + 1e-9),
        "quadratic jets must stay curvature-admissible: sharp {sharp}, bound {}",
        (n as f64).sqrt() * m
    );
    jet
}

/// A vector-valued Lipschitz dataset; `m_bound` is its exact Euclidean
/// Lipschitz constant with a sliver of headroom.
pub fn lipschitz_data_instance(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_codim: usize,
    max_points: usize,
) -> LipschitzData {
    let n = rng.gen_range(1..=max_dim);
    let m = rng.gen_range(1..=max_codim);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 2.0, 0.05);
    let mut values: Vec<Vec<f64>> = (0..count).map(|_| uniform_vec(rng, m, -2.0, 2.0)).collect();
    if rng.gen_bool(0.1) {
        let first = values[0].clone();
        values = vec![first; count];
    }

    let lip = |vals: &[Vec<f64>]| -> f64 {
        let mut l = 0.0f64;
        for i in 0..count {
            for j in (i + 1)..count {
                l = l.max(euclid_dist(&vals[i], &vals[j]) / euclid_dist(&points[i], &points[j]));
            }
        }
        l
    };
    let l0 = lip(&values);
    if l0 > 0.0 {
        let s = uniform(rng, 0.5, 3.0) / l0;
        for v in values.iter_mut() {
            for c in v.iter_mut() {
                *c *= s;
            }
        }
    }
    let m_bound = (lip(&values) * (1.0 + 1e-9)).max(1.0e-6);
    LipschitzData { points, values, m_bound }
}

/// A pointwise linear system with a planted solution (so every point is
/// consistent), including occasional duplicated rows. With
/// `inconsistent_at = Some(p)`, point `p` instead receives a contradictory
/// duplicated row; the returned index is the one the solver must name.
pub fn system_instance(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_rows: usize,
    max_cols: usize,
    max_points: usize,
    inconsistent_at: Option<usize>,
) -> SampledSystem {
    let n = rng.gen_range(1..=max_dim);
    let rows = rng.gen_range(if inconsistent_at.is_some() { 2 } else { 1 }..=max_rows.max(2));
    let cols = rng.gen_range(1..=max_cols);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 2.0, 0.05);

    let mut matrices = Vec::with_capacity(count);
    let mut rhs = Vec::with_capacity(count);
    for p in 0..count {
        let planted = uniform_vec(rng, cols, -2.0, 2.0);
        let mut a: Vec<Vec<f64>> = (0..rows).map(|_| uniform_vec(rng, cols, -1.0, 1.0)).collect();
        if rows >= 2 && rng.gen_bool(0.3) {
            let factor = uniform(rng, -1.5, 1.5);
            a[rows - 1] = a[0].iter().map(|c| c * factor).collect();
        }
        let mut b: Vec<f64> = a.iter().map(|row| crate::dot(row, &planted)).collect();
        if inconsistent_at == Some(p) {
            a[1] = a[0].clone();
            b[1] = b[0] + 0.5 * (1.0 + b[0].abs());
        }
        matrices.push(a);
        rhs.push(b);
    }
    let alpha = if rng.gen_bool(0.5) { 1.0 } else { 0.5 };
    SampledSystem::new(points, matrices, rhs, Modulus::power(alpha).unwrap())
        .expect("generated systems are well-shaped")
}

/// Scalar samples with a raw (uncapped) modulus whose values exceed 1
/// inside the data range, so capping at 1 is observable.
pub fn holder_sample_instance(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_points: usize,
) -> (Vec<Vec<f64>>, Vec<f64>, Modulus) {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 4.0, 0.05);
    let values = (0..count).map(|_| uniform(rng, -2.0, 2.0)).collect();
    (points, values, random_modulus(rng, true))
}

/// A scalar sampled function for the jet-completion pipeline.
pub fn sampled_function_instance(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    max_points: usize,
) -> SampledFunction {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(2..=max_points);
    let points = distinct_points(rng, count, n, 2.0, 0.05);
    let values = (0..count).map(|_| uniform(rng, -2.0, 2.0)).collect();
    SampledFunction::new(points, values, random_modulus(rng, false))
        .expect("generated samples are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn generators_are_deterministic_in_the_seed() {
        let a = cube_instance(&mut rng(7), 3, 12);
        let b = cube_instance(&mut rng(7), 3, 12);
        assert_eq!(a.planted, b.planted);
        assert_eq!(
            a.cubes.iter().map(|c| c.radius).collect::<Vec<_>>(),
            b.cubes.iter().map(|c| c.radius).collect::<Vec<_>>()
        );
        let x = affine_instance(&mut rng(9), 2, 3, 8, true);
        let y = affine_instance(&mut rng(9), 2, 3, 8, true);
        assert_eq!(x.planted, y.planted);
    }

    #[test]
    fn cube_instances_contain_their_planted_map() {
        for seed in 0..30 {
            let inst = cube_instance(&mut rng(seed), 3, 12);
            let l = lipschitz_seminorm(&inst.space, &inst.planted);
            assert!(l <= 1.0, "planted seminorm {l} at seed {seed}");
            for (p, c) in inst.planted.iter().zip(&inst.cubes) {
                assert!(c.contains(p, 1e-12), "planted point escapes its cube");
            }
        }
    }

    #[test]
    fn affine_instances_plant_a_unit_witness() {
        for seed in 0..30 {
            let sparse = seed % 2 == 0;
            let inst = affine_instance(&mut rng(seed), 2, 3, 8, sparse);
            let l = lipschitz_seminorm(&inst.space, &inst.planted);
            assert!(l <= 1.0, "planted seminorm {l} at seed {seed}");
            for (p, f) in inst.planted.iter().zip(&inst.flats) {
                assert!(f.projection_residual(p) < 1e-9);
            }
            inst.graph.distortion_within(&inst.space, inst.distortion).unwrap();
        }
    }

    #[test]
    fn base_case_instances_respect_edge_hypothesis_and_distortion() {
        for seed in 0..30 {
            let a = if seed % 2 == 0 { 1.0 } else { 2.0 };
            let inst = base_case_instance(&mut rng(seed), a, 3, 8);
            inst.graph.distortion_within(&inst.space, a).unwrap();
            for &(u, v, _) in inst.graph.edges() {
                let d = max_norm_dist(&inst.planted[u], &inst.planted[v]);
                assert!(d <= inst.space.dist(u, v) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn quadratic_jets_are_curvature_admissible() {
        for seed in 0..30 {
            let jet = quadratic_jet_instance(&mut rng(seed), 3, 8);
            let m = c11_jet_seminorm(&jet);
            assert!(m <= 2.0 + 1e-9 && (m == 0.0 || m >= 0.5 - 1e-9));
        }
    }

    #[test]
    fn lipschitz_data_certifies_its_constant() {
        for seed in 0..30 {
            let data = lipschitz_data_instance(&mut rng(seed), 3, 3, 8);
            for i in 0..data.points.len() {
                for j in (i + 1)..data.points.len() {
                    let lv = euclid_dist(&data.values[i], &data.values[j]);
                    let lp = euclid_dist(&data.points[i], &data.points[j]);
                    assert!(lv <= data.m_bound * lp * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn planted_systems_are_consistent_except_where_asked() {
        use crate::linsys::solution_flat;
        for seed in 0..20 {
            let sys = system_instance(&mut rng(seed), 3, 4, 4, 10, None);
            for p in 0..sys.len() {
                solution_flat(&sys.matrices[p], &sys.rhs[p]).unwrap();
            }
            let bad = system_instance(&mut rng(seed), 3, 4, 4, 10, Some(0));
            assert!(solution_flat(&bad.matrices[0], &bad.rhs[0]).is_err());
        }
    }
}
