//! Weighted graphs over the points of a pseudometric space, their path
//! metrics, and the distortion check that certifies a graph as a faithful
//! sparse stand-in for a space.

use crate::error::{Error, Result};
use crate::metricspace::space::{Metric, PseudometricSpace};

/// An undirected weighted graph on vertices `0..n`. Weights are nonnegative
/// and may be infinite (such edges are allowed but useless).
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("graph needs at least one vertex".into()));
        }
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            if w.is_nan() || w < 0.0 {
                return Err(Error::Input(format!(
                    "edge ({u},{v}) needs a nonnegative or infinite weight"
                )));
            }
        }
        Ok(Self { n, edges })
    }

    /// The complete graph on a space, one edge per pair, weighted by the
    /// space distance.
    pub fn complete(space: &PseudometricSpace) -> Self {
        let n = space.len();
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, space.dist(i, j)));
            }
        }
        Self { n, edges }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Shortest-path pseudometric of the graph, with infinite distance
    /// between disconnected vertices.
    pub fn path_metric(&self) -> PseudometricSpace {
        let n = self.n;
        let mut d = vec![f64::INFINITY; n * n];
        for i in 0..n {
            d[i * n + i] = 0.0;
        }
        for &(u, v, w) in &self.edges {
            if w < d[u * n + v] {
                d[u * n + v] = w;
                d[v * n + u] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                        d[j * n + i] = via;
                    }
                }
            }
        }
        PseudometricSpace::from_fn_trusted(n, |i, j| d[i * n + j])
    }

    /// Check that the graph's path metric `sigma` distorts the space metric
    /// by at most `a`: `rho / a <= sigma <= a rho` on every pair. Returns
    /// the worst measured distortion factor.
    pub fn distortion_within(&self, space: &PseudometricSpace, a: f64) -> Result<f64> {
        if space.len() != self.n {
            return Err(Error::Input("graph and space have different point counts".into()));
        }
        if !(a >= 1.0) {
            return Err(Error::Input("distortion constant must be at least 1".into()));
        }
        let sigma = self.path_metric();
        let mut worst = 1.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let rho = space.dist(i, j);
                let s = sigma.dist(i, j);
                let factor = match (rho.is_infinite(), s.is_infinite()) {
                    (true, true) => 1.0,
                    (true, false) | (false, true) => f64::INFINITY,
                    (false, false) => {
                        if rho == 0.0 && s == 0.0 {
                            1.0
                        } else if rho == 0.0 || s == 0.0 {
                            f64::INFINITY
                        } else {
                            (s / rho).max(rho / s)
                        }
                    }
                };
                worst = worst.max(factor);
                if factor > a * (1.0 + 1e-9) {
                    return Err(Error::Input(format!(
                        "graph distorts pair ({i},{j}) by {factor:.6}, above the bound {a}"
                    )));
                }
            }
        }
        Ok(worst)
    }
}
