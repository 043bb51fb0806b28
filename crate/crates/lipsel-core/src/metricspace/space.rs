//! Finite pseudometric spaces with possibly infinite distances, and a trait
//! for metric views that avoids materializing quadratically many distances.

use crate::error::{Error, Result};

/// A read-only view of a finite pseudometric. Implementations may compute
/// distances on the fly; `PseudometricSpace` materializes them.
pub trait Metric {
    /// Number of points.
    fn len(&self) -> usize;
    /// Distance between points `i` and `j` (nonnegative, possibly infinite).
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A finite pseudometric space with an explicit distance matrix. Distances
/// may be zero off the diagonal and may be `f64::INFINITY`.
#[derive(Clone, Debug)]
pub struct PseudometricSpace {
    n: usize,
    d: Vec<f64>,
}

impl PseudometricSpace {
    /// Validate and build a space from a full distance matrix: square,
    /// symmetric, zero diagonal, nonnegative entries, triangle inequality.
    pub fn new(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Input("pseudometric space needs at least one point".into()));
        }
        let mut d = vec![0.0; n * n];
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "distance matrix row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v.is_nan() || v < 0.0 {
                    return Err(Error::Input(format!(
                        "distance ({i},{j}) must be nonnegative or infinite"
                    )));
                }
                d[i * n + j] = v;
            }
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::Input(format!("diagonal entry {i} is nonzero")));
            }
            for j in 0..i {
                let a = d[i * n + j];
                let b = d[j * n + i];
                let scale = 1.0 + a.min(b);
                if (a - b).abs() > 1e-9 * scale && !(a.is_infinite() && b.is_infinite()) {
                    return Err(Error::Input(format!(
                        "distance matrix is asymmetric at ({i},{j})"
                    )));
                }
                // Symmetrize exactly so downstream comparisons are stable.
                let v = a.min(b);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let space = Self { n, d };
        space.check_triangle()?;
        Ok(space)
    }

    /// Build a space from a distance function without validation. Intended
    /// for internal constructions that are pseudometrics by design.
    pub fn from_fn_trusted(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = if i == j { 0.0 } else { f(i, j) };
            }
        }
        Self { n, d }
    }

    /// The subspace on the given points (in the given order).
    pub fn restriction(&self, points: &[usize]) -> Result<Self> {
        for &p in points {
            if p >= self.n {
                return Err(Error::Input(format!("restriction point {p} out of range")));
            }
        }
        let m = points.len();
        if m == 0 {
            return Err(Error::Input("restriction to an empty point set".into()));
        }
        let mut d = vec![0.0; m * m];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                d[a * m + b] = self.d[i * self.n + j];
            }
        }
        Ok(Self { n: m, d })
    }

    fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                let dik = self.d[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let bound = dik + self.d[k * n + j];
                    let dij = self.d[i * n + j];
                    if dij > bound + 1e-9 * (1.0 + bound) {
                        return Err(Error::Input(format!(
                            "triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Metric for PseudometricSpace {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

impl<M: Metric + ?Sized> Metric for &M {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
}

/// The max-norm Lipschitz seminorm of a map `points: V -> R^n` with respect
/// to a metric view: the largest ratio `||f(i) - f(j)||_inf / d(i, j)` over
/// pairs, with the conventions `0/0 = 0` and `positive/0 = infinity`;
/// infinite distances never contribute.
pub fn lipschitz_seminorm<M: Metric>(space: &M, points: &[Vec<f64>]) -> f64 {
    let n = space.len();
    assert_eq!(points.len(), n, "one value per point required");
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            if d.is_infinite() {
                continue;
            }
            let diff = crate::max_norm_dist(&points[i], &points[j]);
            if d == 0.0 {
                if diff > 0.0 {
                    return f64::INFINITY;
                }
            } else {
                worst = worst.max(diff / d);
            }
        }
    }
    worst
}
