//! Input document schemas (versioned JSON) and their conversion into core
//! types. Extended reals accept either a JSON number or the strings
//! `"inf"` / `"-inf"`, mirroring the output convention.

use serde::Deserialize;

use lipsel_core::geometry::{AffineSubspace, Cube};
use lipsel_core::linsys::SampledSystem;
use lipsel_core::metricspace::{Modulus, PseudometricSpace, WeightedGraph};
use lipsel_core::whitney::{Jet1, SampledFunction};
use lipsel_core::{Error, Result};

/// The one schema version this build reads and writes.
pub const SCHEMA_VERSION: i64 = 1;

/// An `f64` that also accepts `"inf"` / `"+inf"` / `"-inf"`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ExtF64 {
    Num(f64),
    Named(ExtName),
}

#[derive(Clone, Copy, Debug, Deserialize)]
pub enum ExtName {
    #[serde(rename = "inf", alias = "+inf")]
    PosInf,
    #[serde(rename = "-inf")]
    NegInf,
}

impl ExtF64 {
    pub fn value(self) -> f64 {
        match self {
            ExtF64::Num(x) => x,
            ExtF64::Named(ExtName::PosInf) => f64::INFINITY,
            ExtF64::Named(ExtName::NegInf) => f64::NEG_INFINITY,
        }
    }
}

fn ext_matrix(rows: &[Vec<ExtF64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|x| x.value()).collect()).collect()
}

/// Reject inputs declaring a schema version this build does not speak.
pub fn check_version(version: Option<i64>) -> Result<()> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Input(format!(
            "input declares schema_version {v}, this build reads {SCHEMA_VERSION}"
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceIn {
    pub schema_version: Option<i64>,
    /// Optional point coordinates, for human reference only.
    pub points: Option<Vec<Vec<f64>>>,
    pub dist: Vec<Vec<ExtF64>>,
}

impl SpaceIn {
    pub fn build(&self) -> Result<PseudometricSpace> {
        check_version(self.schema_version)?;
        if let Some(points) = &self.points {
            if points.len() != self.dist.len() {
                return Err(Error::Input(format!(
                    "{} labeled points for a {}-row distance matrix",
                    points.len(),
                    self.dist.len()
                )));
            }
        }
        PseudometricSpace::new(&ext_matrix(&self.dist))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphIn {
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<ExtF64>,
    #[serde(rename = "A")]
    pub a: f64,
    pub rho: Vec<Vec<ExtF64>>,
}

impl GraphIn {
    pub fn build(&self) -> Result<(PseudometricSpace, WeightedGraph, f64)> {
        if self.edges.len() != self.weights.len() {
            return Err(Error::Input(format!(
                "{} edges but {} weights",
                self.edges.len(),
                self.weights.len()
            )));
        }
        let space = PseudometricSpace::new(&ext_matrix(&self.rho))?;
        let edges = self
            .edges
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), w)| (u, v, w.value()))
            .collect();
        let graph = WeightedGraph::new(self.rho.len(), edges)?;
        if !(self.a >= 1.0) {
            return Err(Error::Input(format!("distortion A must be at least 1, got {}", self.a)));
        }
        Ok((space, graph, self.a))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatIn {
    pub base: Vec<f64>,
    #[serde(default)]
    pub basis: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapIn {
    pub flats: Vec<FlatIn>,
    pub k: usize,
}

impl MapIn {
    pub fn build(&self) -> Result<(Vec<AffineSubspace>, usize)> {
        let flats = self
            .flats
            .iter()
            .map(|f| AffineSubspace::span(f.base.clone(), &f.basis))
            .collect::<Result<Vec<_>>>()?;
        Ok((flats, self.k))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaIn {
    pub kind: String,
    pub alpha: Option<f64>,
    pub knots: Option<Vec<(f64, f64)>>,
}

impl OmegaIn {
    pub fn build(&self) -> Result<Modulus> {
        match self.kind.as_str() {
            "power" => {
                let alpha = self.alpha.ok_or_else(|| {
                    Error::Input("power modulus needs an \"alpha\" field".into())
                })?;
                Modulus::power(alpha)
            }
            "tabulated" => {
                let knots = self.knots.clone().ok_or_else(|| {
                    Error::Input("tabulated modulus needs a \"knots\" field".into())
                })?;
                Modulus::tabulated(knots)
            }
            other => Err(Error::Input(format!(
                "unknown modulus kind {other:?}; expected \"power\" or \"tabulated\""
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectIn {
    pub schema_version: Option<i64>,
    pub graph: GraphIn,
    pub map: MapIn,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubesIn {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<ExtF64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectCubeIn {
    pub schema_version: Option<i64>,
    pub space: SpaceIn,
    pub cubes: CubesIn,
}

impl SelectCubeIn {
    pub fn build(&self) -> Result<(PseudometricSpace, Vec<Cube>)> {
        check_version(self.schema_version)?;
        let space = self.space.build()?;
        if self.cubes.centers.len() != self.cubes.radii.len() {
            return Err(Error::Input(format!(
                "{} centers but {} radii",
                self.cubes.centers.len(),
                self.cubes.radii.len()
            )));
        }
        let cubes = self
            .cubes
            .centers
            .iter()
            .zip(&self.cubes.radii)
            .map(|(c, r)| Cube::new(c.clone(), r.value()))
            .collect::<Result<Vec<_>>>()?;
        Ok((space, cubes))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledIn {
    pub schema_version: Option<i64>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub omega: OmegaIn,
}

impl SampledIn {
    pub fn build(&self) -> Result<SampledFunction> {
        check_version(self.schema_version)?;
        SampledFunction::new(self.x.clone(), self.f.clone(), self.omega.build()?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueriesIn {
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendIn {
    pub schema_version: Option<i64>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub omega: Option<OmegaIn>,
    /// Curvature budget: the extension uses `sqrt(n) * m` as the common
    /// Hessian coefficient.
    pub m: f64,
    pub queries: QueriesIn,
}

impl ExtendIn {
    pub fn build(&self) -> Result<Jet1> {
        check_version(self.schema_version)?;
        let omega = match &self.omega {
            Some(o) => o.build()?,
            None => Modulus::power(1.0).expect("identity modulus is valid"),
        };
        Jet1::new(self.x.clone(), self.f.clone(), self.g.clone(), omega)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KirszbraunIn {
    pub schema_version: Option<i64>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    /// Vector values, one per point.
    pub f: Vec<Vec<f64>>,
    pub m: f64,
    pub queries: QueriesIn,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemIn {
    pub schema_version: Option<i64>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    pub omega: OmegaIn,
}

impl SystemIn {
    pub fn build(&self) -> Result<SampledSystem> {
        check_version(self.schema_version)?;
        SampledSystem::new(self.x.clone(), self.a.clone(), self.b.clone(), self.omega.build()?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleIn {
    pub schema_version: Option<i64>,
    pub graph: GraphIn,
    pub map: MapIn,
    /// `"optimal"` (default) or `"finiteness"`.
    pub mode: Option<String>,
}
