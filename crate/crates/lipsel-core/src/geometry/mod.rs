//! Geometric primitives: affine flats with orthonormal bases, axis-parallel
//! cubes, canonical nearest pairs under the max norm, and the face
//! decomposition of near-intersections of flats.

pub mod affine;
pub mod cube;
pub mod decompose;

pub use affine::{hyperplane, nearest_pair, orthonormal_complement, AffineSubspace, NearestPair};
pub use cube::Cube;
pub use decompose::{decompose_intersection, Branch, Decomposition, Face, FaceKind};
