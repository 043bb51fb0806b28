//! Lipschitz selection algorithms: cube-valued maps by two-pass relaxation
//! and affine-set-valued maps by induction on flat dimension.

pub mod affine_select;
pub mod cube_select;
pub mod validate;

pub use affine_select::{
    select_affine, select_affine_autoscale, CenterDeviation, Selection, StageDiagnostics,
};
pub use cube_select::select_cube;
pub use validate::{validate_selection, ValidationReport};
