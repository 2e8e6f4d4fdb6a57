//! Grids, masked domains, fields, finite differences and the canonical field library.

pub mod canonical;
pub mod field;
pub mod grid;
pub mod ops;
pub mod testfn;

pub use canonical::{make_canonical_field, Axis, CanonicalKind, DEFAULT_CORE_CELLS};
pub use field::{wrap_angle, AngleField, ScalarField, VectorField2};
pub use grid::{Grid2, Mask, RegionSpec};
pub use ops::{
    curl, divergence, finite_difference, finite_difference_angle, gradient_norm, integrate,
    lp_norm, lp_norm_vector, mollify, rescale_field, sample_scalar, sample_unit, Displacement,
    FdMode,
};
pub use testfn::TestFunction;
