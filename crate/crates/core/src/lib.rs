//! Numerical laboratory for finite-entropy solutions of the 2D eikonal equation.

// negated comparisons are used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// numeric loops index several parallel arrays
#![allow(clippy::needless_range_loop)]

pub mod agflow;
pub mod besov;
pub mod compensation;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod gridcore;
pub mod io;
pub mod kinetic;
pub mod quad;

pub use error::{Error, Result};
pub use gridcore::*;
