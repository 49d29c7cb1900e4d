//! Mixed discontinuous Galerkin discretization of the Naghdi shell model.

// `!(x > 0.0)` is used on purpose so NaN fails validation; index loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod material;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod spaces;
pub mod sparse;

pub use error::{Error, Result};
