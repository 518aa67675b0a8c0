//! Curves, regions and the `F_c = Length - c Area` functional on flat tori,
//! round spheres and the Euclidean plane.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corners;
pub mod curve;
pub mod error;
pub mod flow;
pub mod functional;
pub mod io;
pub mod minmax;
pub mod oracle;
pub mod surface;

pub use error::{Error, Result};
