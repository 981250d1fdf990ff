#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod checks;
pub mod cubature;
pub mod cutoff;
pub mod error;
pub mod expansion;
pub mod frame;
pub mod jacobi;
pub mod kernel;
pub mod spaces;

pub use error::{Error, Result};
