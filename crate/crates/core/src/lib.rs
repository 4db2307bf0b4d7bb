//! Real interpolation of `[0, ∞]`-valued couples, m-accretive operators and the
//! nonlinear semigroups they generate, evaluated on logarithmic grids.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod accretive;
pub mod cli;
pub mod error;
pub mod grid;
pub mod harness;
pub mod interpolation;
pub mod linalg;
pub mod normed;
pub mod semigroup;
pub mod spaces;

pub use error::{Error, Result};
