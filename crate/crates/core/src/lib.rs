#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod droplet;
pub mod equilibrium;
pub mod error;
pub mod format;
pub mod norms;
pub mod oracles;
pub mod partition;
pub mod potential;
pub mod quadrature;
pub mod special_fn;
pub mod summation;

pub use error::{Error, Result};
