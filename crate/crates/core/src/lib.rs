// `!(x > 0.0)` is used on purpose throughout: it rejects NaN along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod config;
pub mod error;
pub mod evolution;
pub mod feynman_kac;
pub mod fraclap;
pub mod grid;
pub mod nonlinearity;
pub mod quadrature;
pub mod runner;
pub mod special;
pub mod stable;
pub mod steady;

pub use error::{FujitaError, Result};
