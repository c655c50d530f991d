//! Convolution operators on entire functions of exponential type.
// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bg_verify;
pub mod borel;
pub mod catalog;
pub mod config;
pub mod criterion;
pub mod error;
pub mod operators;
pub mod report;
pub mod series;
pub use error::{Error, Result};
