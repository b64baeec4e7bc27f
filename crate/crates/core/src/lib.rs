//! Persistent homology of activation point clouds, barcode summaries, and the
//! statistical pipelines built on top of them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod dispersion;
pub mod error;
pub mod features;
pub mod global;
pub mod local;
pub mod ph;
pub mod seed;
pub mod stats;
pub mod svg;

pub use error::{Error, ErrorKind, Result};
