//! Hybrid feature-fusion fake-news classifier.
//!
//! The crate is `no_std` (with `alloc`) and carries everything that is pure
//! computation: text statistics, the fusion model with its forward and
//! analytic backward passes, Adam training, stratified cross-validation,
//! confusion-matrix metrics and Shapley attribution. File formats, the CLI
//! and wall-clock timing live in the `fusenews` companion crate.
//!
//! All arithmetic is `f64`. Every source of randomness is an explicit
//! [`Rng`] seeded by the caller.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod dataset;
pub mod encoder;
pub mod explain;
pub mod model;
pub mod numerics;
pub mod synthetic;
pub mod text;
pub mod train;

pub use error::{Error, Result};
pub use numerics::{Matrix, Rng};
