//! Kähler and hyper-Kähler lifts of Hessian and special Kähler structures,
//! with pointwise numerical verification of the identities they satisfy.

pub mod cmap;
pub mod cones;
pub mod error;
pub mod expr;
pub mod hessian;
pub mod report;
pub mod rmap;
pub mod suites;
pub mod tensor;

pub use error::{Error, Result};
