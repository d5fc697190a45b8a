//! Quadric rational Bézier patches.
//!
//! Given a quadratic rational triangular or biquadratic control net, this
//! crate decides whether the patch lies on a quadric, recovers the implicit
//! equation through a projective frame built from the corner tangent planes,
//! classifies the quadric and computes its Euclidean elements: center,
//! principal planes and axes, vertex or apex, and revolution tests.
//!
//! The entry point is [`analyze`]; [`Report`] turns the result into a
//! serializable document.

pub mod canonical;
pub mod classify;
mod error;
pub mod euclid;
pub mod forms;
pub mod frame;
pub mod patch;
pub mod pipeline;
pub mod projective;
pub mod report;
mod tol;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use pipeline::{analyze, Analysis, Options, Route};
pub use report::Report;
pub use tol::Tolerances;
