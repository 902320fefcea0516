//! Exact and floating-point tools for moments of Weyl sums, Vinogradov
//! systems, and the inequalities relating them.

pub mod bounds;
pub mod curvepoints;
pub mod diophantine;
pub mod error;
pub mod largesieve;
pub mod summation;
pub mod vinogradov;
pub mod weylsum;

pub use diophantine::{Rational, RationalApprox};
pub use error::{Error, Result};
pub use vinogradov::{Budget, JMethod};
pub use weylsum::PolyCoeffs;
