//! Adjoint orbits of SL(n, ℝ) through real hyperbolic elements, their
//! identification with cotangent bundles of real flag manifolds, and numerical
//! checks that the identification carries the Liouville form to the KKS form.

pub mod cli;
pub mod error;
pub mod iwasawa;
pub mod lie_model;
pub mod numerics;
pub mod orbit;
pub mod suites;
pub mod symplectic;

pub use error::{Error, Result};
