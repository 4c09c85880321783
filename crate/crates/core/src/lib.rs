//! Slice regular functions of a quaternionic variable on arbitrary domains,
//! symmetric or not: evaluation, the regular product and reciprocal, zero
//! sets and multiplicities, series expansions, Cauchy formulas, and an
//! executable counterexample on a non-symmetric slice domain.

pub mod error;
pub mod quaternion;
pub mod tol;

pub mod domains;
pub mod poly;
pub mod slicefn;
pub mod algebra;
pub mod zeros;
pub mod series;
pub mod integral;
pub mod douren;
pub mod acceptance;

pub use error::{Result, SliceError};
pub use quaternion::{ImaginaryUnit, Quaternion, SliceCoords};
