//! Exact integer linear algebra: matrices with arbitrary-precision
//! entries, characteristic polynomials, and lattice kernels via
//! Hermite/Smith normal forms.

mod matrix;
mod poly;
mod snf;

pub use matrix::IntMatrix;
pub use poly::{IntPoly, QPoly};
pub use snf::{hermite_normal_form, integer_kernel, smith_normal_form, SnfDecomposition};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("negative power of a matrix with |det| != 1")]
    NonUnimodularInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
}
