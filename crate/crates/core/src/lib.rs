//! Exact-arithmetic toolkit for linear Anosov systems and subshifts of
//! finite type: integer matrix algebra, certified root enclosures,
//! commutant lattices, periodic-orbit scans and Markov measures.

pub mod commutant;
pub mod config;
pub mod interval;
pub mod linalg;
pub mod sft;
pub mod spectral;
pub mod torus;

pub use interval::RatInterval;
pub use linalg::{IntMatrix, IntPoly, LinalgError};
