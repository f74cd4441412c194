//! Exact polynomials in `(z, z̄)` with complex-rational coefficients.

mod bipoly;
mod float;
mod holo;
pub mod json;
mod monomial;
pub mod rational;

pub use bipoly::{Bipoly, Complexified, RealBipoly, Var};
pub use float::FloatPoly;
pub use holo::{BiholoSubstitution, HoloPoly};
pub use monomial::MultiIndex;
pub use rational::ComplexRational;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("polynomial is not real-valued: {0}")]
    NotReal(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
}

impl From<serde_json::Error> for PolyError {
    fn from(e: serde_json::Error) -> Self {
        PolyError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}
