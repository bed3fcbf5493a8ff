//! Exact arithmetic: rationals, binomial coefficients, sparse polynomials in
//! the two urn variables `m` and `n`, and exact nullspaces of rational
//! matrices.
//!
//! Nothing in here touches floating point.

mod binomial;
mod matrix;
mod poly;
mod rational;

pub use binomial::binomial;
pub use matrix::Matrix;
pub use poly::{Assignment, Exponent, Poly, Var};
pub use rational::{format_rational, int, parse_rational, rat, rational_str, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("variable `{0}` has no value in the assignment")]
    MissingVariable(Var),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    BadPoly { pos: usize, msg: String },
    #[error("matrix entries: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
}
