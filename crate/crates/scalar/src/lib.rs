//! Exact arithmetic in the field of rational functions over a coordinate
//! chart, with differentiation, evaluation, a text grammar and a sparse
//! linear solver.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod gcd;
pub mod linsolve;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod scalar;

pub use error::ScalarError;
pub use linsolve::{AffineSolution, Equation, Matrix};
pub use monomial::Monomial;
pub use parse::parse_scalar;
pub use poly::Poly;
pub use rational::Rational;
pub use scalar::{Budget, Scalar};
