//! Exact dense linear algebra over arbitrary-precision rationals.

mod matrix;
mod poly;
pub mod rational;

pub use matrix::{CharPoly, RationalMatrix};
pub use poly::{Poly, RootSummary};
pub use rational::Rational;
