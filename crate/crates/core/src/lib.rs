//! Positivity of words in two positive definite matrix letters.
//!
//! The crate classifies words over `{A, B}` combinatorially, evaluates them
//! exactly at rational letters, reproduces known negative-trace witnesses and
//! searches for new ones.

pub mod error;
pub mod eval;
pub mod factor;
pub mod linalg;
pub mod recurrence;
pub mod search;
pub mod sign;
pub mod store;
pub mod verify;
pub mod witness;
pub mod word;

pub use error::{Error, Result};
pub use eval::{evaluate, Verdict, WordEvaluation};
pub use linalg::{CharPoly, Rational, RationalMatrix};
pub use witness::{Provenance, WitnessPair};
pub use word::{classify, Classification, Letter, Word};
