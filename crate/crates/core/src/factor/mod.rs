//! Products of two positive definite matrices and constructions built on them.
//!
//! * [`quasi`] factors a matrix with a positive diagonalizable spectrum into
//!   two positive definite letters, and composes letters from such a factor.
//! * [`triangular`] builds upper triangular `T` with `Tr[T^k (Tᵀ)^j] < 0`.
//! * [`homotopy`] deforms a witness pair toward scalar letters until a power
//!   of the word acquires a non-real spectrum.

pub mod homotopy;
pub mod quasi;
pub mod triangular;

pub use homotopy::{homotopy_power_witness, HomotopyConfig, HomotopyScan};
pub use quasi::{compose_pair, factor_quasi_positive, ComposedPair, QuasiPositiveFactorization};
pub use triangular::{
    closed_forms, discriminant_leading_coeff, trace_formula, triangular_matrix, triangular_witness,
    PowerEntries, TriangularWitness,
};
