use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};

/// `q = s d s⁻¹` with `d` positive diagonal and `e` positive definite,
/// commuting with `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPositiveFactorization {
    pub q: RationalMatrix,
    pub s: RationalMatrix,
    pub d: RationalMatrix,
    pub e: RationalMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComposedPair {
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    pub q: RationalMatrix,
}

impl QuasiPositiveFactorization {
    pub fn compose(&self) -> Result<ComposedPair> {
        compose_pair(&self.s, &self.d, &self.e)
    }
}

/// `a = s e sᵀ`, `b = s⁻ᵀ e⁻¹ d s⁻¹`, so `a b = s d s⁻¹`.
pub fn compose_pair(
    s: &RationalMatrix,
    d: &RationalMatrix,
    e: &RationalMatrix,
) -> Result<ComposedPair> {
    let n = s.order();
    for m in [d, e] {
        if m.order() != n {
            return Err(Error::DimensionMismatch(n, m.order()));
        }
    }
    if !d.is_diagonal() || !d.diagonal_entries().iter().all(Signed::is_positive) {
        return Err(Error::InvalidArgument(
            "d must be a positive diagonal matrix".into(),
        ));
    }
    if !e.is_positive_definite()? {
        return Err(Error::NotPositiveDefinite("e".into()));
    }
    if e * d != d * e {
        return Err(Error::NotCommuting);
    }
    let s_inv = s.inverse()?;
    let s_inv_t = s_inv.transpose();
    let a = &(s * e) * &s.transpose();
    let b = &(&(&s_inv_t * &e.inverse()?) * d) * &s_inv;
    let q = &(s * d) * &s_inv;
    debug_assert_eq!(&a * &b, q);
    for (label, m) in [("a", &a), ("b", &b)] {
        if !m.is_positive_definite()? {
            return Err(Error::NotPositiveDefinite(label.into()));
        }
    }
    Ok(ComposedPair { a, b, q })
}

/// Diagonalizes `q` over the rationals. Requires `order` distinct positive
/// rational eigenvalues; `d` lists them ascending and `e = I`.
pub fn factor_quasi_positive(q: &RationalMatrix) -> Result<QuasiPositiveFactorization> {
    let n = q.order();
    let roots = q.charpoly().poly().rational_roots()?;
    if roots.len() != n {
        return Err(Error::IrrationalSpectrum(format!(
            "{} of {n} eigenvalues are distinct rationals",
            roots.len()
        )));
    }
    if let Some(bad) = roots.iter().find(|r| !r.is_positive()) {
        return Err(Error::Degenerate(format!(
            "eigenvalue {bad} is not positive"
        )));
    }
    let mut s = RationalMatrix::zero(n);
    for (col, root) in roots.iter().enumerate() {
        let shifted = q - &RationalMatrix::scalar(n, root.clone());
        let basis = shifted.null_space();
        let v = basis.first().ok_or(Error::Singular)?;
        for (row, x) in integral(v).into_iter().enumerate() {
            s.set(row, col, x);
        }
    }
    Ok(QuasiPositiveFactorization {
        q: q.clone(),
        s,
        d: RationalMatrix::diagonal(&roots),
        e: RationalMatrix::identity(n),
    })
}

/// Scales a vector to coprime integers.
fn integral(v: &[Rational]) -> Vec<Rational> {
    use num_integer::Integer;
    let den = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Rational> = v
        .iter()
        .map(|x| x * Rational::from_integer(den.clone()))
        .collect();
    let g = scaled
        .iter()
        .filter(|x| !x.is_zero())
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x.numer()));
    if g.is_zero() {
        return scaled;
    }
    scaled
        .iter()
        .map(|x| x / Rational::from_integer(g.clone()))
        .collect()
}
