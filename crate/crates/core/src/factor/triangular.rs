//! Upper triangular `T = [[1, x, z], [0, a, y], [0, 0, b]]` with
//! `Tr[T^k (Tᵀ)^j] < 0` for `k ≠ j`.
//!
//! `T^k` keeps the triangular shape with diagonal `1, a^k, b^k` and
//! off-diagonal entries
//!
//! ```text
//! X_k = x (a^k - 1) / (a - 1)
//! Y_k = y (a^k - b^k) / (a - b)
//! Z_k = x y C_k + z D_k
//! C_k = ((a^k - b^k)/(a - b) - b^(k-1) - (b^(k-1) - 1)/(b - 1)) / (a - 1)
//! D_k = (b^k - 1) / (b - 1)
//! ```
//!
//! so the trace is a quadratic in `z` whose discriminant grows like
//! `x^4 (C_k D_j - C_j D_k)^2`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::quasi::factor_quasi_positive;
use crate::error::{Error, Result};
use crate::linalg::rational::{self, int, serde_text};
use crate::linalg::{Rational, RationalMatrix};
use crate::witness::{Provenance, WitnessPair};
use crate::word::Word;

/// Doublings of `x` tried before giving up on a positive discriminant.
const MAX_DOUBLINGS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerEntries {
    pub x_k: Rational,
    pub y_k: Rational,
    pub z_k: Rational,
    pub c_k: Rational,
    pub d_k: Rational,
}

fn pow(base: &Rational, k: usize) -> Rational {
    num_traits::pow(base.clone(), k)
}

fn check_parameters(a: &Rational, b: &Rational) -> Result<()> {
    let one = Rational::one();
    if a == &one || b == &one || a == b {
        return Err(Error::Degenerate(format!(
            "a = {a}, b = {b}: need a, b ∉ {{1}} and a ≠ b"
        )));
    }
    Ok(())
}

fn c_coeff(k: usize, a: &Rational, b: &Rational) -> Rational {
    let one = Rational::one();
    let ratio = (pow(a, k) - pow(b, k)) / (a - b);
    let bk1 = pow(b, k - 1);
    (ratio - &bk1 - (&bk1 - &one) / (b - &one)) / (a - &one)
}

fn d_coeff(k: usize, b: &Rational) -> Rational {
    (pow(b, k) - Rational::one()) / (b - Rational::one())
}

/// Off-diagonal entries `(1,2)`, `(2,3)`, `(1,3)` of `T^k`.
pub fn closed_forms(
    k: usize,
    x: &Rational,
    y: &Rational,
    z: &Rational,
    a: &Rational,
    b: &Rational,
) -> Result<PowerEntries> {
    if k == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    check_parameters(a, b)?;
    let one = Rational::one();
    let c_k = c_coeff(k, a, b);
    let d_k = d_coeff(k, b);
    Ok(PowerEntries {
        x_k: x * (pow(a, k) - &one) / (a - &one),
        y_k: y * (pow(a, k) - pow(b, k)) / (a - b),
        z_k: x * y * &c_k + z * &d_k,
        c_k,
        d_k,
    })
}

/// `Tr[T^k (Tᵀ)^j]` expanded in the closed forms.
pub fn trace_formula(
    k: usize,
    j: usize,
    x: &Rational,
    y: &Rational,
    z: &Rational,
    a: &Rational,
    b: &Rational,
) -> Result<Rational> {
    let (alpha, beta, gamma) = z_quadratic(k, j, x, y, a, b)?;
    Ok(alpha * z * z + beta * z + gamma)
}

/// Coefficients of the trace as `alpha z^2 + beta z + gamma`.
fn z_quadratic(
    k: usize,
    j: usize,
    x: &Rational,
    y: &Rational,
    a: &Rational,
    b: &Rational,
) -> Result<(Rational, Rational, Rational)> {
    if k == 0 || j == 0 {
        return Err(Error::InvalidArgument("powers must be at least 1".into()));
    }
    check_parameters(a, b)?;
    let one = Rational::one();
    let (ck, cj) = (c_coeff(k, a, b), c_coeff(j, a, b));
    let (dk, dj) = (d_coeff(k, b), d_coeff(j, b));
    let geo_a = |m| (pow(a, m) - &one) / (a - &one);
    let geo_ab = |m| (pow(a, m) - pow(b, m)) / (a - b);
    let xy = x * y;
    let alpha = &dk * &dj;
    let beta = &xy * (&ck * &dj + &cj * &dk);
    let gamma = &one
        + pow(a, k + j)
        + pow(b, k + j)
        + x * x * geo_a(k) * geo_a(j)
        + y * y * geo_ab(k) * geo_ab(j)
        + &xy * &xy * &ck * &cj;
    Ok((alpha, beta, gamma))
}

/// `(C_k D_j - C_j D_k)^2`, the `x^4` coefficient of the discriminant when `y = x`.
pub fn discriminant_leading_coeff(
    k: usize,
    j: usize,
    a: &Rational,
    b: &Rational,
) -> Result<Rational> {
    if k == 0 || j == 0 {
        return Err(Error::InvalidArgument("powers must be at least 1".into()));
    }
    check_parameters(a, b)?;
    let diff = c_coeff(k, a, b) * d_coeff(j, b) - c_coeff(j, a, b) * d_coeff(k, b);
    Ok(&diff * &diff)
}

/// `a^j b^k + a^k - b^k - a^k b^j + b^j - a^j`; it equals
/// `-(a-1)(a-b)(b-1)(C_k D_j - C_j D_k)`.
pub fn separation_factor(k: usize, j: usize, a: &Rational, b: &Rational) -> Rational {
    pow(a, j) * pow(b, k) + pow(a, k) - pow(b, k) - pow(a, k) * pow(b, j) + pow(b, j) - pow(a, j)
}

/// `g(x) = x^k (a^j - 1) + x^j (1 - a^k) + a^k - a^j`, which is
/// `separation_factor` read as a polynomial in `b`; `g(1) = g(a) = 0`.
pub fn separation_polynomial(k: usize, j: usize, a: &Rational, x: &Rational) -> Rational {
    let one = Rational::one();
    pow(x, k) * (pow(a, j) - &one) + pow(x, j) * (&one - pow(a, k)) + pow(a, k) - pow(a, j)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularWitness {
    pub k: usize,
    pub j: usize,
    #[serde(with = "serde_text")]
    pub a: Rational,
    #[serde(with = "serde_text")]
    pub b: Rational,
    #[serde(with = "serde_text")]
    pub x: Rational,
    #[serde(with = "serde_text")]
    pub y: Rational,
    #[serde(with = "serde_text")]
    pub z: Rational,
    pub t: RationalMatrix,
    #[serde(with = "serde_text")]
    pub trace: Rational,
}

impl TriangularWitness {
    /// Letters with `A B = T`, certifying `(AB)^k (BA)^j`.
    pub fn letter_pair(&self) -> Result<WitnessPair> {
        let f = factor_quasi_positive(&self.t)?;
        let pair = f.compose()?;
        let word = Word::parse("AB")?
            .power(self.k)
            .concat(&Word::parse("BA")?.power(self.j));
        let name = format!("triangular-{}-{}", self.k, self.j);
        Ok(
            WitnessPair::new(name, word, pair.a, pair.b, Provenance::TriangularPower)?
                .with_metadata("k", self.k)
                .with_metadata("j", self.j)
                .with_metadata("a", rational::format(&self.a))
                .with_metadata("b", rational::format(&self.b))
                .with_metadata("x", rational::format(&self.x))
                .with_metadata("y", rational::format(&self.y))
                .with_metadata("z", rational::format(&self.z)),
        )
    }
}

pub fn triangular_matrix(
    x: &Rational,
    y: &Rational,
    z: &Rational,
    a: &Rational,
    b: &Rational,
) -> RationalMatrix {
    RationalMatrix::from_rows(vec![
        vec![Rational::one(), x.clone(), z.clone()],
        vec![Rational::zero(), a.clone(), y.clone()],
        vec![Rational::zero(), Rational::zero(), b.clone()],
    ])
    .expect("3x3")
}

/// Fixes `a = 2`, `b = 3`, `y = x`, doubles `x` until the `z`-quadratic has a
/// positive discriminant and places `z` at its vertex.
pub fn triangular_witness(k: usize, j: usize) -> Result<TriangularWitness> {
    if k == j {
        return Err(Error::Degenerate(format!(
            "k = j = {k}: the discriminant's leading term vanishes"
        )));
    }
    if k == 0 || j == 0 {
        return Err(Error::InvalidArgument("powers must be at least 1".into()));
    }
    let (a, b) = (int(2), int(3));
    let mut x = Rational::one();
    for _ in 0..MAX_DOUBLINGS {
        let (alpha, beta, gamma) = z_quadratic(k, j, &x, &x, &a, &b)?;
        if (&beta * &beta - int(4) * &alpha * &gamma).is_positive() {
            let z = -beta / (int(2) * alpha);
            let t = triangular_matrix(&x, &x, &z, &a, &b);
            let trace = (&t.pow(k as u32) * &t.transpose().pow(j as u32)).trace();
            debug_assert!(trace.is_negative());
            if !trace.is_negative() {
                return Err(Error::Degenerate(format!(
                    "vertex trace {trace} is not negative"
                )));
            }
            return Ok(TriangularWitness {
                k,
                j,
                a,
                b,
                y: x.clone(),
                x,
                z,
                t,
                trace,
            });
        }
        x *= int(2);
    }
    Err(Error::NoConvergence)
}
