//! Univariate polynomials over Q with exact real-root counting.
//!
//! Root counts go through a squarefree decomposition (Yun) followed by Sturm
//! sequences on each squarefree factor, so repeated roots are reported with
//! their multiplicity and never confuse the sign-variation count.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Coefficients in increasing degree order; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

/// Root location summary for a nonzero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSummary {
    pub degree: usize,
    pub distinct_positive: usize,
    pub positive_with_multiplicity: usize,
    pub distinct_real: usize,
    pub real_with_multiplicity: usize,
    /// Multiplicity of each distinct positive root, ascending by multiplicity.
    pub positive_multiplicities: Vec<usize>,
}

impl RootSummary {
    pub fn nonreal_count(&self) -> usize {
        self.degree - self.real_with_multiplicity
    }

    pub fn all_real_positive(&self) -> bool {
        self.positive_with_multiplicity == self.degree
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// Builds from integer coefficients given highest degree first.
    pub fn from_descending_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().rev().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => Poly::new(self.coeffs.iter().map(|c| c / lead).collect()),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return (Poly::zero(), self.clone());
        };
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let factor = &rem[k + dd] / lead;
            if !factor.is_zero() {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &factor * c;
                }
            }
            quot[k] = factor;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's decomposition: monic squarefree factors paired with their
    /// multiplicity, so that `self = lead * prod(f_i^i)`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors (monic).
    pub fn squarefree_part(&self) -> Poly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(Poly::constant(Rational::one()), |acc, (f, _)| acc.mul(&f))
    }

    fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(Poly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        seq
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    /// `self` must be squarefree.
    pub fn count_distinct_roots_between(&self, lo: &Rational, hi: &Rational) -> usize {
        let seq = self.sturm_sequence();
        let v = |x: &Rational| sign_variations(seq.iter().map(|p| sign_of(&p.eval(x))));
        v(lo).saturating_sub(v(hi))
    }

    fn distinct_roots_squarefree(&self) -> (usize, usize) {
        if self.degree().unwrap_or(0) == 0 {
            return (0, 0);
        }
        let seq = self.sturm_sequence();
        let at_pos_inf = sign_variations(seq.iter().map(|p| sign_of(p.leading().unwrap())));
        let at_neg_inf = sign_variations(seq.iter().map(|p| {
            let s = sign_of(p.leading().unwrap());
            if p.degree().unwrap() % 2 == 1 {
                -s
            } else {
                s
            }
        }));
        let real = at_neg_inf - at_pos_inf;
        // zero is never counted as positive: deflate it first
        let positive = if self.coeffs[0].is_zero() {
            Poly::new(self.coeffs[1..].to_vec())
                .distinct_roots_squarefree()
                .1
        } else {
            let at_zero = sign_variations(seq.iter().map(|p| sign_of(&p.coeffs[0].clone())));
            at_zero - at_pos_inf
        };
        (real, positive)
    }

    pub fn root_summary(&self) -> Result<RootSummary> {
        let degree = self.degree().ok_or(Error::ZeroPolynomial)?;
        let mut summary = RootSummary {
            degree,
            distinct_positive: 0,
            positive_with_multiplicity: 0,
            distinct_real: 0,
            real_with_multiplicity: 0,
            positive_multiplicities: Vec::new(),
        };
        for (factor, mult) in self.squarefree_decomposition() {
            let (real, positive) = factor.distinct_roots_squarefree();
            summary.distinct_real += real;
            summary.real_with_multiplicity += real * mult;
            summary.distinct_positive += positive;
            summary.positive_with_multiplicity += positive * mult;
            summary
                .positive_multiplicities
                .extend(std::iter::repeat_n(mult, positive));
        }
        Ok(summary)
    }

    /// All distinct rational roots, ascending. Roots are isolated with Sturm
    /// bisection until each interval is narrower than the spacing of
    /// fractions with admissible denominators; the simplest fraction in the
    /// interval is then the only rational-root candidate.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.squarefree_part();
        if g.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        // denominators of rational roots divide the lcm of g's denominators
        let den_bound = g
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let width = Rational::new(BigInt::one(), &den_bound * &den_bound * 2);
        let bound = g
            .coeffs
            .iter()
            .map(|c| c.abs())
            .fold(Rational::zero(), |acc, c| if c > acc { c } else { acc })
            + Rational::one();
        let mut roots = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((lo, hi)) = stack.pop() {
            let n = g.count_distinct_roots_between(&lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 && &hi - &lo < width {
                let candidate = rational::simplest_between(&lo, &hi);
                if g.eval(&candidate).is_zero() {
                    roots.push(candidate);
                }
                continue;
            }
            let mid = (&lo + &hi) / rational::int(2);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        roots.sort();
        Ok(roots)
    }
}

fn sign_of(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if !mag.is_one() || i == 0 {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}
