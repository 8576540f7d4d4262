//! Rational scalars: text form, float conversion and continued-fraction
//! rationalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Closest rational to `x` whose denominator does not exceed `max_den`,
/// found from the continued-fraction convergents and semiconvergents of the
/// exact binary value of `x`.
pub fn rationalize(x: f64, max_den: &BigInt) -> Option<Rational> {
    let exact = Rational::from_float(x)?;
    Some(limit_denominator(&exact, max_den))
}

pub fn limit_denominator(value: &Rational, max_den: &BigInt) -> Rational {
    assert!(
        max_den >= &BigInt::one(),
        "denominator bound must be positive"
    );
    if value.is_negative() {
        return -limit_denominator(&-value.clone(), max_den);
    }
    if value.denom() <= max_den {
        return value.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (value.numer().clone(), value.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    if (&conv - value).abs() <= (&semi - value).abs() {
        conv
    } else {
        semi
    }
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let ceil = lo.ceil();
    if &ceil <= hi {
        return ceil;
    }
    let fl = lo.floor();
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Decimal rendering of an integer value truncated (not rounded) to
/// `digits` significant digits, as `(mantissa digits, decimal exponent)`.
/// `-486025787321779506` at 15 digits gives `("-486025787321779", 17)`.
pub fn truncate_significant(value: &BigInt, digits: usize) -> (String, usize) {
    let s = value.abs().to_string();
    let exponent = s.len() - 1;
    let kept: String = s.chars().take(digits).collect();
    let sign = if value.is_negative() { "-" } else { "" };
    (format!("{sign}{kept}"), exponent)
}

/// Serde adapters for rationals and matrices stored as `"p/q"` strings.
pub mod serde_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}
