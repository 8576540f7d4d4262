use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{Poly, RootSummary};
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Dense square matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    order: usize,
    entries: Vec<Rational>,
}

/// Characteristic polynomial `det(tI - M)`; monic of degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly(Poly);

impl CharPoly {
    /// Coefficients of `t^n, ..., t^0`.
    pub fn coefficients(&self) -> Vec<Rational> {
        self.0.coeffs().iter().rev().cloned().collect()
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.degree().unwrap_or(0)
    }

    pub fn root_summary(&self) -> RootSummary {
        self.0
            .root_summary()
            .expect("characteristic polynomial is monic")
    }

    pub fn all_roots_real_positive(&self) -> bool {
        self.root_summary().all_real_positive()
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl RationalMatrix {
    pub fn new(order: usize, entries: Vec<Rational>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(Error::MalformedMatrix(format!(
                "{} entries for order {order}",
                entries.len()
            )));
        }
        Ok(RationalMatrix { order, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedMatrix("rows are not square".into()));
        }
        RationalMatrix::new(n, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rational::int(v)).collect())
                .collect(),
        )
    }

    /// Parses rows of `"p/q"` strings.
    pub fn from_text_rows<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| rational::parse(s.as_ref())).collect())
                .collect::<Result<_>>()?,
        )
    }

    pub fn identity(order: usize) -> Self {
        Self::scalar(order, Rational::one())
    }

    pub fn zero(order: usize) -> Self {
        RationalMatrix {
            order,
            entries: vec![Rational::zero(); order * order],
        }
    }

    pub fn scalar(order: usize, c: Rational) -> Self {
        let mut m = Self::zero(order);
        for i in 0..order {
            m.entries[i * order + i] = c.clone();
        }
        m
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zero(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = d.clone();
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.order + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.order).map(<[_]>::to_vec).collect()
    }

    pub fn text_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.order)
            .map(|r| r.iter().map(rational::format).collect())
            .collect()
    }

    pub fn diagonal_entries(&self) -> Vec<Rational> {
        (0..self.order).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut t = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(self.order, other.order));
        }
        let n = self.order;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for k in 0..n {
                    let a = &self.entries[i * n + k];
                    if !a.is_zero() {
                        acc += a * &other.entries[k * n + j];
                    }
                }
                out.push(acc);
            }
        }
        Ok(RationalMatrix {
            order: n,
            entries: out,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalMatrix {
            order: self.order,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::identity(self.order);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Integer power; negative exponents go through the exact inverse.
    pub fn pow_signed(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inverse()?.pow(k.unsigned_abs() as u32))
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.order).map(|i| self.get(i, i).clone()).sum()
    }

    /// Row-reduces a copy; returns the determinant.
    pub fn det(&self) -> Rational {
        let n = self.order;
        let mut a = self.entries.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let factor = &a[r * n + col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let delta = &factor * &a[col * n + c];
                    a[r * n + c] -= delta;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.order;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                    inv.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a[col * n + col].clone();
            for c in 0..n {
                a[col * n + c] /= &p;
                inv[col * n + c] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for c in 0..n {
                    let da = &factor * &a[col * n + c];
                    a[r * n + c] -= da;
                    let di = &factor * &inv[col * n + c];
                    inv[r * n + c] -= di;
                }
            }
        }
        Ok(RationalMatrix {
            order: n,
            entries: inv,
        })
    }

    /// Basis of the right null space from the reduced row echelon form; each
    /// vector has a one in its free coordinate.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let n = self.order;
        let mut a = self.entries.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(p) = (row..n).find(|&r| !a[r * n + col].is_zero()) else {
                continue;
            };
            for c in 0..n {
                a.swap(p * n + c, row * n + c);
            }
            let lead = a[row * n + col].clone();
            for c in 0..n {
                a[row * n + c] /= &lead;
            }
            for r in 0..n {
                if r != row && !a[r * n + col].is_zero() {
                    let factor = a[r * n + col].clone();
                    for c in 0..n {
                        let delta = &factor * &a[row * n + c];
                        a[r * n + c] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); n];
                v[free] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[r * n + free].clone();
                }
                v
            })
            .collect()
    }

    /// Faddeev-LeVerrier: `M_k = A M_{k-1} + c_{n-k+1} I`, `c_{n-k} = -tr(A M_k) / k`.
    pub fn charpoly(&self) -> CharPoly {
        let n = self.order;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Self::zero(n);
        for k in 1..=n {
            m = &(self * &m) + &Self::scalar(n, coeffs[n - k + 1].clone());
            let am = self * &m;
            coeffs[n - k] = -am.trace() / rational::int(k as i64);
        }
        CharPoly(Poly::new(coeffs))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.order;
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.order;
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn leading_principal_minors(&self) -> Vec<Rational> {
        (1..=self.order)
            .map(|k| self.leading_block(k).det())
            .collect()
    }

    fn leading_block(&self, k: usize) -> Self {
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend_from_slice(&self.entries[i * self.order..i * self.order + k]);
        }
        RationalMatrix { order: k, entries }
    }

    /// Sylvester's criterion on an exactly symmetric matrix.
    pub fn is_positive_definite(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(self
            .leading_principal_minors()
            .iter()
            .all(Signed::is_positive))
    }

    /// `self ⊕ other` as a block-diagonal matrix.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.order + other.order;
        let mut m = Self::zero(n);
        for i in 0..self.order {
            for j in 0..self.order {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.order {
            for j in 0..other.order {
                m.set(self.order + i, self.order + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.order, self.order, |i, j| {
            rational::to_f64(self.get(i, j))
        })
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    /// Panics on mismatched orders; use [`RationalMatrix::try_mul`] to recover.
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_mul(rhs).expect("matrix orders must agree")
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;

    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.order, rhs.order, "matrix orders must agree");
        RationalMatrix {
            order: self.order,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;

    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.order, rhs.order, "matrix orders must agree");
        RationalMatrix {
            order: self.order,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.text_rows();
        let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
        for (i, row) in rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            f.write_str("[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e:>width$}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Row-major nested arrays of `"p/q"` strings.
impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.text_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(deserializer)?;
        RationalMatrix::from_text_rows(&rows).map_err(serde::de::Error::custom)
    }
}
