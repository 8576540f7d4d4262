//! Exact trace tables `F(p, q) = Tr[W₁ A^p W₂ B^q]` for 3×3 letters.
//!
//! By Cayley-Hamilton, `A^p = e₁A^{p-1} - e₂A^{p-2} + e₃A^{p-3}` where
//! `t³ - e₁t² + e₂t - e₃` is the characteristic polynomial of `A`, so every
//! row and column of the table obeys a three-term linear recurrence whose
//! coefficients depend only on the letters.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::word_product;
use crate::linalg::rational::{self, int, serde_text};
use crate::linalg::{Rational, RationalMatrix};
use crate::word::Word;

/// Smallest exponent in a table; the base block is `BASE..=BASE + 2`.
pub const BASE: i64 = 2;
const BASE_END: i64 = BASE + 2;
/// Induction ratio bound: `F(p, q) < RATIO · F(p-1, q)`.
pub const RATIO: i64 = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceSpec {
    /// `(e₁, e₂, e₃)` of the `A` letter.
    #[serde(serialize_with = "ser_triple")]
    pub a: [Rational; 3],
    #[serde(serialize_with = "ser_triple")]
    pub b: [Rational; 3],
}

fn ser_triple<S: serde::Serializer>(
    v: &[Rational; 3],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

fn elementary(m: &RationalMatrix) -> [Rational; 3] {
    let c = m.charpoly().coefficients();
    [-c[1].clone(), c[2].clone(), -c[3].clone()]
}

/// Reads both recurrences off the characteristic polynomials.
pub fn recurrence_spec(a: &RationalMatrix, b: &RationalMatrix) -> Result<RecurrenceSpec> {
    for m in [a, b] {
        if m.order() != 3 {
            return Err(Error::DimensionMismatch(3, m.order()));
        }
    }
    for (label, m) in [("letter A", a), ("letter B", b)] {
        if !m.is_positive_definite()? {
            return Err(Error::NotPositiveDefinite(label.into()));
        }
    }
    Ok(RecurrenceSpec {
        a: elementary(a),
        b: elementary(b),
    })
}

fn step(c: &[Rational; 3], f1: &Rational, f2: &Rational, f3: &Rational) -> Rational {
    &c[0] * f1 - &c[1] * f2 + &c[2] * f3
}

/// The words `prefix · A^p · middle · B^q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordFamily {
    pub prefix: Word,
    pub middle: Word,
}

impl WordFamily {
    pub fn new(prefix: Word, middle: Word) -> Self {
        WordFamily { prefix, middle }
    }

    pub fn parse(prefix: &str, middle: &str) -> Result<Self> {
        let part = |s: &str| {
            if s.is_empty() {
                Ok(Word::empty())
            } else {
                Word::parse(s)
            }
        };
        Ok(WordFamily {
            prefix: part(prefix)?,
            middle: part(middle)?,
        })
    }

    /// The member at nonnegative exponents.
    pub fn member(&self, p: usize, q: usize) -> Word {
        use crate::word::Letter;
        self.prefix
            .concat(&Word::run(Letter::A, p))
            .concat(&self.middle)
            .concat(&Word::run(Letter::B, q))
    }

    /// `F(p, q)`, negative exponents through the exact inverse.
    pub fn trace(
        &self,
        a: &RationalMatrix,
        b: &RationalMatrix,
        p: i64,
        q: i64,
    ) -> Result<Rational> {
        if p >= 0 && q >= 0 {
            return Ok(word_product(&self.member(p as usize, q as usize), a, b)?.trace());
        }
        let pre = word_product(&self.prefix, a, b)?;
        let mid = word_product(&self.middle, a, b)?;
        let m = &(&(&pre * &a.pow_signed(p)?) * &mid) * &b.pow_signed(q)?;
        Ok(m.trace())
    }
}

impl fmt::Display for WordFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}A^p{}B^q", self.prefix, self.middle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellSource {
    Direct,
    Recurrence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    #[serde(with = "serde_text")]
    pub value: Rational,
    pub source: CellSource,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub p: i64,
    pub q: i64,
    pub agrees: bool,
}

/// `F(p, q)` for `BASE <= p <= p_max`, `BASE <= q <= q_max`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceTable {
    pub family: WordFamily,
    pub spec: RecurrenceSpec,
    pub p_max: i64,
    pub q_max: i64,
    /// Row-major, `rows[p - BASE][q - BASE]`.
    pub rows: Vec<Vec<Cell>>,
    pub spot_checks: Vec<SpotCheck>,
}

impl TraceTable {
    pub fn get(&self, p: i64, q: i64) -> Option<&Rational> {
        let (i, j) = (
            usize::try_from(p - BASE).ok()?,
            usize::try_from(q - BASE).ok()?,
        );
        self.rows.get(i)?.get(j).map(|c| &c.value)
    }

    pub fn set(&mut self, p: i64, q: i64, value: Rational) {
        self.rows[(p - BASE) as usize][(q - BASE) as usize].value = value;
    }

    pub fn spot_checks_agree(&self) -> bool {
        self.spot_checks.iter().all(|c| c.agrees)
    }

    /// Tab-separated exact values with `p` down and `q` across.
    pub fn to_text(&self) -> String {
        let mut out = String::from("p\\q");
        for q in BASE..=self.q_max {
            out.push_str(&format!("\t{q}"));
        }
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("\n{}", BASE + i as i64));
            for cell in row {
                out.push('\t');
                out.push_str(&rational::format(&cell.value));
            }
        }
        out
    }
}

/// Base block by direct evaluation, the rest by the recurrences; about a
/// tenth of the recurrence cells (at least one) are re-evaluated directly,
/// chosen by `seed`.
pub fn build_table(
    family: &WordFamily,
    a: &RationalMatrix,
    b: &RationalMatrix,
    p_max: i64,
    q_max: i64,
    seed: u64,
) -> Result<TraceTable> {
    if p_max < BASE_END || q_max < BASE_END {
        return Err(Error::InvalidArgument(format!(
            "table bounds must be at least {BASE_END}"
        )));
    }
    let spec = recurrence_spec(a, b)?;
    let width = (q_max - BASE + 1) as usize;
    let height = (p_max - BASE + 1) as usize;
    let mut grid: Vec<Vec<Option<Cell>>> = vec![vec![None; width]; height];
    let at = |g: &Vec<Vec<Option<Cell>>>, p: i64, q: i64| -> Rational {
        g[(p - BASE) as usize][(q - BASE) as usize]
            .as_ref()
            .expect("filled")
            .value
            .clone()
    };
    for p in BASE..=BASE_END {
        for q in BASE..=BASE_END {
            grid[(p - BASE) as usize][(q - BASE) as usize] = Some(Cell {
                value: family.trace(a, b, p, q)?,
                source: CellSource::Direct,
            });
        }
        for q in BASE_END + 1..=q_max {
            let v = step(
                &spec.b,
                &at(&grid, p, q - 1),
                &at(&grid, p, q - 2),
                &at(&grid, p, q - 3),
            );
            grid[(p - BASE) as usize][(q - BASE) as usize] = Some(Cell {
                value: v,
                source: CellSource::Recurrence,
            });
        }
    }
    for p in BASE_END + 1..=p_max {
        for q in BASE..=q_max {
            let v = step(
                &spec.a,
                &at(&grid, p - 1, q),
                &at(&grid, p - 2, q),
                &at(&grid, p - 3, q),
            );
            grid[(p - BASE) as usize][(q - BASE) as usize] = Some(Cell {
                value: v,
                source: CellSource::Recurrence,
            });
        }
    }
    let rows: Vec<Vec<Cell>> = grid
        .into_iter()
        .map(|r| r.into_iter().map(|c| c.expect("filled")).collect())
        .collect();

    let recurrence_cells: Vec<(i64, i64)> = (BASE..=p_max)
        .flat_map(|p| (BASE..=q_max).map(move |q| (p, q)))
        .filter(|&(p, q)| {
            rows[(p - BASE) as usize][(q - BASE) as usize].source == CellSource::Recurrence
        })
        .collect();
    let mut spot_checks = Vec::new();
    if !recurrence_cells.is_empty() {
        let count = recurrence_cells.len().div_ceil(10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked: BTreeSet<usize> = sample(&mut rng, recurrence_cells.len(), count)
            .into_iter()
            .collect();
        for idx in picked {
            let (p, q) = recurrence_cells[idx];
            let direct = family.trace(a, b, p, q)?;
            spot_checks.push(SpotCheck {
                p,
                q,
                agrees: direct == rows[(p - BASE) as usize][(q - BASE) as usize].value,
            });
        }
    }
    Ok(TraceTable {
        family: family.clone(),
        spec,
        p_max,
        q_max,
        rows,
        spot_checks,
    })
}

/// Both recurrences on every cell whose three predecessors lie in the table.
pub fn verify_recurrences(t: &TraceTable) -> bool {
    let f = |p, q| t.get(p, q).expect("in range");
    (BASE..=t.p_max).all(|p| {
        (BASE..=t.q_max).all(|q| {
            let row_ok =
                p < BASE + 3 || f(p, q) == &step(&t.spec.a, f(p - 1, q), f(p - 2, q), f(p - 3, q));
            let col_ok =
                q < BASE + 3 || f(p, q) == &step(&t.spec.b, f(p, q - 1), f(p, q - 2), f(p, q - 3));
            row_ok && col_ok
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    P,
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceFailure {
    pub p: i64,
    pub q: i64,
    pub axis: Axis,
}

/// Checks both recurrences at every `(p, q)` in `lo..=hi` squared with all
/// four terms evaluated directly; predecessors below zero use inverses.
pub fn check_recurrences_directly(
    family: &WordFamily,
    a: &RationalMatrix,
    b: &RationalMatrix,
    lo: i64,
    hi: i64,
) -> Result<Vec<RecurrenceFailure>> {
    let spec = recurrence_spec(a, b)?;
    let mut cache = std::collections::HashMap::new();
    let mut f = |p: i64, q: i64| -> Result<Rational> {
        if let Some(v) = cache.get(&(p, q)) {
            return Ok(Rational::clone(v));
        }
        let v = family.trace(a, b, p, q)?;
        cache.insert((p, q), v.clone());
        Ok(v)
    };
    let mut failures = Vec::new();
    for p in lo..=hi {
        for q in lo..=hi {
            let v = f(p, q)?;
            if v != step(&spec.a, &f(p - 1, q)?, &f(p - 2, q)?, &f(p - 3, q)?) {
                failures.push(RecurrenceFailure {
                    p,
                    q,
                    axis: Axis::P,
                });
            }
            if v != step(&spec.b, &f(p, q - 1)?, &f(p, q - 2)?, &f(p, q - 3)?) {
                failures.push(RecurrenceFailure {
                    p,
                    q,
                    axis: Axis::Q,
                });
            }
        }
    }
    Ok(failures)
}

/// The base conditions hold on the base block, so every `F(p, q)` with
/// `p, q >= BASE` is negative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionCertificate {
    pub family: String,
    pub block: (i64, i64),
    pub checked: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionViolation {
    pub p: i64,
    pub q: i64,
    pub inequality: String,
}

impl fmt::Display for InductionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at p = {}, q = {}",
            self.inequality, self.p, self.q
        )
    }
}

pub fn verify_induction(
    t: &TraceTable,
) -> std::result::Result<InductionCertificate, InductionViolation> {
    let ratio = int(RATIO);
    let mut checked = Vec::new();
    for p in BASE..=BASE_END {
        for q in BASE..=BASE_END {
            let f = |p, q| t.get(p, q).expect("base block present");
            let mut require = |ok: bool, inequality: String| {
                if ok {
                    checked.push(inequality);
                    Ok(())
                } else {
                    Err(InductionViolation { p, q, inequality })
                }
            };
            require(f(p, q).is_negative(), format!("F({p},{q}) < 0"))?;
            if p > BASE {
                require(
                    f(p, q) < &(&ratio * f(p - 1, q)),
                    format!("F({p},{q}) < {RATIO}·F({},{q})", p - 1),
                )?;
            }
            if q > BASE {
                require(
                    f(p, q) < &(&ratio * f(p, q - 1)),
                    format!("F({p},{q}) < {RATIO}·F({p},{})", q - 1),
                )?;
            }
        }
    }
    Ok(InductionCertificate {
        family: t.family.to_string(),
        block: (BASE, BASE_END),
        checked,
    })
}
