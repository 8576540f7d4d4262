//! Named letter pairs certifying that a word has negative trace.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::word_product;
use crate::linalg::rational::serde_text;
use crate::linalg::{Rational, RationalMatrix};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Published,
    TriangularPower,
    RecurrenceFamily,
    Search,
    SignClosure,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Published => "published",
            Provenance::TriangularPower => "triangular-power",
            Provenance::RecurrenceFamily => "recurrence-family",
            Provenance::Search => "search",
            Provenance::SignClosure => "sign-closure",
        };
        f.write_str(s)
    }
}

/// Invariant once verified: `a`, `b` symmetric positive definite and
/// `trace == tr(word(a, b)) < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub name: String,
    pub word: Word,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    #[serde(with = "serde_text")]
    pub trace: Rational,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl WitnessPair {
    /// Computes the trace and checks every invariant.
    pub fn new(
        name: impl Into<String>,
        word: Word,
        a: RationalMatrix,
        b: RationalMatrix,
        provenance: Provenance,
    ) -> Result<Self> {
        let trace = word_product(&word, &a, &b)?.trace();
        let pair = WitnessPair {
            name: name.into(),
            word,
            a,
            b,
            trace,
            provenance,
            metadata: BTreeMap::new(),
        };
        pair.verify()?;
        Ok(pair)
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Exact re-verification of positive definiteness and the stored trace.
    pub fn verify(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidWitness {
            name: self.name.clone(),
            reason,
        };
        for (label, m) in [("A", &self.a), ("B", &self.b)] {
            match m.is_positive_definite() {
                Ok(true) => {}
                Ok(false) => return Err(fail(format!("letter {label} is not positive definite"))),
                Err(_) => return Err(fail(format!("letter {label} is not symmetric"))),
            }
        }
        let trace = word_product(&self.word, &self.a, &self.b)
            .map_err(|e| fail(e.to_string()))?
            .trace();
        if trace != self.trace {
            return Err(fail(format!(
                "stored trace {} but computed {}",
                self.trace, trace
            )));
        }
        if !trace.is_negative() {
            return Err(fail(format!("trace {trace} is not negative")));
        }
        Ok(())
    }

    /// The same letters relabelled, certifying the interchanged word.
    pub fn interchanged(&self) -> WitnessPair {
        WitnessPair {
            name: format!("{}*", self.name),
            word: self.word.interchanged(),
            a: self.b.clone(),
            b: self.a.clone(),
            trace: self.trace.clone(),
            provenance: self.provenance,
            metadata: self.metadata.clone(),
        }
    }
}

/// The two published witness pairs as exact constants.
pub mod published {
    use super::*;
    use crate::linalg::rational::ratio;

    pub fn a1() -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[&[1, 20, 210], &[20, 402, 4240], &[210, 4240, 44903]])
            .expect("constant is square")
    }

    pub fn b1() -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[&[36501, -3820, 190], &[-3820, 401, -20], &[190, -20, 1]])
            .expect("constant is square")
    }

    fn from_fractions(rows: [[(i64, i64); 3]; 3]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
                .collect(),
        )
        .expect("constant is square")
    }

    pub fn a2() -> RationalMatrix {
        from_fractions([
            [(4351, 479), (4856, 399), (18421, 62)],
            [(4856, 399), (16073, 64), (3784, 21)],
            [(18421, 62), (3784, 21), (89917, 9)],
        ])
    }

    pub fn b2() -> RationalMatrix {
        from_fractions([
            [(2461, 149), (-297, 641), (-757, 1569)],
            [(-297, 641), (179, 6146), (50, 3767)],
            [(-757, 1569), (50, 3767), (269, 19081)],
        ])
    }

    pub const PAIR_1: &str = "A1B1";
    pub const PAIR_2: &str = "A2B2";

    /// `(A1, B1)` certifying `ABAABB`.
    pub fn pair_1() -> WitnessPair {
        WitnessPair::new(PAIR_1, word("ABAABB"), a1(), b1(), Provenance::Published)
            .expect("published pair verifies")
    }

    /// `(A2, B2)` certifying `BAABBAAA`.
    pub fn pair_2() -> WitnessPair {
        WitnessPair::new(PAIR_2, word("BAABBAAA"), a2(), b2(), Provenance::Published)
            .expect("published pair verifies")
    }

    /// Letters of a built-in pair by name (case-insensitive).
    pub fn letters(name: &str) -> Option<(RationalMatrix, RationalMatrix)> {
        match name.to_ascii_uppercase().as_str() {
            "A1B1" => Some((a1(), b1())),
            "A2B2" => Some((a2(), b2())),
            _ => None,
        }
    }

    fn word(text: &str) -> Word {
        text.parse().expect("constant word parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    #[test]
    fn published_pairs_verify() {
        let p1 = published::pair_1();
        assert_eq!(p1.trace, int(-3164));
        let p2 = published::pair_2();
        assert!(p2.trace < int(-143370) && p2.trace > int(-143371));
        p2.interchanged().verify().unwrap();
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let mut p = published::pair_1();
        p.trace = int(-3163);
        assert!(matches!(p.verify(), Err(Error::InvalidWitness { .. })));
    }

    #[test]
    fn positive_trace_is_not_a_witness() {
        let err = WitnessPair::new(
            "id",
            "AB".parse().unwrap(),
            RationalMatrix::identity(3),
            RationalMatrix::identity(3),
            Provenance::Search,
        );
        assert!(err.is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = published::pair_2().with_metadata("note", "x");
        let text = serde_json::to_string_pretty(&p).unwrap();
        assert!(text.contains("\"provenance\": \"published\""));
        let back: WitnessPair = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        back.verify().unwrap();
    }
}
