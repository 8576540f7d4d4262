//! Words over the alphabet {A, B} and the three eigenvalue-preserving
//! symmetries: reversal, cyclic permutation and interchange of the letters.
//!
//! A word is *symmetric* when it reads the same in both directions and
//! *nearly symmetric* when it is a product of two symmetric words (either of
//! which may be empty). Nearly symmetric words are exactly the ones known to
//! force a positive spectrum at every pair of positive definite letters.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::{Error, Result};

/// Upper bound on the expanded length accepted by the parser.
pub const MAX_PARSED_LENGTH: usize = 1 << 20;

/// Longest word length the bit-packed census supports.
pub const MAX_CENSUS_LENGTH: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn interchanged(self) -> Self {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'A' => Some(Letter::A),
            'B' => Some(Letter::B),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite sequence of letters. Ordering is lexicographic with `A < B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseWordError {
    #[error("empty word")]
    Empty,
    #[error("illegal character {found:?} at position {position}")]
    IllegalCharacter { position: usize, found: char },
    #[error("missing exponent at position {position}")]
    MissingExponent { position: usize },
    #[error("exponent must be a positive integer (position {position})")]
    InvalidExponent { position: usize },
    #[error("word longer than {MAX_PARSED_LENGTH} letters")]
    TooLong,
}

impl ParseWordError {
    /// 1-based character position of the offending input, when there is one.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseWordError::IllegalCharacter { position, .. }
            | ParseWordError::MissingExponent { position }
            | ParseWordError::InvalidExponent { position } => Some(*position),
            _ => None,
        }
    }
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// `letter` repeated `n` times.
    pub fn run(letter: Letter, n: usize) -> Self {
        Word(vec![letter; n])
    }

    /// Parses exponent notation such as `AB^2AB^2A`.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseWordError> {
        if text.is_empty() {
            return Err(ParseWordError::Empty);
        }
        let chars: Vec<char> = text.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let letter = Letter::from_char(chars[i]).ok_or(ParseWordError::IllegalCharacter {
                position: i + 1,
                found: chars[i],
            })?;
            i += 1;
            let mut count = 1usize;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(match chars.get(start) {
                        None => ParseWordError::MissingExponent {
                            position: start + 1,
                        },
                        Some(_) => ParseWordError::InvalidExponent {
                            position: start + 1,
                        },
                    });
                }
                let digits: String = chars[start..i].iter().collect();
                count = match digits.parse::<usize>() {
                    Ok(0) | Err(_) => {
                        return Err(ParseWordError::InvalidExponent {
                            position: start + 1,
                        })
                    }
                    Ok(n) => n,
                };
            }
            if letters.len() + count > MAX_PARSED_LENGTH {
                return Err(ParseWordError::TooLong);
            }
            letters.extend(std::iter::repeat_n(letter, count));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn count_a(&self) -> usize {
        self.count(Letter::A)
    }

    pub fn count_b(&self) -> usize {
        self.count(Letter::B)
    }

    pub fn reversed(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Moves the first `k` letters (mod length) to the end.
    pub fn rotated(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word(v)
    }

    pub fn interchanged(&self) -> Self {
        Word(self.0.iter().map(|l| l.interchanged()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn power(&self, k: usize) -> Self {
        Word(self.0.repeat(k))
    }

    pub fn is_symmetric(&self) -> bool {
        is_palindrome(&self.0)
    }

    /// Run-length rendering with `^` on runs of two or more, e.g. `AB^2AB^2A`.
    pub fn to_exponent_string(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let letter = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == letter {
                j += 1;
            }
            out.push(letter.as_char());
            if j - i >= 2 {
                out.push('^');
                out.push_str(&(j - i).to_string());
            }
            i = j;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Ok(Word::empty());
        }
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn is_palindrome(letters: &[Letter]) -> bool {
    letters.iter().eq(letters.iter().rev())
}

/// Equivalence class of a word under the three symmetries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub representative: Word,
    pub members: BTreeSet<Word>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All images of `w` under rotation, optional reversal and optional interchange.
pub fn orbit(w: &Word) -> Orbit {
    let mut members = BTreeSet::new();
    for base in [w.clone(), w.interchanged()] {
        for v in [base.reversed(), base] {
            for k in 0..w.len().max(1) {
                members.insert(v.rotated(k));
            }
        }
    }
    let representative = members.iter().next().cloned().unwrap_or_default();
    Orbit {
        representative,
        members,
    }
}

/// Lexicographically least member of the orbit, without building the orbit.
pub fn canonical_form(w: &Word) -> Word {
    let n = w.len();
    if n == 0 {
        return Word::empty();
    }
    let images = [
        w.0.clone(),
        w.reversed().0,
        w.interchanged().0,
        w.interchanged().reversed().0,
    ];
    let mut best: Option<(usize, usize)> = None;
    let doubled: Vec<Vec<Letter>> = images
        .iter()
        .map(|v| v.iter().chain(v.iter()).copied().collect())
        .collect();
    for (idx, d) in doubled.iter().enumerate() {
        for k in 0..n {
            let better = match best {
                None => true,
                Some((bi, bk)) => d[k..k + n] < doubled[bi][bk..bk + n],
            };
            if better {
                best = Some((idx, k));
            }
        }
    }
    let (bi, bk) = best.expect("nonempty word has an image");
    Word(doubled[bi][bk..bk + n].to_vec())
}

/// One orbit per equivalence class among words of `length` letters with
/// `count_a` copies of `A`. Interchange merges a class with its complement,
/// so the members of a returned orbit may carry `length - count_a` A's.
pub fn enumerate_classes(length: usize, count_a: usize) -> Vec<Orbit> {
    if length == 0 || count_a > length {
        return Vec::new();
    }
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for_each_word_with_count(length, count_a, |w| {
        let rep = canonical_form(&w);
        if seen.insert(rep.clone()) {
            reps.push(rep);
        }
    });
    reps.sort();
    reps.iter().map(orbit).collect()
}

fn for_each_word_with_count(length: usize, count_a: usize, mut f: impl FnMut(Word)) {
    fn rec(buf: &mut Vec<Letter>, length: usize, remaining_a: usize, f: &mut impl FnMut(Word)) {
        let left = length - buf.len();
        if left == 0 {
            f(Word(buf.clone()));
            return;
        }
        if remaining_a > 0 {
            buf.push(Letter::A);
            rec(buf, length, remaining_a - 1, f);
            buf.pop();
        }
        if left > remaining_a {
            buf.push(Letter::B);
            rec(buf, length, remaining_a, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(length);
    rec(&mut buf, length, count_a, &mut f);
}

/// Every word of the given length, in lexicographic order.
pub fn all_words(length: usize) -> impl Iterator<Item = Word> {
    assert!(length < 64, "word length {length} too large to enumerate");
    (0u64..1 << length).map(move |bits| {
        Word(
            (0..length)
                .map(|i| {
                    if bits >> (length - 1 - i) & 1 == 1 {
                        Letter::B
                    } else {
                        Letter::A
                    }
                })
                .collect(),
        )
    })
}

/// Two symmetric factors whose product is the decomposed word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearSymmetricDecomposition {
    pub first: Word,
    pub second: Word,
}

/// Tries every split point, left to right, and returns the first one at
/// which both the prefix and the remainder are symmetric.
pub fn near_symmetric_decomposition(w: &Word) -> Option<NearSymmetricDecomposition> {
    let letters = w.letters();
    (0..=letters.len())
        .find(|&i| is_palindrome(&letters[..i]) && is_palindrome(&letters[i..]))
        .map(|i| NearSymmetricDecomposition {
            first: Word(letters[..i].to_vec()),
            second: Word(letters[i..].to_vec()),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Symmetric,
    NearlySymmetric,
    NotNearlySymmetric,
}

impl Classification {
    /// True for the classes whose words always evaluate to a positive spectrum.
    pub fn guarantees_positive_spectrum(self) -> bool {
        !matches!(self, Classification::NotNearlySymmetric)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Symmetric => "Symmetric",
            Classification::NearlySymmetric => "NearlySymmetric",
            Classification::NotNearlySymmetric => "NotNearlySymmetric",
        };
        f.write_str(s)
    }
}

pub fn classify(w: &Word) -> Classification {
    if w.is_symmetric() {
        Classification::Symmetric
    } else if near_symmetric_decomposition(w).is_some() {
        Classification::NearlySymmetric
    } else {
        Classification::NotNearlySymmetric
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub length: usize,
    pub total: u64,
    pub nearly_symmetric: u64,
    pub density: f64,
}

/// Exhaustive count of nearly symmetric words for each length `1..=max_length`.
pub fn nearly_symmetric_census(max_length: usize) -> Result<Vec<CensusRow>> {
    if max_length == 0 || max_length > MAX_CENSUS_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "census length must be in 1..={MAX_CENSUS_LENGTH}, got {max_length}"
        )));
    }
    Ok((1..=max_length)
        .map(|length| {
            let total = 1u64 << length;
            let nearly_symmetric = (0..total)
                .filter(|&bits| packed_is_nearly_symmetric(bits, length))
                .count() as u64;
            CensusRow {
                length,
                total,
                nearly_symmetric,
                density: nearly_symmetric as f64 / total as f64,
            }
        })
        .collect())
}

// Bit i of `bits` is letter i (1 = B). A segment [s, e) is a palindrome iff it
// equals the matching segment of the reversed word read forwards.
fn packed_is_nearly_symmetric(bits: u64, length: usize) -> bool {
    let mut rev = 0u64;
    for i in 0..length {
        rev |= (bits >> i & 1) << (length - 1 - i);
    }
    let segment_is_palindrome = |s: usize, e: usize| {
        let width = e - s;
        if width <= 1 {
            return true;
        }
        let mask = (1u64 << width) - 1;
        (bits >> s) & mask == (rev >> (length - e)) & mask
    };
    (0..=length).any(|i| segment_is_palindrome(0, i) && segment_is_palindrome(i, length))
}
