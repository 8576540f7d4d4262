//! Evaluating words at concrete letters.
//!
//! The exact path works over rationals and decides spectral positivity from
//! the characteristic polynomial alone. The float path is for exploration
//! and for the random-sampling checks; it never produces a certified verdict.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rational::{self, ratio};
use crate::linalg::{CharPoly, Rational, RationalMatrix};
use crate::word::{Letter, Word};

/// Default relative tolerance for the float spectrum check.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest power accepted by [`trace_polynomial`].
pub const MAX_TRACE_POLYNOMIAL_DEGREE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AllEigenvaluesPositive,
    HasNonpositiveEigenvalue,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::AllEigenvaluesPositive => "AllEigenvaluesPositive",
            Verdict::HasNonpositiveEigenvalue => "HasNonpositiveEigenvalue",
            Verdict::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct WordEvaluation {
    pub word: Word,
    pub matrix: RationalMatrix,
    pub trace: Rational,
    pub charpoly: CharPoly,
    pub verdict: Verdict,
}

/// Ordered product with `a` substituted for `A` and `b` for `B`. Letters are
/// not checked for definiteness. The empty word gives the identity.
pub fn word_product(w: &Word, a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch(a.order(), b.order()));
    }
    let mut product: Option<RationalMatrix> = None;
    for (letter, run) in runs(w) {
        let base = if letter == Letter::A { a } else { b };
        let factor = base.pow(run as u32);
        product = Some(match product {
            None => factor,
            Some(p) => &p * &factor,
        });
    }
    Ok(product.unwrap_or_else(|| RationalMatrix::identity(a.order())))
}

fn runs(w: &Word) -> impl Iterator<Item = (Letter, usize)> + '_ {
    w.letters()
        .chunk_by(|x, y| x == y)
        .map(|chunk| (chunk[0], chunk.len()))
}

/// Exact evaluation at certified positive definite letters.
pub fn evaluate(w: &Word, a: &RationalMatrix, b: &RationalMatrix) -> Result<WordEvaluation> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch(a.order(), b.order()));
    }
    for (label, m) in [("letter A", a), ("letter B", b)] {
        if !m.is_positive_definite()? {
            return Err(Error::NotPositiveDefinite(label.into()));
        }
    }
    let matrix = word_product(w, a, b)?;
    let trace = matrix.trace();
    let charpoly = matrix.charpoly();
    let verdict = if charpoly.all_roots_real_positive() {
        Verdict::AllEigenvaluesPositive
    } else {
        Verdict::HasNonpositiveEigenvalue
    };
    Ok(WordEvaluation {
        word: w.clone(),
        matrix,
        trace,
        charpoly,
        verdict,
    })
}

pub fn word_product_f64(w: &Word, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    let mut m = DMatrix::identity(a.nrows(), a.nrows());
    for &l in w.letters() {
        m = if l == Letter::A { &m * a } else { &m * b };
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct FloatSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Every eigenvalue has real part above `tol * scale` and imaginary part
    /// below it in magnitude, `scale` being the largest modulus.
    pub all_positive: bool,
    pub verdict: Verdict,
}

/// Eigenvalues of a dense real matrix via the real Schur form.
pub fn spectrum_f64(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Classifies a float spectrum with tolerance relative to its largest modulus.
pub fn spectrum_is_positive(eigenvalues: &[Complex64], tol: f64) -> bool {
    let scale = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = tol * scale;
    eigenvalues
        .iter()
        .all(|z| z.re > cut && z.im.abs() < cut.max(f64::MIN_POSITIVE))
}

pub fn eigenvalues_float(
    w: &Word,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<FloatSpectrum> {
    for (label, m) in [("letter A", a), ("letter B", b)] {
        if !numerically_positive_definite(m, tol) {
            return Err(Error::NotPositiveDefinite(label.into()));
        }
    }
    let product = word_product_f64(w, a, b)?;
    let eigenvalues = spectrum_f64(&product)?;
    let all_positive = spectrum_is_positive(&eigenvalues, tol);
    let verdict = if all_positive {
        Verdict::AllEigenvaluesPositive
    } else {
        Verdict::Indeterminate
    };
    Ok(FloatSpectrum {
        eigenvalues,
        all_positive,
        verdict,
    })
}

/// Symmetric to relative tolerance, smallest eigenvalue above `tol`.
fn numerically_positive_definite(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > tol * scale {
        return false;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().all(|&l| l > tol)
}

/// `Tr[(A + tB)^m]` as exact coefficients `c_0..c_m`, where `c_k` sums the
/// traces of all words of length `m` with `k` letters `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TracePolynomial {
    pub degree: usize,
    #[serde(serialize_with = "serialize_rationals")]
    pub coefficients: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

impl TracePolynomial {
    pub fn all_coefficients_positive(&self) -> bool {
        self.coefficients.iter().all(Signed::is_positive)
    }
}

/// Expands `(A + tB)^m` one factor at a time: the coefficient matrices obey
/// `M_{i,k} = A M_{i-1,k} + B M_{i-1,k-1}`.
pub fn trace_polynomial(
    a: &RationalMatrix,
    b: &RationalMatrix,
    m: usize,
) -> Result<TracePolynomial> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch(a.order(), b.order()));
    }
    if m == 0 || m > MAX_TRACE_POLYNOMIAL_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "trace polynomial degree must be in 1..={MAX_TRACE_POLYNOMIAL_DEGREE}, got {m}"
        )));
    }
    let n = a.order();
    let mut layer = vec![RationalMatrix::identity(n)];
    for _ in 0..m {
        let mut next = Vec::with_capacity(layer.len() + 1);
        for k in 0..=layer.len() {
            let from_a = layer.get(k).map(|x| a * x);
            let from_b = k.checked_sub(1).and_then(|i| layer.get(i)).map(|x| b * x);
            next.push(match (from_a, from_b) {
                (Some(x), Some(y)) => &x + &y,
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => unreachable!(),
            });
        }
        layer = next;
    }
    Ok(TracePolynomial {
        degree: m,
        coefficients: layer.iter().map(RationalMatrix::trace).collect(),
    })
}

/// `G Gᵀ + I` for a random rational `G` with small entries.
pub fn random_positive_definite<R: Rng + ?Sized>(rng: &mut R, order: usize) -> RationalMatrix {
    let g = RationalMatrix::new(
        order,
        (0..order * order)
            .map(|_| ratio(rng.random_range(-5..=5), rng.random_range(1..=3)))
            .collect(),
    )
    .expect("order is positive");
    &(&g * &g.transpose()) + &RationalMatrix::identity(order)
}

/// `G Gᵀ + I` for a random `G` with entries uniform in `[-1, 1]`.
pub fn random_positive_definite_f64<R: Rng + ?Sized>(rng: &mut R, order: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(order, order, |_, _| rng.random_range(-1.0..=1.0));
    &g * g.transpose() + DMatrix::identity(order, order)
}

/// Letters padded with a small scalar block, keeping the trace negative.
#[derive(Clone, Debug)]
pub struct DirectSumEmbedding {
    pub epsilon: Rational,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    pub trace: Rational,
}

/// Embeds a negative-trace witness into order `a.order() + extra` as
/// `(a ⊕ εI, b ⊕ εI)`. The block adds `extra · ε^len` to the trace, so
/// `ε = min(1, |trace| / (2 · extra))` keeps the sum below `trace / 2`.
pub fn direct_sum_embedding(
    w: &Word,
    a: &RationalMatrix,
    b: &RationalMatrix,
    extra: usize,
) -> Result<DirectSumEmbedding> {
    if extra == 0 {
        return Err(Error::InvalidArgument(
            "identity block must be nonempty".into(),
        ));
    }
    let base = word_product(w, a, b)?.trace();
    if !base.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "trace {base} is not negative"
        )));
    }
    let bound = base.abs() / rational::int(2 * extra as i64);
    let epsilon = if bound < Rational::one() {
        bound
    } else {
        Rational::one()
    };
    let block = RationalMatrix::scalar(extra, epsilon.clone());
    let (a, b) = (a.direct_sum(&block), b.direct_sum(&block));
    let trace = word_product(w, &a, &b)?.trace();
    debug_assert!(trace.is_negative() && !epsilon.is_zero());
    Ok(DirectSumEmbedding {
        epsilon,
        a,
        b,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;
    use crate::witness::published;
    use crate::word::{all_words, classify};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn known_traces() {
        let e = evaluate(&w("ABAABB"), &published::a1(), &published::b1()).unwrap();
        assert_eq!(e.trace, int(-3164));
        assert_eq!(e.verdict, Verdict::HasNonpositiveEigenvalue);

        let i = RationalMatrix::identity(3);
        let e = evaluate(&w("ABBABAB"), &i, &i).unwrap();
        assert_eq!(e.trace, int(3));
        assert_eq!(e.verdict, Verdict::AllEigenvaluesPositive);

        let e = evaluate(&w("BAABBAAA"), &published::a2(), &published::b2()).unwrap();
        assert!((rational::to_f64(&e.trace) + 143370.8471).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_letters() {
        let i = RationalMatrix::identity(3);
        assert!(matches!(
            evaluate(&w("AB"), &i, &RationalMatrix::identity(2)),
            Err(Error::DimensionMismatch(3, 2))
        ));
        let neg = i.scale(&int(-1));
        assert!(matches!(
            evaluate(&w("AB"), &i, &neg),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn float_flag_on_witness() {
        let s = eigenvalues_float(
            &w("ABAABB"),
            &published::a1().to_f64(),
            &published::b1().to_f64(),
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert!(!s.all_positive);
        assert_eq!(s.eigenvalues.len(), 3);
    }

    #[test]
    fn trace_polynomial_matches_word_sums() {
        let i = RationalMatrix::identity(3);
        let p = trace_polynomial(&i, &i, 2).unwrap();
        assert_eq!(p.coefficients, [3, 6, 3].map(int));

        // oracle: sum the traces of the 20 words with three B's
        let (a, b) = (published::a1(), published::b1());
        let p = trace_polynomial(&a, &b, 6).unwrap();
        let c3: Rational = all_words(6)
            .filter(|x| x.count_b() == 3)
            .map(|x| word_product(&x, &a, &b).unwrap().trace())
            .sum();
        assert_eq!(p.coefficients[3], c3);
        assert_eq!(p.coefficients[0], a.pow(6).trace());
        assert_eq!(p.coefficients[6], b.pow(6).trace());
        assert!(trace_polynomial(&a, &b, 0).is_err());
    }

    #[test]
    fn embedding_keeps_trace_negative() {
        let (a, b) = (published::a1(), published::b1());
        for extra in 1..=3 {
            let emb = direct_sum_embedding(&w("ABAABB"), &a, &b, extra).unwrap();
            assert!(emb.trace.is_negative());
            assert_eq!(emb.a.order(), 3 + extra);
            assert!(emb.a.is_positive_definite().unwrap());
        }
        let i = RationalMatrix::identity(3);
        assert!(direct_sum_embedding(&w("AB"), &i, &i, 1).is_err());
    }

    #[test]
    fn symmetric_words_are_positive_on_random_letters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for len in 1..=7 {
            for word in all_words(len)
                .filter(|x| classify(x).guarantees_positive_spectrum())
                .take(6)
            {
                let a = random_positive_definite(&mut rng, 3);
                let b = random_positive_definite(&mut rng, 3);
                assert_eq!(
                    evaluate(&word, &a, &b).unwrap().verdict,
                    Verdict::AllEigenvaluesPositive
                );
            }
        }
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop::bool::ANY, 1..=9).prop_map(|bits| {
            Word::new(
                bits.into_iter()
                    .map(|x| if x { Letter::B } else { Letter::A })
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn trace_is_rotation_invariant(word in arb_word(), k in 0usize..9, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_positive_definite(&mut rng, 3);
            let b = random_positive_definite(&mut rng, 3);
            let t = word_product(&word, &a, &b).unwrap().trace();
            prop_assert_eq!(t, word_product(&word.rotated(k), &a, &b).unwrap().trace());
            prop_assert_eq!(
                word_product(&word, &a, &b).unwrap().charpoly(),
                word_product(&word.reversed(), &a, &b).unwrap().charpoly()
            );
        }

        #[test]
        fn determinant_is_multiplicative(word in arb_word(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_positive_definite(&mut rng, 3);
            let b = random_positive_definite(&mut rng, 3);
            let det = word_product(&word, &a, &b).unwrap().det();
            let expected = num_traits::pow(a.det(), word.count_a()) * num_traits::pow(b.det(), word.count_b());
            prop_assert!(det.is_positive());
            prop_assert_eq!(det, expected);
        }

        #[test]
        fn two_by_two_words_have_positive_spectra(word in arb_word(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_positive_definite_f64(&mut rng, 2);
            let b = random_positive_definite_f64(&mut rng, 2);
            let s = eigenvalues_float(&word, &a, &b, DEFAULT_TOLERANCE).unwrap();
            prop_assert!(s.all_positive);
        }
    }
}
