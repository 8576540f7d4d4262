//! Parametric search for negative-trace witnesses.
//!
//! Every pair of positive definite letters can be written as
//! `A = S E Sᵀ`, `B = S⁻ᵀ E⁻¹ D S⁻¹` with `D`, `E` positive diagonal (here `E`
//! is restricted to diagonal). Substituting into a word and conjugating away
//! the outer `S` leaves a product over `D`, `E^{±1}` and `P^{±1}`, `P = SᵀS`,
//! with the same spectrum as the word. The search fixes `P`, minimizes the
//! normalized trace over the logarithms of the diagonals, and turns any
//! negative point back into exact rational letters.

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::word_product;
use crate::linalg::rational;
use crate::linalg::{Rational, RationalMatrix};
use crate::witness::{Provenance, WitnessPair};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Token {
    D,
    E,
    EInv,
    P,
    PInv,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Token::D => "D",
            Token::E => "E",
            Token::EInv => "E⁻¹",
            Token::P => "P",
            Token::PInv => "P⁻¹",
        })
    }
}

/// Token product spectrally equivalent to a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParametricExpression {
    pub tokens: Vec<Token>,
}

impl fmt::Display for ParametricExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tokens.iter().try_for_each(|t| t.fmt(f))
    }
}

/// What sits between two adjacent letters once `Sᵀ S = P` is folded.
fn junction(left: Letter, right: Letter) -> Option<Token> {
    match (left, right) {
        (Letter::A, Letter::A) => Some(Token::P),
        (Letter::B, Letter::B) => Some(Token::PInv),
        _ => None,
    }
}

/// Letters joined by identity junctions alternate, so a run carries
/// `D^{#B}` and `E^{#A - #B}` with the exponent in `{-1, 0, 1}`.
fn push_group(tokens: &mut Vec<Token>, count_a: usize, count_b: usize) {
    tokens.extend(std::iter::repeat_n(Token::D, count_b));
    match count_a as isize - count_b as isize {
        1 => tokens.push(Token::E),
        -1 => tokens.push(Token::EInv),
        _ => {}
    }
}

/// `A → E`, `B → E⁻¹D` between junctions `AA → P`, `BB → P⁻¹` and identity
/// otherwise; the junction from the last letter back to the first closes
/// the product.
pub fn transform_word(w: &Word) -> ParametricExpression {
    let letters = w.letters();
    let mut tokens = Vec::new();
    let (mut count_a, mut count_b) = (0, 0);
    for (i, &l) in letters.iter().enumerate() {
        if l == Letter::A {
            count_a += 1;
        } else {
            count_b += 1;
        }
        let next = letters[(i + 1) % letters.len()];
        if let Some(j) = junction(l, next) {
            push_group(&mut tokens, count_a, count_b);
            (count_a, count_b) = (0, 0);
            tokens.push(j);
        }
    }
    push_group(&mut tokens, count_a, count_b);
    ParametricExpression { tokens }
}

impl ParametricExpression {
    /// Float value at `D = diag(d)`, `E = diag(e)` and the given `P`, `P⁻¹`.
    pub fn evaluate(
        &self,
        d: &[f64],
        e: &[f64],
        p: &DMatrix<f64>,
        p_inv: &DMatrix<f64>,
    ) -> DMatrix<f64> {
        let n = p.nrows();
        let mut m = DMatrix::<f64>::identity(n, n);
        for t in &self.tokens {
            match t {
                Token::D => scale_columns(&mut m, |j| d[j]),
                Token::E => scale_columns(&mut m, |j| e[j]),
                Token::EInv => scale_columns(&mut m, |j| e[j].recip()),
                Token::P => m = &m * p,
                Token::PInv => m = &m * p_inv,
            }
        }
        m
    }
}

fn scale_columns(m: &mut DMatrix<f64>, f: impl Fn(usize) -> f64) {
    for (j, mut col) in m.column_iter_mut().enumerate() {
        col *= f(j);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub order: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Starting log-parameters are uniform in `[-log_range, log_range]`.
    pub log_range: f64,
    /// Log-parameters beyond `±log_bound` are penalized quadratically.
    pub log_bound: f64,
    /// `P = G Gᵀ + I` with integer `G` entries in `[-g_range, g_range]`.
    pub g_range: i64,
    pub max_evaluations: usize,
    pub initial_step: f64,
    pub first_denominator: u64,
    pub max_denominator: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            order: 3,
            restarts: 200,
            seed: 1,
            log_range: 6.0,
            log_bound: 8.0,
            g_range: 3,
            max_evaluations: 4000,
            initial_step: 1.0,
            first_denominator: 10_000,
            max_denominator: 1_000_000_000_000,
        }
    }
}

/// Float point with negative trace.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub restart: usize,
    pub p: DMatrix<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub trace: f64,
    pub normalized_trace: f64,
}

/// Objective: trace over Frobenius norm, plus a penalty outside the box.
struct Objective<'a> {
    expr: &'a ParametricExpression,
    p: DMatrix<f64>,
    p_inv: DMatrix<f64>,
    n: usize,
    bound: f64,
}

impl Objective<'_> {
    fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = x[..self.n].iter().map(|v| v.exp()).collect();
        let e = x[self.n..].iter().map(|v| v.exp()).collect();
        (d, e)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (d, e) = self.split(x);
        let m = self.expr.evaluate(&d, &e, &self.p, &self.p_inv);
        let norm = m.norm();
        let base = if norm.is_finite() && norm > 0.0 {
            m.trace() / norm
        } else {
            f64::INFINITY
        };
        let excess: f64 = x
            .iter()
            .map(|v| (v.abs() - self.bound).max(0.0).powi(2))
            .sum();
        base + excess
    }
}

/// Nelder-Mead with the standard coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2).
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_evaluations: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=dim)
        .map(|i| {
            let mut x = start.to_vec();
            if i > 0 {
                x[i - 1] += step;
            }
            let v = f(&x);
            (x, v)
        })
        .collect();
    let mut evaluations = dim + 1;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while evaluations < max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[dim].1);
        if (worst - best).abs() <= 1e-12 * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst_x = simplex[dim].0.clone();
        let reflected = lerp(&centroid, &worst_x, -1.0);
        let fr = f(&reflected);
        evaluations += 1;
        if fr < best {
            let expanded = lerp(&centroid, &worst_x, -2.0);
            let fe = f(&expanded);
            evaluations += 1;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let (target, ft) = if fr < worst {
                (&reflected, fr)
            } else {
                (&worst_x, worst)
            };
            let contracted = lerp(&centroid, target, 0.5);
            let fc = f(&contracted);
            evaluations += 1;
            if fc < ft {
                simplex[dim] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = lerp(&anchor, &entry.0, 0.5);
                    let v = f(&x);
                    *entry = (x, v);
                }
                evaluations += dim;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn restart_rng(cfg: &SearchConfig, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    rng
}

/// Integer `G Gᵀ + I`.
pub fn sample_p<R: Rng + ?Sized>(rng: &mut R, order: usize, g_range: i64) -> RationalMatrix {
    let g = RationalMatrix::new(
        order,
        (0..order * order)
            .map(|_| rational::int(rng.random_range(-g_range..=g_range)))
            .collect(),
    )
    .expect("order is positive");
    &(&g * &g.transpose()) + &RationalMatrix::identity(order)
}

/// One descent from the restart's random start; `Some` when the final
/// trace is negative.
pub fn descend(
    expr: &ParametricExpression,
    cfg: &SearchConfig,
    restart: usize,
) -> Option<Candidate> {
    let mut rng = restart_rng(cfg, restart);
    let p = sample_p(&mut rng, cfg.order, cfg.g_range).to_f64();
    let p_inv = p.clone().try_inverse()?;
    let start: Vec<f64> = (0..2 * cfg.order)
        .map(|_| rng.random_range(-cfg.log_range..=cfg.log_range))
        .collect();
    let objective = Objective {
        expr,
        p,
        p_inv,
        n: cfg.order,
        bound: cfg.log_bound,
    };
    let (x, value) = nelder_mead(
        |x| objective.value(x),
        &start,
        cfg.initial_step,
        cfg.max_evaluations,
    );
    let (d, e) = objective.split(&x);
    let trace = expr
        .evaluate(&d, &e, &objective.p, &objective.p_inv)
        .trace();
    (trace < 0.0 && value < 0.0).then_some(Candidate {
        restart,
        p: objective.p,
        d,
        e,
        trace,
        normalized_trace: value,
    })
}

/// First negative-trace candidate over the configured restarts.
pub fn minimize_trace(expr: &ParametricExpression, cfg: &SearchConfig) -> Option<Candidate> {
    (0..cfg.restarts).find_map(|r| descend(expr, cfg, r))
}

/// Float letters `A = S E Sᵀ`, `B = S⁻ᵀ E⁻¹ D S⁻¹` with `S = Lᵀ`, `P = L Lᵀ`.
pub fn recover_letters(
    p: &DMatrix<f64>,
    d: &[f64],
    e: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = p.nrows();
    if d.len() != n || e.len() != n {
        return Err(Error::DimensionMismatch(n, d.len().min(e.len())));
    }
    if d.iter().chain(e).any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidArgument("diagonals must be positive".into()));
    }
    let chol = Cholesky::new(p.clone()).ok_or_else(|| Error::NotPositiveDefinite("P".into()))?;
    let s = chol.l().transpose();
    let s_inv = s.clone().try_inverse().ok_or(Error::Singular)?;
    let e_mat = DMatrix::from_diagonal(&DVector::from_column_slice(e));
    let de = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        d.iter().zip(e).map(|(x, y)| x / y),
    ));
    let a = &s * e_mat * s.transpose();
    let b = s_inv.transpose() * de * &s_inv;
    Ok((a, b))
}

/// Upper triangle rationalized with the given denominator bound, mirrored.
pub fn rationalize_symmetric(m: &DMatrix<f64>, max_den: &BigInt) -> Option<RationalMatrix> {
    let n = m.nrows();
    let mut out = RationalMatrix::zero(n);
    for i in 0..n {
        for j in i..n {
            let v = rational::rationalize(0.5 * (m[(i, j)] + m[(j, i)]), max_den)?;
            out.set(i, j, v.clone());
            out.set(j, i, v);
        }
    }
    Some(out)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Certification {
    Certified {
        denominator_bound: u64,
    },
    /// No bound up to the cap gave exact positive definite letters with a
    /// negative trace.
    Failed {
        last_bound: u64,
    },
}

/// Rationalizes float letters with a doubling denominator bound until the
/// exact letters are positive definite and the word's exact trace is negative.
pub fn certify(
    w: &Word,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    cfg: &SearchConfig,
) -> (
    Option<(RationalMatrix, RationalMatrix, Rational)>,
    Certification,
) {
    let mut bound = cfg.first_denominator.max(1);
    let mut last = bound;
    while bound <= cfg.max_denominator {
        last = bound;
        let big = BigInt::from(bound);
        if let (Some(ra), Some(rb)) = (
            rationalize_symmetric(a, &big),
            rationalize_symmetric(b, &big),
        ) {
            let definite = ra.is_positive_definite().unwrap_or(false)
                && rb.is_positive_definite().unwrap_or(false);
            if definite {
                if let Ok(m) = word_product(w, &ra, &rb) {
                    let trace = m.trace();
                    if trace.is_negative() {
                        return (
                            Some((ra, rb, trace)),
                            Certification::Certified {
                                denominator_bound: bound,
                            },
                        );
                    }
                }
            }
        }
        bound = match bound.checked_mul(2) {
            Some(b) => b,
            None => break,
        };
    }
    (None, Certification::Failed { last_bound: last })
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found {
        witness: WitnessPair,
        restart: usize,
        float_trace: f64,
        denominator_bound: u64,
    },
    Exhausted {
        restarts: usize,
        /// Restarts that produced no certified candidate.
        rejected: usize,
    },
}

/// Full pipeline: transform, descend from each restart, recover letters and
/// certify exactly. Stops at the first certified witness.
pub fn search_witness(w: &Word, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    if cfg.order == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let expr = transform_word(w);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut rejected = 0;
    let mut next = 0;
    while next < cfg.restarts {
        let batch: Vec<usize> = (next..cfg.restarts.min(next + workers)).collect();
        next += batch.len();
        // Restarts are independent; taking the lowest certified index keeps the
        // outcome independent of the worker count.
        let results: Vec<Result<Option<Certified>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&restart| {
                    let expr = &expr;
                    scope.spawn(move || run_restart(w, expr, cfg, restart))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("restart thread panicked"))
                .collect()
        });
        for (restart, result) in batch.into_iter().zip(results) {
            let Some((ra, rb, float_trace, denominator_bound)) = result? else {
                rejected += 1;
                continue;
            };
            let witness =
                WitnessPair::new(format!("search-{w}"), w.clone(), ra, rb, Provenance::Search)?
                    .with_metadata("seed", cfg.seed)
                    .with_metadata("restart", restart)
                    .with_metadata("expression", expr.to_string());
            return Ok(SearchOutcome::Found {
                witness,
                restart,
                float_trace,
                denominator_bound,
            });
        }
    }
    Ok(SearchOutcome::Exhausted {
        restarts: cfg.restarts,
        rejected,
    })
}

/// Certified letters with the float trace and denominator bound that produced them.
type Certified = (RationalMatrix, RationalMatrix, f64, u64);

fn run_restart(
    w: &Word,
    expr: &ParametricExpression,
    cfg: &SearchConfig,
    restart: usize,
) -> Result<Option<Certified>> {
    let Some(c) = descend(expr, cfg, restart) else {
        return Ok(None);
    };
    let (a, b) = recover_letters(&c.p, &c.d, &c.e)?;
    Ok(match certify(w, &a, &b, cfg) {
        (Some((ra, rb, _)), Certification::Certified { denominator_bound }) => {
            Some((ra, rb, c.trace, denominator_bound))
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{spectrum_f64, word_product_f64};
    use num_complex::Complex64;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn token_strings() {
        assert_eq!(transform_word(&w("BAABBAAA")).to_string(), "DPDP⁻¹DPEPE");
        assert_eq!(transform_word(&w("AB")).to_string(), "D");
        assert_eq!(transform_word(&w("ABAABB")).to_string(), "DEPDP⁻¹DE⁻¹");
        assert_eq!(transform_word(&w("A")).to_string(), "EP");
        assert_eq!(transform_word(&w("B")).to_string(), "DE⁻¹P⁻¹");
    }

    #[test]
    fn expression_spectrum_matches_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for text in ["ABAABB", "BAABBAAA", "AABABABBAB", "ABBBA", "A", "ABAB"] {
            let word = w(text);
            let expr = transform_word(&word);
            for _ in 0..20 {
                let p = sample_p(&mut rng, 3, 2).to_f64();
                let d: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..3.0)).collect();
                let e: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..3.0)).collect();
                let (a, b) = recover_letters(&p, &d, &e).unwrap();
                let lhs = sorted(
                    spectrum_f64(&expr.evaluate(&d, &e, &p, &p.clone().try_inverse().unwrap()))
                        .unwrap(),
                );
                let rhs = sorted(spectrum_f64(&word_product_f64(&word, &a, &b).unwrap()).unwrap());
                let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for (x, y) in lhs.iter().zip(&rhs) {
                    assert!((x - y).norm() <= 1e-6 * scale, "{text}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn identity_recovery() {
        let p = DMatrix::identity(3, 3);
        let (a, b) = recover_letters(&p, &[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        let big = BigInt::from(10_000);
        assert_eq!(
            rationalize_symmetric(&a, &big).unwrap(),
            RationalMatrix::identity(3)
        );
        let diag = RationalMatrix::diagonal(&[1, 2, 3].map(rational::int));
        assert_eq!(rationalize_symmetric(&b, &big).unwrap(), diag);
        assert!(recover_letters(&p, &[1.0, -1.0, 1.0], &[1.0; 3]).is_err());
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, v) = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[5.0, 5.0],
            1.0,
            2000,
        );
        assert!(v < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn positive_words_yield_no_candidate() {
        let cfg = SearchConfig {
            restarts: 5,
            max_evaluations: 600,
            ..SearchConfig::default()
        };
        assert!(minimize_trace(&transform_word(&w("AB")), &cfg).is_none());
        assert!(minimize_trace(&transform_word(&w("ABBABBA")), &cfg).is_none());
    }

    #[test]
    fn restarts_are_reproducible() {
        let cfg = SearchConfig::default();
        let mut r1 = restart_rng(&cfg, 4);
        let mut r2 = restart_rng(&cfg, 4);
        assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        assert_ne!(
            restart_rng(&cfg, 5).random::<u64>(),
            restart_rng(&cfg, 4).random::<u64>()
        );
    }
}
