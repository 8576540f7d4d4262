//! Deformation of a witness pair toward scalar letters.
//!
//! `A(t) = (1 - t) A + t λ_A I` with `λ_A = tr A ≥ λ_max(A)`, likewise for
//! `B`. At `t = 1` the word is scalar and positive; at `t = 0` it has a
//! nonpositive eigenvalue. Between the two, a conjugate pair crosses into
//! the plane and for small enough argument `θ` the `k`-th power of the word
//! has a non-real spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate, spectrum_f64, word_product, word_product_f64, Verdict};
use crate::linalg::rational::{self, serde_text};
use crate::linalg::{Rational, RationalMatrix};
use crate::witness::WitnessPair;
use crate::word::Word;

#[derive(Clone, Debug)]
pub struct HomotopyConfig {
    /// Grid density at level 0; each refinement level doubles it.
    pub points_per_decade: usize,
    /// The grid runs over `t = 10^{-e}` for `0 <= e <= decades`.
    pub decades: usize,
    pub max_level: u32,
    /// Relative width of the interval from which `t*` is rationalized.
    pub rationalize_width: f64,
}

impl Default for HomotopyConfig {
    fn default() -> Self {
        HomotopyConfig {
            points_per_decade: 10,
            decades: 18,
            max_level: 4,
            rationalize_width: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSample {
    pub t: f64,
    pub eigenvalues: Vec<Complex64>,
    /// Smallest `|arg|` over the non-real eigenvalues, if any.
    pub min_nonreal_argument: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyScan {
    pub word: Word,
    pub power: usize,
    #[serde(with = "serde_text")]
    pub lambda_a: Rational,
    #[serde(with = "serde_text")]
    pub lambda_b: Rational,
    pub level: u32,
    pub samples: Vec<SpectrumSample>,
    #[serde(with = "serde_text")]
    pub t_star: Rational,
    pub theta: f64,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    /// Non-real roots, with multiplicity, of the exact characteristic
    /// polynomial of `W^k` at `t*`.
    pub exact_nonreal_roots: usize,
}

/// `(1 - t) m + t λ I`.
pub fn deform(m: &RationalMatrix, lambda: &Rational, t: &Rational) -> RationalMatrix {
    let one = Rational::one();
    &m.scale(&(&one - t)) + &RationalMatrix::scalar(m.order(), lambda * t)
}

fn deform_f64(m: &DMatrix<f64>, lambda: f64, t: f64) -> DMatrix<f64> {
    m * (1.0 - t) + DMatrix::identity(m.nrows(), m.ncols()) * (lambda * t)
}

fn sample(
    w: &Word,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    la: f64,
    lb: f64,
    t: f64,
) -> Result<SpectrumSample> {
    let m = word_product_f64(w, &deform_f64(a, la, t), &deform_f64(b, lb, t))?;
    let eigenvalues = spectrum_f64(&m)?;
    let scale = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_nonreal_argument = eigenvalues
        .iter()
        .filter(|z| z.im.abs() > 1e-12 * scale)
        .map(|z| z.arg().abs())
        .min_by(f64::total_cmp);
    Ok(SpectrumSample {
        t,
        eigenvalues,
        min_nonreal_argument,
    })
}

fn grid(cfg: &HomotopyConfig, level: u32) -> Vec<f64> {
    let per_decade = cfg.points_per_decade << level;
    (0..=per_decade * cfg.decades)
        .map(|i| 10f64.powf(-(i as f64) / per_decade as f64))
        .collect()
}

/// Scans `t` from 1 toward 0 on geometric grids of increasing density and
/// returns the first level at which some `t*` both shows a non-real
/// eigenvalue with `0 < |θ| < π/k` in floating point and, after
/// rationalizing `t*`, gives `W^k` a non-real root exactly.
pub fn homotopy_power_witness(
    w: &Word,
    k: usize,
    pair: &WitnessPair,
    cfg: &HomotopyConfig,
) -> Result<HomotopyScan> {
    if k < 2 {
        return Err(Error::InvalidArgument("power must be at least 2".into()));
    }
    if evaluate(w, &pair.a, &pair.b)?.verdict != Verdict::HasNonpositiveEigenvalue {
        return Err(Error::InvalidArgument(format!(
            "{w} has a positive spectrum at {}",
            pair.name
        )));
    }
    let (lambda_a, lambda_b) = (pair.a.trace(), pair.b.trace());
    let (af, bf) = (pair.a.to_f64(), pair.b.to_f64());
    let (la, lb) = (rational::to_f64(&lambda_a), rational::to_f64(&lambda_b));
    let bound = PI / k as f64;
    let mut points = 0;
    for level in 0..=cfg.max_level {
        let samples = grid(cfg, level)
            .into_iter()
            .map(|t| sample(w, &af, &bf, la, lb, t))
            .collect::<Result<Vec<_>>>()?;
        points = samples.len();
        let mut hits: Vec<&SpectrumSample> = samples
            .iter()
            .filter(|s| {
                s.min_nonreal_argument
                    .is_some_and(|th| th > 0.0 && th < bound)
            })
            .collect();
        hits.sort_by(|x, y| {
            x.min_nonreal_argument
                .unwrap()
                .total_cmp(&y.min_nonreal_argument.unwrap())
        });
        for hit in hits {
            let t_star = rationalize_t(hit.t, cfg.rationalize_width);
            let a = deform(&pair.a, &lambda_a, &t_star);
            let b = deform(&pair.b, &lambda_b, &t_star);
            let power = word_product(&w.power(k), &a, &b)?;
            let exact_nonreal_roots = power.charpoly().root_summary().nonreal_count();
            if exact_nonreal_roots == 0 {
                continue;
            }
            let theta = sample(w, &af, &bf, la, lb, rational::to_f64(&t_star))?
                .min_nonreal_argument
                .unwrap_or(hit.min_nonreal_argument.unwrap());
            return Ok(HomotopyScan {
                word: w.clone(),
                power: k,
                lambda_a,
                lambda_b,
                level,
                samples,
                t_star,
                theta,
                a,
                b,
                exact_nonreal_roots,
            });
        }
    }
    Err(Error::ScanExhausted {
        finest_level: cfg.max_level,
        points,
    })
}

/// Simplest fraction within relative distance `width` of `t`.
fn rationalize_t(t: f64, width: f64) -> Rational {
    let lo = Rational::from_float(t * (1.0 - width)).expect("finite");
    let hi = Rational::from_float(t * (1.0 + width)).expect("finite");
    rational::simplest_between(&lo, &hi)
}

/// Float spectrum of the word at deformation parameter `t`.
pub fn spectrum_at(w: &Word, pair: &WitnessPair, t: f64) -> Result<SpectrumSample> {
    let (la, lb) = (
        rational::to_f64(&pair.a.trace()),
        rational::to_f64(&pair.b.trace()),
    );
    sample(w, &pair.a.to_f64(), &pair.b.to_f64(), la, lb, t)
}
