//! Synthetic series with known ground truth, and shuffle surrogates.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64(seed)`. Generators that need several
//! independent streams select them with `set_stream(k)` on the same key.
//! Samples are drawn in `f64` and cast, so `f32` and `f64` outputs come from
//! the same draws. The fGn generator uses the portable scalar FFT planner so
//! its output does not depend on the CPU's SIMD features.

use std::f64::consts::LN_2;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlannerScalar;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Stream selector for the cascade's branch orientations.
const CASCADE_STREAM: u64 = 1;
/// Stream selector for shuffle surrogates.
const SHUFFLE_STREAM: u64 = 2;

/// Generator family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Fractional Gaussian noise with unit variance.
    Fgn { hurst: f64 },
    /// Binomial multiplicative cascade on `2^levels` cells, normalized to
    /// mean 1. At every split one half receives weight `p`, the other `1 − p`,
    /// with the side chosen at random.
    BinomialCascade { p: f64, levels: u32 },
    /// Independent Weibull waiting times `x0 (−ln U)^{1/α}`.
    WeibullRenewal { alpha: f64, x0: f64 },
    /// Pareto samples with survival function `(x / x_min)^{-β}`.
    Pareto { beta: f64, x_min: f64 },
    /// Gaussian AR(1) with unit innovations, started in its stationary law.
    Ar1 { phi: f64 },
    /// Standard Gaussian white noise.
    White,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Fgn { hurst } => write!(f, "fgn H={hurst}"),
            GeneratorKind::BinomialCascade { p, levels } => write!(f, "binomial-cascade p={p} levels={levels}"),
            GeneratorKind::WeibullRenewal { alpha, x0 } => write!(f, "weibull-renewal alpha={alpha} x0={x0}"),
            GeneratorKind::Pareto { beta, x_min } => write!(f, "pareto beta={beta} x_min={x_min}"),
            GeneratorKind::Ar1 { phi } => write!(f, "ar1 phi={phi}"),
            GeneratorKind::White => write!(f, "white"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub length: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, length: usize, seed: u64) -> Self {
        GeneratorSpec { kind, length, seed }
    }

    /// Cascade spec whose length is implied by the number of levels.
    pub fn cascade(p: f64, levels: u32, seed: u64) -> Self {
        GeneratorSpec::new(GeneratorKind::BinomialCascade { p, levels }, 1usize << levels, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            invalid!("length must be positive");
        }
        match self.kind {
            GeneratorKind::Fgn { hurst } => {
                if !(hurst > 0.0 && hurst < 1.0) {
                    invalid!("Hurst exponent must lie in (0, 1), got {hurst}");
                }
            }
            GeneratorKind::BinomialCascade { p, levels } => {
                if !(p > 0.0 && p < 1.0) {
                    invalid!("cascade weight p must lie in (0, 1), got {p}");
                }
                if levels == 0 || levels > 40 {
                    invalid!("cascade levels must lie in 1..=40, got {levels}");
                }
                if self.length != 1usize << levels {
                    invalid!("cascade length must be 2^{levels} = {}, got {}", 1usize << levels, self.length);
                }
            }
            GeneratorKind::WeibullRenewal { alpha, x0 } => {
                if !(alpha > 0.0 && alpha.is_finite() && x0 > 0.0 && x0.is_finite()) {
                    invalid!("Weibull needs α > 0 and x0 > 0, got α={alpha}, x0={x0}");
                }
            }
            GeneratorKind::Pareto { beta, x_min } => {
                if !(beta > 0.0 && beta.is_finite() && x_min > 0.0 && x_min.is_finite()) {
                    invalid!("Pareto needs β > 0 and x_min > 0, got β={beta}, x_min={x_min}");
                }
            }
            GeneratorKind::Ar1 { phi } => {
                if !(phi.abs() < 1.0) {
                    invalid!("AR(1) needs |φ| < 1, got {phi}");
                }
            }
            GeneratorKind::White => {}
        }
        Ok(())
    }
}

/// Base generator for `seed`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(k);
    rng
}

/// Draws the series described by `spec`.
pub fn generate<T: Scalar>(spec: &GeneratorSpec) -> Result<Vec<T>> {
    spec.validate()?;
    let n = spec.length;
    let mut rng = seeded_rng(spec.seed);
    let values: Vec<f64> = match spec.kind {
        GeneratorKind::Fgn { hurst } => fgn(n, hurst, &mut rng)?,
        GeneratorKind::BinomialCascade { p, levels } => cascade(p, levels, &mut stream(spec.seed, CASCADE_STREAM)),
        GeneratorKind::WeibullRenewal { alpha, x0 } => {
            (0..n).map(|_| x0 * (-(1.0 - rng.random::<f64>()).ln()).powf(alpha.recip())).collect()
        }
        GeneratorKind::Pareto { beta, x_min } => {
            (0..n).map(|_| x_min * (1.0 - rng.random::<f64>()).powf(-beta.recip())).collect()
        }
        GeneratorKind::Ar1 { phi } => {
            let mut x = rng.sample::<f64, _>(StandardNormal) / (1.0 - phi * phi).sqrt();
            let mut out = Vec::with_capacity(n);
            out.push(x);
            for _ in 1..n {
                x = phi * x + rng.sample::<f64, _>(StandardNormal);
                out.push(x);
            }
            out
        }
        GeneratorKind::White => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
    };
    Ok(values.into_iter().map(T::of).collect())
}

/// Autocovariance of unit-variance fGn at lag k.
fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Exact fGn by circulant embedding of the autocovariance in a `2n` circulant
/// matrix, whose eigenvalues are non-negative for every H in (0, 1).
fn fgn(n: usize, hurst: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(vec![rng.sample(StandardNormal)]);
    }
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> =
        (0..m).map(|j| Complex::new(fgn_autocovariance(if j <= n { j } else { m - j }, hurst), 0.0)).collect();
    let mut planner = FftPlannerScalar::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let largest = row.iter().map(|c| c.re).fold(0.0, f64::max);
    let mut lambda = Vec::with_capacity(m);
    for c in &row {
        if c.re < -1e-9 * largest {
            return Err(Error::Degenerate(format!("circulant embedding has negative eigenvalue {}", c.re)));
        }
        lambda.push(c.re.max(0.0));
    }

    let mf = m as f64;
    let mut w = vec![Complex::new(0.0, 0.0); m];
    w[0] = Complex::new((lambda[0] / mf).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    for k in 1..n {
        let scale = (lambda[k] / (2.0 * mf)).sqrt();
        let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        w[k] = Complex::new(scale * a, scale * b);
        w[m - k] = w[k].conj();
    }
    w[n] = Complex::new((lambda[n] / mf).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    fft.process(&mut w);
    Ok(w[..n].iter().map(|c| c.re).collect())
}

fn cascade(p: f64, levels: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut cells = vec![1.0f64];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for &c in &cells {
            let (left, right) = if rng.random::<bool>() { (p, 1.0 - p) } else { (1.0 - p, p) };
            next.push(c * left);
            next.push(c * right);
        }
        cells = next;
    }
    let total = (1u64 << levels) as f64;
    cells.iter().map(|c| c * total).collect()
}

/// Random permutation of `values`; keeps the marginal distribution and
/// destroys temporal correlations.
pub fn shuffle_surrogate<T: Clone>(values: &[T], seed: u64) -> Vec<T> {
    let mut out = values.to_vec();
    out.shuffle(&mut stream(seed, SHUFFLE_STREAM));
    out
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        invalid!("cascade weight p must lie in (0, 1), got {p}");
    }
    Ok(())
}

/// Mass exponent `τ(q) = −log₂(p^q + (1−p)^q)` of the binomial cascade.
pub fn cascade_tau(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    Ok(-(p.powf(q) + (1.0 - p).powf(q)).ln() / LN_2)
}

/// Generalized Hurst exponent `h(q) = (1 + τ(q)) / q` of the binomial
/// cascade. At q = 0 it takes its limit `τ'(0) = −½ [log₂ p + log₂(1−p)]`.
pub fn cascade_analytic_hq(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    if q == 0.0 {
        return Ok(-0.5 * (p.ln() + (1.0 - p).ln()) / LN_2);
    }
    Ok((1.0 + cascade_tau(p, q)?) / q)
}

/// Singularity strength `α(q) = τ'(q)` of the binomial cascade.
pub fn cascade_analytic_alpha(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    let (a, b) = (p.powf(q), (1.0 - p).powf(q));
    Ok(-(a * p.ln() + b * (1.0 - p).ln()) / ((a + b) * LN_2))
}
