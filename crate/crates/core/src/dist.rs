//! Empirical complementary CDFs and the heavy-tail models compared against
//! them: exponential, stretched exponential / Weibull and power-law tails.
//!
//! Power-law tails are parametrized by the exponent of the complementary CDF,
//! `P(X > x) = (x / x_min)^{-β}`, so β = 3 is the inverse cubic law.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// Shape parameters of the stretched-exponential guide curves.
pub const GUIDE_ALPHAS: [f64; 5] = [0.3, 0.4, 0.5, 0.6, 1.0];
/// Tail exponent of the power-law guide curve.
pub const GUIDE_BETA: f64 = 3.0;
/// Fewest samples a fit accepts.
pub const MIN_FIT_SAMPLES: usize = 100;

const MAX_XMIN_CANDIDATES: usize = 256;
const MLE_MAX_ITERATIONS: usize = 200;

/// Survival function `P(X > x)` at the distinct sample values.
///
/// The last point (the sample maximum) is reported with `P(X ≥ x)` so that it
/// stays visible on logarithmic axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcdfCurve<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
    /// Sample size the probabilities refer to.
    pub n: usize,
}

impl<T: Scalar> EcdfCurve<T> {
    /// Keeps at most `max_points` points, spaced evenly in `ln p` so the tail
    /// keeps its resolution. First and last points are always kept.
    pub fn log_downsample(&self, max_points: usize) -> EcdfCurve<T> {
        let len = self.x.len();
        if max_points < 2 || len <= max_points {
            return self.clone();
        }
        let (hi, lo) = (self.p[0].ln(), self.p[len - 1].ln());
        let mut keep = Vec::with_capacity(max_points);
        keep.push(0);
        let mut idx = 0;
        for j in 1..max_points - 1 {
            let target = hi + (lo - hi) * T::of_usize(j) / T::of_usize(max_points - 1);
            while idx < len - 1 && self.p[idx].ln() > target {
                idx += 1;
            }
            if *keep.last().unwrap() != idx {
                keep.push(idx);
            }
        }
        if *keep.last().unwrap() != len - 1 {
            keep.push(len - 1);
        }
        EcdfCurve {
            x: keep.iter().map(|&i| self.x[i]).collect(),
            p: keep.iter().map(|&i| self.p[i]).collect(),
            n: self.n,
        }
    }

    /// Point at the empirical `quantile`: the first x whose exceedance
    /// probability is at most `1 − quantile`.
    pub fn anchor(&self, quantile: T) -> Result<(T, T)> {
        if !(quantile > T::zero() && quantile < T::one()) {
            invalid!("anchor quantile must lie in (0, 1), got {quantile}");
        }
        let level = T::one() - quantile;
        let i = self.p.iter().position(|&p| p <= level).unwrap_or(self.p.len() - 1);
        let p = self.p[i];
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Degenerate(format!("empirical CCDF at the anchor is {p}")));
        }
        Ok((self.x[i], p))
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# n={}", self.n)?;
        writeln!(out, "# x,p")?;
        for (x, p) in self.x.iter().zip(&self.p) {
            writeln!(out, "{x},{p}")?;
        }
        Ok(())
    }
}

pub fn ecdf_complementary<T: Scalar>(values: &[T]) -> Result<EcdfCurve<T>> {
    if values.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    if values.iter().any(|v| v.is_nan()) {
        invalid!("NaN in sample");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let nn = T::of_usize(n);
    let mut x = Vec::new();
    let mut p = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == v {
            j += 1;
        }
        x.push(v);
        if j == n {
            p.push(T::of_usize(n - i) / nn);
        } else {
            p.push(T::of_usize(n - j) / nn);
        }
        i = j;
    }
    Ok(EcdfCurve { x, p, n })
}

fn check_shape_scale<T: Scalar>(alpha: T, x0: T) -> Result<()> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        invalid!("shape α must be positive, got {alpha}");
    }
    if !(x0 > T::zero() && x0.is_finite()) {
        invalid!("scale x0 must be positive, got {x0}");
    }
    Ok(())
}

/// Stretched-exponential survival function `exp[−(x/x0)^α]`, `0 < α ≤ 1`.
pub fn se_ccdf<T: Scalar>(x: T, alpha: T, x0: T) -> Result<T> {
    check_shape_scale(alpha, x0)?;
    if alpha > T::one() {
        invalid!("stretched exponential needs α ≤ 1, got {alpha}");
    }
    if !(x >= T::zero()) {
        invalid!("x must be non-negative, got {x}");
    }
    Ok((-(x / x0).powf(alpha)).exp())
}

/// Weibull density `α x^{α−1} / x0^α · exp[−(x/x0)^α]` for `x > 0`.
pub fn weibull_pdf<T: Scalar>(x: T, alpha: T, x0: T) -> Result<T> {
    check_shape_scale(alpha, x0)?;
    if !(x > T::zero()) {
        invalid!("x must be positive, got {x}");
    }
    let z = x / x0;
    Ok(alpha / x0 * z.powf(alpha - T::one()) * (-z.powf(alpha)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistKind {
    Exponential,
    StretchedExponential,
    Weibull,
    PowerLaw,
}

/// A parametric survival model. Which fields are set depends on `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistModel<T> {
    pub kind: DistKind,
    /// Shape α (exponential: 1).
    pub alpha: Option<T>,
    /// Scale x0; `None` asks overlays to calibrate it.
    pub x0: Option<T>,
    /// Tail exponent of the survival function.
    pub beta: Option<T>,
    /// Lower bound of the power-law tail; `None` asks overlays to calibrate it.
    pub x_min: Option<T>,
}

impl<T: Scalar> DistModel<T> {
    pub fn exponential(x0: Option<T>) -> Self {
        DistModel { kind: DistKind::Exponential, alpha: Some(T::one()), x0, beta: None, x_min: None }
    }

    pub fn stretched_exponential(alpha: T, x0: Option<T>) -> Self {
        DistModel { kind: DistKind::StretchedExponential, alpha: Some(alpha), x0, beta: None, x_min: None }
    }

    pub fn power_law(beta: T, x_min: Option<T>) -> Self {
        DistModel { kind: DistKind::PowerLaw, alpha: None, x0: None, beta: Some(beta), x_min }
    }

    /// Fixed guide curves: SE for every α in [`GUIDE_ALPHAS`] (α = 1 as the
    /// exponential) and the β = 3 power law, all with scales left to
    /// calibration.
    pub fn guide_set() -> Vec<Self> {
        GUIDE_ALPHAS
            .iter()
            .map(|&a| if a == 1.0 { Self::exponential(None) } else { Self::stretched_exponential(T::of(a), None) })
            .chain(std::iter::once(Self::power_law(T::of(GUIDE_BETA), None)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DistKind::Exponential | DistKind::StretchedExponential | DistKind::Weibull => {
                let alpha = self.alpha.ok_or_else(|| Error::InvalidArgument("model lacks α".into()))?;
                check_shape_scale(alpha, self.x0.unwrap_or(T::one()))?;
                if self.kind == DistKind::StretchedExponential && alpha > T::one() {
                    invalid!("stretched exponential needs α ≤ 1, got {alpha}");
                }
                if self.kind == DistKind::Exponential && alpha != T::one() {
                    invalid!("exponential model needs α = 1");
                }
            }
            DistKind::PowerLaw => {
                let beta = self.beta.ok_or_else(|| Error::InvalidArgument("model lacks β".into()))?;
                if !(beta > T::zero() && beta.is_finite()) {
                    invalid!("tail exponent β must be positive, got {beta}");
                }
                if let Some(xm) = self.x_min {
                    if !(xm > T::zero()) {
                        invalid!("x_min must be positive, got {xm}");
                    }
                }
            }
        }
        Ok(())
    }

    /// Survival function. Requires the scale parameter to be set.
    pub fn ccdf(&self, x: T) -> Result<T> {
        match self.kind {
            DistKind::PowerLaw => {
                let (beta, xm) = (self.beta.unwrap(), self.x_min.ok_or_else(|| missing("x_min"))?);
                Ok((x / xm).powf(-beta))
            }
            _ => {
                let (alpha, x0) = (self.alpha.unwrap(), self.x0.ok_or_else(|| missing("x0"))?);
                Ok((-(x.max(T::zero()) / x0).powf(alpha)).exp())
            }
        }
    }

    /// Sets the scale so that `ccdf(x_a) = p_a`.
    pub fn calibrated(mut self, x_a: T, p_a: T) -> Result<Self> {
        if !(p_a > T::zero() && p_a < T::one() && x_a > T::zero()) {
            return Err(Error::Degenerate(format!("cannot anchor at x={x_a}, p={p_a}")));
        }
        match self.kind {
            DistKind::PowerLaw => self.x_min = Some(x_a * p_a.powf(self.beta.unwrap().recip())),
            _ => self.x0 = Some(x_a / (-p_a.ln()).powf(self.alpha.unwrap().recip())),
        }
        Ok(self)
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidArgument(format!("model has no {what}; supply it or an anchor"))
}

/// Model survival function on `x_grid`. A model without a scale parameter is
/// first calibrated to `ecdf` at `anchor_quantile` (the median by default).
pub fn model_overlay<T: Scalar>(
    model: &DistModel<T>,
    x_grid: &[T],
    ecdf: Option<&EcdfCurve<T>>,
    anchor_quantile: Option<T>,
) -> Result<Vec<T>> {
    if x_grid.is_empty() {
        invalid!("empty overlay grid");
    }
    model.validate()?;
    let needs_scale = match model.kind {
        DistKind::PowerLaw => model.x_min.is_none(),
        _ => model.x0.is_none(),
    };
    let model = if needs_scale {
        let ecdf = ecdf.ok_or_else(|| missing(if model.kind == DistKind::PowerLaw { "x_min" } else { "x0" }))?;
        let (x_a, p_a) = ecdf.anchor(anchor_quantile.unwrap_or(T::of(0.5)))?;
        model.calibrated(x_a, p_a)?
    } else {
        *model
    };
    x_grid.iter().map(|&x| model.ccdf(x)).collect()
}

/// Result of the Weibull / stretched-exponential maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeFit<T> {
    pub model: DistModel<T>,
    pub log_likelihood: T,
    pub converged: bool,
    pub iterations: usize,
    /// Positive samples entering the likelihood.
    pub n_used: usize,
    /// Fraction of the input excluded because it was exactly zero.
    pub excluded_fraction: T,
}

/// Weibull maximum likelihood for `(α, x0)`.
///
/// Zeros are excluded (the density is singular there for α < 1) and their
/// share reported. α solves the profile-likelihood equation
/// `Σ xᵢ^α ln xᵢ / Σ xᵢ^α − 1/α − ⟨ln x⟩ = 0` by safeguarded Newton
/// iteration; x0 follows in closed form. The model kind is
/// `StretchedExponential` when α ≤ 1 and `Weibull` otherwise.
pub fn fit_se_mle<T: Scalar>(values: &[T]) -> Result<SeFit<T>> {
    if let Some(v) = values.iter().find(|v| !(**v >= T::zero() && v.is_finite())) {
        invalid!("samples must be non-negative and finite, found {v}");
    }
    let logs: Vec<T> = values.iter().filter(|v| **v > T::zero()).map(|v| v.ln()).collect();
    let n = logs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::TooShort { needed: MIN_FIT_SAMPLES, got: n });
    }
    let nn = T::of_usize(n);
    let excluded_fraction = T::of_usize(values.len() - n) / T::of_usize(values.len());
    let mean_log = ordered_sum(logs.iter().copied()) / nn;
    let max_log = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let spread = ordered_sum(logs.iter().map(|&l| (l - mean_log) * (l - mean_log))) / nn;
    if !(spread > T::of(1e-24)) {
        return Err(Error::Degenerate("all positive samples are identical".into()));
    }

    // g(α) and g'(α); weights are shifted by max ln x to avoid overflow
    let eval = |alpha: T| -> (T, T) {
        let (mut s0, mut s1, mut s2) = (T::zero(), T::zero(), T::zero());
        for &l in &logs {
            let w = (alpha * (l - max_log)).exp();
            s0 = s0 + w;
            s1 = s1 + w * l;
            s2 = s2 + w * l * l;
        }
        let m1 = s1 / s0;
        let var = (s2 / s0 - m1 * m1).max(T::zero());
        (m1 - alpha.recip() - mean_log, var + (alpha * alpha).recip())
    };

    let (mut lo, mut hi) = (T::of(0.5), T::of(2.0));
    let mut guard = 0;
    while eval(lo).0 > T::zero() {
        lo = lo / T::of(4.0);
        guard += 1;
        if guard > 60 {
            return Err(Error::NonConvergence { iterations: guard, context: "bracketing α from below".into() });
        }
    }
    while eval(hi).0 < T::zero() {
        hi = hi * T::of(4.0);
        guard += 1;
        if guard > 60 {
            return Err(Error::NonConvergence { iterations: guard, context: "bracketing α from above".into() });
        }
    }

    let tol = T::of(1e-12).max(T::epsilon() * T::of(16.0));
    let mut alpha = (lo + hi) / T::of(2.0);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MLE_MAX_ITERATIONS {
        iterations += 1;
        let (g, dg) = eval(alpha);
        if g < T::zero() {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let newton = alpha - g / dg;
        let next = if newton > lo && newton < hi { newton } else { (lo + hi) / T::of(2.0) };
        if (next - alpha).abs() <= tol * alpha || hi - lo <= tol * alpha {
            alpha = next;
            converged = true;
            break;
        }
        alpha = next;
    }
    if !converged {
        return Err(Error::NonConvergence { iterations, context: "Weibull shape equation".into() });
    }

    let mean_pow = ordered_sum(logs.iter().map(|&l| (alpha * (l - max_log)).exp())) / nn;
    let ln_x0 = max_log + mean_pow.ln() / alpha;
    let x0 = ln_x0.exp();
    let sum_log = mean_log * nn;
    let sum_pow = ordered_sum(logs.iter().map(|&l| (alpha * (l - ln_x0)).exp()));
    let log_likelihood = nn * alpha.ln() - nn * alpha * ln_x0 + (alpha - T::one()) * sum_log - sum_pow;

    let kind = if alpha <= T::one() { DistKind::StretchedExponential } else { DistKind::Weibull };
    Ok(SeFit {
        model: DistModel { kind, alpha: Some(alpha), x0: Some(x0), beta: None, x_min: None },
        log_likelihood,
        converged,
        iterations,
        n_used: n,
        excluded_fraction,
    })
}

/// Result of a power-law tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit<T> {
    pub model: DistModel<T>,
    /// Kolmogorov–Smirnov distance between the tail sample and the model.
    pub ks_distance: T,
    pub tail_count: usize,
    pub n_total: usize,
    /// Whether `x_min` was chosen by the KS search.
    pub x_min_searched: bool,
}

/// β̂ and KS distance for the tail `sorted[start..]`, all strictly above `x_min`.
fn tail_fit<T: Scalar>(tail: &[T], x_min: T, sum_log: T) -> Option<(T, T)> {
    let n = tail.len();
    let nn = T::of_usize(n);
    let denom = sum_log - nn * x_min.ln();
    if !(denom > T::zero()) {
        return None;
    }
    let beta = nn / denom;
    let mut d = T::zero();
    for (i, &x) in tail.iter().enumerate() {
        let cdf = T::one() - (x / x_min).powf(-beta);
        let above = T::of_usize(i + 1) / nn - cdf;
        let below = cdf - T::of_usize(i) / nn;
        d = d.max(above).max(below);
    }
    Some((beta, d))
}

/// Continuous maximum-likelihood tail exponent `β̂ = n / Σ ln(xᵢ / x_min)`
/// over the samples strictly above `x_min`.
///
/// Without `x_min`, candidates are taken from the distinct sample values that
/// leave at least [`MIN_FIT_SAMPLES`] above them, and the one minimizing the
/// KS distance wins (ties go to the smaller x_min).
pub fn fit_powerlaw_tail<T: Scalar>(values: &[T], x_min: Option<T>) -> Result<PowerLawFit<T>> {
    if values.iter().any(|v| !v.is_finite()) {
        invalid!("non-finite sample");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n_total = sorted.len();

    let fit_at = |xm: T| -> Result<(T, T, usize)> {
        let start = sorted.partition_point(|&v| v <= xm);
        let tail = &sorted[start..];
        if tail.len() < MIN_FIT_SAMPLES {
            return Err(Error::TooShort { needed: MIN_FIT_SAMPLES, got: tail.len() });
        }
        if tail[0] == tail[tail.len() - 1] {
            return Err(Error::Degenerate("all tail values are equal".into()));
        }
        let sum_log = ordered_sum(tail.iter().map(|v| v.ln()));
        let (beta, d) = tail_fit(tail, xm, sum_log).ok_or_else(|| Error::Degenerate("empty log-excess".into()))?;
        Ok((beta, d, tail.len()))
    };

    let finish = |xm: T, (beta, d, count): (T, T, usize), searched: bool| PowerLawFit {
        model: DistModel::power_law(beta, Some(xm)),
        ks_distance: d,
        tail_count: count,
        n_total,
        x_min_searched: searched,
    };

    if let Some(xm) = x_min {
        if !(xm > T::zero()) {
            invalid!("x_min must be positive, got {xm}");
        }
        return Ok(finish(xm, fit_at(xm)?, false));
    }

    // distinct positive candidates leaving enough tail samples
    let mut candidates: Vec<T> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if v > T::zero() && (i + 1 == n_total || sorted[i + 1] != v) && n_total - (i + 1) >= MIN_FIT_SAMPLES {
            candidates.push(v);
        }
    }
    if candidates.is_empty() {
        let tail = sorted.iter().filter(|v| **v > T::zero()).count();
        return Err(Error::TooShort { needed: MIN_FIT_SAMPLES + 1, got: tail });
    }
    if candidates.len() > MAX_XMIN_CANDIDATES {
        let len = candidates.len();
        candidates = (0..MAX_XMIN_CANDIDATES).map(|k| candidates[k * (len - 1) / (MAX_XMIN_CANDIDATES - 1)]).collect();
        candidates.dedup();
    }
    let fits: Vec<Option<(T, (T, T, usize))>> =
        candidates.par_iter().map(|&xm| fit_at(xm).ok().map(|f| (xm, f))).collect();
    let best = fits
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(T, (T, T, usize))>, cand| match best {
            Some(b) if b.1 .1 <= cand.1 .1 => Some(b),
            _ => Some(cand),
        })
        .ok_or_else(|| Error::Degenerate("no admissible x_min candidate".into()))?;
    Ok(finish(best.0, best.1, true))
}
