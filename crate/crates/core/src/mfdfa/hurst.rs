use std::io::Write;

use serde::Serialize;

use super::FluctuationSurface;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Generalized Hurst exponents: slopes of `ln F_q(s)` against `ln s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedHurst<T> {
    pub q_grid: Vec<T>,
    pub h: Vec<T>,
    /// Coefficient of determination of each fit.
    pub fit_r2: Vec<T>,
    /// Scales actually used, inclusive bounds.
    pub fit_range: (usize, usize),
    pub fit_points: usize,
}

impl<T: Scalar> GeneralizedHurst<T> {
    pub fn at(&self, q: T) -> Option<T> {
        self.q_grid.iter().position(|&v| (v - q).abs() <= T::of(1e-9)).map(|i| self.h[i])
    }

    /// `max h − min h` over the grid.
    pub fn spread(&self) -> T {
        let (lo, hi) = self.h.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// Largest increase of `h` between consecutive q values (zero when `h`
    /// is non-increasing in q).
    pub fn monotonicity_violation(&self) -> T {
        self.h.windows(2).map(|w| (w[1] - w[0]).max(T::zero())).fold(T::zero(), T::max)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# fit_range={}:{} points={}", self.fit_range.0, self.fit_range.1, self.fit_points)?;
        writeln!(out, "# q,h")?;
        for (q, h) in self.q_grid.iter().zip(&self.h) {
            writeln!(out, "{q},{h}")?;
        }
        Ok(())
    }
}

/// Slope, intercept and R² of an ordinary least-squares line.
pub(crate) fn ols<T: Scalar>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let my = y.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxx = sxx + (a - mx) * (a - mx);
        sxy = sxy + (a - mx) * (b - my);
        syy = syy + (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy.is_zero() { T::one() } else { (sxy * sxy) / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Fits `F_q(s) ∼ s^{h(q)}` over the scales inside `fit_range` (inclusive).
pub fn fit_hurst<T: Scalar>(surface: &FluctuationSurface<T>, fit_range: (usize, usize)) -> Result<GeneralizedHurst<T>> {
    let (lo, hi) = fit_range;
    let idx: Vec<usize> =
        surface.scales.iter().enumerate().filter(|(_, &s)| s >= lo && s <= hi).map(|(i, _)| i).collect();
    if idx.len() < 4 {
        invalid!("fit range {lo}:{hi} contains {} scales, need at least 4", idx.len());
    }
    let ln_s: Vec<T> = idx.iter().map(|&i| T::of_usize(surface.scales[i]).ln()).collect();
    let mut h = Vec::with_capacity(surface.q_grid.len());
    let mut fit_r2 = Vec::with_capacity(surface.q_grid.len());
    for (qi, q) in surface.q_grid.iter().enumerate() {
        let ln_f: Vec<T> = idx
            .iter()
            .map(|&i| {
                let f = surface.get(qi, i);
                if f > T::zero() && f.is_finite() {
                    Ok(f.ln())
                } else {
                    Err(Error::Degenerate(format!(
                        "F is not positive at q={q}, s={} inside the fit range",
                        surface.scales[i]
                    )))
                }
            })
            .collect::<Result<_>>()?;
        let (slope, _, r2) = ols(&ln_s, &ln_f);
        h.push(slope);
        fit_r2.push(r2);
    }
    Ok(GeneralizedHurst {
        q_grid: surface.q_grid.clone(),
        h,
        fit_r2,
        fit_range: (surface.scales[idx[0]], surface.scales[*idx.last().unwrap()]),
        fit_points: idx.len(),
    })
}
