use std::io::Write;

use serde::Serialize;

use super::GeneralizedHurst;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Singularity spectrum `f(α)` obtained from `h(q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularitySpectrum<T> {
    pub q_grid: Vec<T>,
    pub alpha: Vec<T>,
    pub f_alpha: Vec<T>,
    /// `α_max − α_min`.
    pub width: T,
    /// See [`spectrum_asymmetry`]; `None` if it is undefined for this grid.
    pub asymmetry: Option<T>,
}

impl<T: Scalar> SingularitySpectrum<T> {
    pub fn alpha_min(&self) -> T {
        self.alpha.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn alpha_max(&self) -> T {
        self.alpha.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `α` at q = 0, interpolated linearly when 0 is not on the grid.
    pub fn alpha_at_zero(&self) -> Option<T> {
        let q = &self.q_grid;
        if let Some(i) = q.iter().position(|v| v.is_zero()) {
            return Some(self.alpha[i]);
        }
        let i = q.windows(2).position(|w| w[0] < T::zero() && w[1] > T::zero())?;
        let t = -q[i] / (q[i + 1] - q[i]);
        Some(self.alpha[i] + t * (self.alpha[i + 1] - self.alpha[i]))
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        match self.asymmetry {
            Some(a) => writeln!(out, "# width={} asymmetry={a}", self.width)?,
            None => writeln!(out, "# width={}", self.width)?,
        }
        writeln!(out, "# alpha,f_alpha")?;
        for (a, f) in self.alpha.iter().zip(&self.f_alpha) {
            writeln!(out, "{a},{f}")?;
        }
        Ok(())
    }
}

/// `h'(q)` by central differences, one-sided at the grid ends.
fn derivative<T: Scalar>(q: &[T], h: &[T]) -> Vec<T> {
    let n = q.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (h[b] - h[a]) / (q[b] - q[a])
        })
        .collect()
}

/// `α = h + q h'` and `f(α) = q (α − h) + 1` on the q grid.
pub fn singularity_spectrum<T: Scalar>(hurst: &GeneralizedHurst<T>) -> Result<SingularitySpectrum<T>> {
    let q = &hurst.q_grid;
    if q.len() < 3 {
        invalid!("singularity spectrum needs at least 3 q values, got {}", q.len());
    }
    if q.windows(2).any(|w| w[1] <= w[0]) {
        invalid!("q grid must be strictly increasing");
    }
    let dh = derivative(q, &hurst.h);
    if let Some(i) = dh.iter().position(|d| !d.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite h'(q) at q={}", q[i])));
    }
    let alpha: Vec<T> = q.iter().zip(&hurst.h).zip(&dh).map(|((&q, &h), &d)| h + q * d).collect();
    let f_alpha = q.iter().zip(&hurst.h).zip(&alpha).map(|((&q, &h), &a)| q * (a - h) + T::one()).collect();
    let mut spec = SingularitySpectrum { q_grid: q.clone(), alpha, f_alpha, width: T::zero(), asymmetry: None };
    spec.width = spec.alpha_max() - spec.alpha_min();
    spec.asymmetry = spectrum_asymmetry(&spec).ok();
    Ok(spec)
}

/// `A = (Δα_L − Δα_R) / (Δα_L + Δα_R)` with `Δα_L = α(0) − α_min` and
/// `Δα_R = α_max − α(0)`. Negative values mean a longer right branch.
pub fn spectrum_asymmetry<T: Scalar>(spec: &SingularitySpectrum<T>) -> Result<T> {
    let has_neg = spec.q_grid.iter().any(|&q| q < T::zero());
    let has_pos = spec.q_grid.iter().any(|&q| q > T::zero());
    if !(has_neg && has_pos) {
        invalid!("asymmetry needs both q < 0 and q > 0 branches");
    }
    let a0 = spec.alpha_at_zero().ok_or_else(|| Error::InvalidArgument("cannot locate α(0)".into()))?;
    let left = a0 - spec.alpha_min();
    let right = spec.alpha_max() - a0;
    let total = left + right;
    if !(total > T::zero()) {
        return Err(Error::Degenerate("spectrum has zero width".into()));
    }
    Ok((left - right) / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hurst(q: Vec<f64>, h: Vec<f64>) -> GeneralizedHurst<f64> {
        let n = q.len();
        GeneralizedHurst { q_grid: q, h, fit_r2: vec![1.0; n], fit_range: (10, 1000), fit_points: 10 }
    }

    fn q_grid() -> Vec<f64> {
        (0..=32).map(|i| -4.0 + 0.25 * i as f64).collect()
    }

    #[test]
    fn monofractal_collapses_to_a_point() {
        let q = q_grid();
        let s = singularity_spectrum(&hurst(q.clone(), vec![0.62; q.len()])).unwrap();
        assert!(s.alpha.iter().all(|&a| (a - 0.62).abs() < 1e-15));
        assert!(s.f_alpha.iter().all(|&f| (f - 1.0).abs() < 1e-15));
        assert_eq!(s.width, 0.0);
        assert!(s.asymmetry.is_none());
        assert!(spectrum_asymmetry(&s).is_err());
    }

    #[test]
    fn linear_h_gives_exact_parabola() {
        let (a, b) = (0.8, 0.05);
        let q = q_grid();
        let h: Vec<f64> = q.iter().map(|&q| a - b * q).collect();
        let s = singularity_spectrum(&hurst(q.clone(), h)).unwrap();
        for ((&q, &al), &f) in q.iter().zip(&s.alpha).zip(&s.f_alpha) {
            assert!((al - (a - 2.0 * b * q)).abs() < 1e-12);
            assert!((f - (1.0 - (al - a).powi(2) / (4.0 * b))).abs() < 1e-12);
        }
        assert!(s.asymmetry.unwrap().abs() < 1e-12);
        assert_eq!(s.f_alpha[16], 1.0);
    }

    #[test]
    fn asymmetry_arithmetic() {
        let s = SingularitySpectrum {
            q_grid: vec![-1.0f64, 0.0, 1.0],
            alpha: vec![0.9, 0.5, 0.4],
            f_alpha: vec![0.5, 1.0, 0.5],
            width: 0.5,
            asymmetry: None,
        };
        assert!((spectrum_asymmetry(&s).unwrap() + 0.6).abs() < 1e-12);

        let interp = SingularitySpectrum { q_grid: vec![-1.0, 1.0, 2.0], alpha: vec![0.8, 0.6, 0.5], ..s.clone() };
        assert!((interp.alpha_at_zero().unwrap() - 0.7).abs() < 1e-12);

        let one_sided = SingularitySpectrum { q_grid: vec![1.0, 2.0, 3.0], ..s };
        assert!(spectrum_asymmetry(&one_sided).is_err());
    }

    #[test]
    fn rejects_short_or_bad_grids() {
        assert!(singularity_spectrum(&hurst(vec![1.0, 2.0], vec![0.5, 0.5])).is_err());
        assert!(singularity_spectrum(&hurst(vec![1.0, 1.0, 2.0], vec![0.5, 0.5, 0.5])).is_err());
        assert!(singularity_spectrum(&hurst(vec![1.0, 2.0, 3.0], vec![0.5, f64::NAN, 0.5])).is_err());
    }
}
