//! Per-segment profile construction and least-squares polynomial detrending.
//!
//! For a scale `s` and degree `m` the fit is a projection onto an orthonormal
//! polynomial basis of the segment positions, built once per scale. Residuals
//! are recomputed on the fly in a second pass over the segment, so detrending
//! needs no scratch memory proportional to `s`.
//!
//! For m ≥ 1 profiles are accumulated from mean-centred values. Subtracting a
//! constant adds a linear term to the profile, which the fit removes, so the
//! residuals are unchanged in exact arithmetic while the profile no longer
//! grows with the series offset.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

pub const MAX_DEGREE: usize = 8;

pub(crate) struct DetrendBasis<T> {
    scale: usize,
    degree: usize,
    /// `degree + 1` orthonormal rows, each of length `scale`.
    rows: Vec<Vec<T>>,
}

type Coefficients<T> = [T; MAX_DEGREE + 1];

impl<T: Scalar> DetrendBasis<T> {
    pub fn new(scale: usize, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            invalid!("detrending degree {degree} exceeds the supported maximum {MAX_DEGREE}");
        }
        if scale < degree + 2 {
            invalid!("scale {scale} too small for degree-{degree} detrending (need at least {})", degree + 2);
        }
        // Gram-Schmidt on monomials of positions mapped to [-1, 1], in f64,
        // with one re-orthogonalization sweep.
        let half = (scale - 1) as f64 / 2.0;
        let u: Vec<f64> = (0..scale).map(|i| (i as f64 - half) / half).collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut v: Vec<f64> = u.iter().map(|&x| x.powi(k as i32)).collect();
            for _ in 0..2 {
                for q in &rows {
                    let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            rows.push(v);
        }
        Ok(DetrendBasis { scale, degree, rows: rows.into_iter().map(|r| r.into_iter().map(T::of).collect()).collect() })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    #[inline]
    fn centre(&self, segment: &[T]) -> T {
        if self.degree == 0 {
            return T::zero();
        }
        segment.iter().fold(T::zero(), |acc, &x| acc + x) / T::of_usize(self.scale)
    }

    #[inline]
    fn coefficients(&self, segment: &[T], centre: T) -> Coefficients<T> {
        debug_assert_eq!(segment.len(), self.scale);
        let mut coef = [T::zero(); MAX_DEGREE + 1];
        let mut profile = T::zero();
        for (i, &x) in segment.iter().enumerate() {
            profile = profile + (x - centre);
            for k in 0..=self.degree {
                coef[k] = coef[k] + profile * self.rows[k][i];
            }
        }
        coef
    }

    /// Detrended profile values of one segment.
    #[inline]
    fn residuals<'a>(&'a self, segment: &'a [T]) -> impl Iterator<Item = T> + 'a {
        let centre = self.centre(segment);
        let coef = self.coefficients(segment, centre);
        let mut profile = T::zero();
        segment.iter().enumerate().map(move |(i, &x)| {
            profile = profile + (x - centre);
            let mut fit = T::zero();
            for k in 0..=self.degree {
                fit = fit + coef[k] * self.rows[k][i];
            }
            profile - fit
        })
    }

    /// Detrended variance `f²(s, ν)` of one segment.
    pub fn variance(&self, segment: &[T]) -> T {
        let total = self.residuals(segment).fold(T::zero(), |acc, r| acc + r * r);
        total / T::of_usize(self.scale)
    }

    /// Detrended covariance `f²_XY(s, ν)` of two aligned segments, each
    /// profile detrended independently.
    pub fn covariance(&self, a: &[T], b: &[T]) -> T {
        let total = self.residuals(a).zip(self.residuals(b)).fold(T::zero(), |acc, (ra, rb)| acc + ra * rb);
        total / T::of_usize(self.scale)
    }

    /// `(f²_XX, f²_YY, f²_XY)` in one pass. Each component is bitwise equal
    /// to the corresponding `variance` / `covariance` call.
    pub fn moments(&self, a: &[T], b: &[T]) -> (T, T, T) {
        let zero = T::zero();
        let (xx, yy, xy) = self
            .residuals(a)
            .zip(self.residuals(b))
            .fold((zero, zero, zero), |(xx, yy, xy), (ra, rb)| (xx + ra * ra, yy + rb * rb, xy + ra * rb));
        let s = T::of_usize(self.scale);
        (xx / s, yy / s, xy / s)
    }
}

/// Start offsets of the `2⌊N/s⌋` segments: `⌊N/s⌋` from the start of the
/// series followed by `⌊N/s⌋` from its end.
pub(crate) fn segment_starts(len: usize, scale: usize) -> impl Iterator<Item = usize> + Clone {
    let count = len / scale;
    (0..count).map(move |k| k * scale).chain((0..count).map(move |k| len - (k + 1) * scale))
}
