use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::detrend::{segment_starts, DetrendBasis};
use super::MfdfaConfig;
use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// Fluctuation functions `F_q(s)` over a (q, s) grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationSurface<T> {
    pub q_grid: Vec<T>,
    pub scales: Vec<usize>,
    /// Row-major by q: `f[qi * scales.len() + si]`.
    pub f: Vec<T>,
    /// `M_s = 2⌊N/s⌋` per scale.
    pub segment_counts: Vec<usize>,
    /// Segments excluded by the variance floor, per scale. The exclusion is
    /// applied identically for every q.
    pub skipped_segments: Vec<usize>,
}

impl<T: Scalar> FluctuationSurface<T> {
    #[inline]
    pub fn get(&self, qi: usize, si: usize) -> T {
        self.f[qi * self.scales.len() + si]
    }

    /// `F_q(s)` for one q across all scales.
    pub fn row(&self, qi: usize) -> &[T] {
        let n = self.scales.len();
        &self.f[qi * n..(qi + 1) * n]
    }

    pub fn q_index(&self, q: T) -> Option<usize> {
        self.q_grid.iter().position(|&v| (v - q).abs() <= T::of(1e-9))
    }

    /// One row per (q, s): `q,s,F,M_s,skipped`.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# q,s,F,M_s,skipped")?;
        for (qi, q) in self.q_grid.iter().enumerate() {
            for (si, s) in self.scales.iter().enumerate() {
                writeln!(
                    out,
                    "{q},{s},{},{},{}",
                    self.get(qi, si),
                    self.segment_counts[si],
                    self.skipped_segments[si]
                )?;
            }
        }
        Ok(())
    }
}

/// Order-q generalized mean of segment variances, `{⟨(f²)^{q/2}⟩}^{1/q}`,
/// with the logarithmic mean `exp(⟨ln f²⟩/2)` at q = 0.
pub(crate) fn generalized_mean<T: Scalar>(variances: &[T], q: T) -> T {
    let m = T::of_usize(variances.len());
    if q.is_zero() {
        let two = T::of(2.0);
        (ordered_sum(variances.iter().map(|v| v.ln())) / (two * m)).exp()
    } else {
        let half_q = q / T::of(2.0);
        (ordered_sum(variances.iter().map(|v| v.powf(half_q))) / m).powf(q.recip())
    }
}

/// Signed-modulus generalized mean used for detrended covariances:
/// `sign(S)|S|^{1/q}` with `S = ⟨sign(c)|c|^{q/2}⟩`. At q = 0 the magnitude
/// is the logarithmic mean of `|c|` and the sign that of `⟨c⟩`.
pub(crate) fn signed_generalized_mean<T: Scalar>(covariances: &[T], q: T) -> T {
    let m = T::of_usize(covariances.len());
    if q.is_zero() {
        let sign = ordered_sum(covariances.iter().copied()).signum();
        let two = T::of(2.0);
        sign * (ordered_sum(covariances.iter().map(|c| c.abs().ln())) / (two * m)).exp()
    } else {
        let half_q = q / T::of(2.0);
        let s = ordered_sum(covariances.iter().map(|c| c.signum() * c.abs().powf(half_q))) / m;
        if s.is_zero() {
            T::zero()
        } else {
            s.signum() * s.abs().powf(q.recip())
        }
    }
}

/// Per-scale detrended statistic over all segments, in segment order, with
/// sub-floor segments removed. Returns `(kept, total)`.
pub(crate) fn per_segment<T: Scalar, F>(len: usize, scale: usize, floor: T, stat: F) -> (Vec<T>, usize)
where
    F: Fn(usize) -> T + Sync + Send,
{
    let starts: Vec<usize> = segment_starts(len, scale).collect();
    let total = starts.len();
    let values: Vec<T> = starts.par_iter().map(|&start| stat(start)).collect();
    let kept = values.into_iter().filter(|v| v.abs() >= floor && v.is_finite()).collect();
    (kept, total)
}

/// Assembles a surface from per-scale segment statistics.
pub(crate) fn assemble_surface<T: Scalar, G>(
    len: usize,
    config: &MfdfaConfig<T>,
    segment_stat: G,
    mean: fn(&[T], T) -> T,
) -> Result<FluctuationSurface<T>>
where
    G: Fn(&DetrendBasis<T>, usize) -> T + Sync + Send,
{
    config.validate(len)?;
    let per_scale: Vec<Result<(Vec<T>, usize, usize)>> = config
        .scales
        .par_iter()
        .map(|&scale| {
            let basis = DetrendBasis::new(scale, config.degree)?;
            let (kept, total) = per_segment(len, scale, config.variance_floor, |start| segment_stat(&basis, start));
            if kept.is_empty() {
                let q = config.q_grid[0].to_f64_lossy();
                return Err(Error::AllSegmentsSkipped { q, scale });
            }
            let f: Vec<T> = config.q_grid.iter().map(|&q| mean(&kept, q)).collect();
            Ok((f, total, total - kept.len()))
        })
        .collect();

    let nq = config.q_grid.len();
    let ns = config.scales.len();
    let mut f = vec![T::zero(); nq * ns];
    let mut segment_counts = Vec::with_capacity(ns);
    let mut skipped_segments = Vec::with_capacity(ns);
    for (si, res) in per_scale.into_iter().enumerate() {
        let (column, total, skipped) = res?;
        for (qi, v) in column.into_iter().enumerate() {
            f[qi * ns + si] = v;
        }
        segment_counts.push(total);
        skipped_segments.push(skipped);
    }
    Ok(FluctuationSurface {
        q_grid: config.q_grid.clone(),
        scales: config.scales.clone(),
        f,
        segment_counts,
        skipped_segments,
    })
}

/// `F_q(s)` of a single series over the configured (q, s) grid.
///
/// Each of the `2⌊N/s⌋` segments is integrated into its own profile,
/// detrended by a degree-`m` least-squares polynomial, and reduced to its
/// detrended variance. Segments below the variance floor are skipped.
pub fn fluctuation_surface<T: Scalar>(values: &[T], config: &MfdfaConfig<T>) -> Result<FluctuationSurface<T>> {
    assemble_surface(
        values.len(),
        config,
        |basis, start| basis.variance(&values[start..start + basis.scale()]),
        generalized_mean,
    )
}
