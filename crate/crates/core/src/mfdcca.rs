//! Multifractal detrended cross-correlation analysis and the `ρ_q(s)`
//! coefficient.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::mfdfa::detrend::{segment_starts, DetrendBasis};
use crate::mfdfa::{
    generalized_mean, signed_generalized_mean, FluctuationSurface, MfdfaConfig, DEFAULT_VARIANCE_FLOOR,
};
use crate::scalar::{ordered_sum, Scalar};
use crate::series::window_bounds;

/// `ρ_q(s)` for one q over a scale grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoResult<T> {
    pub q: T,
    pub scales: Vec<usize>,
    pub rho: Vec<T>,
    /// Set for q ≤ 0, where ρ is not confined to [−1, 1].
    pub unbounded: bool,
}

impl<T: Scalar> RhoResult<T> {
    pub fn write_text<W: Write>(&self, mut out: W, labels: (&str, &str)) -> Result<()> {
        writeln!(
            out,
            "# pair={}~{} q={}{}",
            labels.0,
            labels.1,
            self.q,
            if self.unbounded { " unbounded" } else { "" }
        )?;
        writeln!(out, "# s,rho")?;
        for (s, r) in self.scales.iter().zip(&self.rho) {
            writeln!(out, "{s},{r}")?;
        }
        Ok(())
    }
}

/// `ρ_q(s)` at fixed (q, s) evaluated in moving windows; `None` marks a
/// window with fewer than `10·s` samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingRho<T> {
    pub q: T,
    pub scale: usize,
    pub window_length: f64,
    pub step: f64,
    pub window_end_times: Vec<f64>,
    pub rho: Vec<Option<T>>,
}

impl<T: Scalar> RollingRho<T> {
    pub fn write_text<W: Write>(&self, mut out: W, labels: (&str, &str)) -> Result<()> {
        writeln!(
            out,
            "# pair={}~{} q={} s={} window_s={} step_s={}",
            labels.0, labels.1, self.q, self.scale, self.window_length, self.step
        )?;
        writeln!(out, "# window_end_s,rho")?;
        for (t, r) in self.window_end_times.iter().zip(&self.rho) {
            match r {
                Some(r) => writeln!(out, "{t},{r}")?,
                None => writeln!(out, "{t},nan")?,
            }
        }
        Ok(())
    }
}

fn check_pair<T>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        invalid!("series lengths differ: {} vs {}", x.len(), y.len());
    }
    Ok(())
}

/// Cross fluctuation functions `F_q^XY(s)` from detrended covariances.
///
/// For `y == x` this is bitwise identical to
/// [`fluctuation_surface`](crate::mfdfa::fluctuation_surface).
pub fn cross_fluctuation<T: Scalar>(x: &[T], y: &[T], config: &MfdfaConfig<T>) -> Result<FluctuationSurface<T>> {
    check_pair(x, y)?;
    crate::mfdfa::surface::assemble_surface(
        x.len(),
        config,
        |basis, start| {
            let end = start + basis.scale();
            basis.covariance(&x[start..end], &y[start..end])
        },
        signed_generalized_mean,
    )
}

/// Mean of `sign(c)|c|^{q/2}` over segments: the q-th order fluctuation
/// function before its `1/q` root.
fn signed_moment<T: Scalar>(values: &[T], q: T) -> T {
    let half_q = q / T::of(2.0);
    ordered_sum(values.iter().map(|c| c.signum() * c.abs().powf(half_q))) / T::of_usize(values.len())
}

/// `ρ_q` from the detrended (co)variances of the kept segments.
///
/// For q ≠ 0 the coefficient is the ratio of q-th order moments,
/// `⟨sign(f²_XY)|f²_XY|^{q/2}⟩ / √(⟨(f²_XX)^{q/2}⟩⟨(f²_YY)^{q/2}⟩)`, which is
/// the usual DCCA coefficient at q = 2. Taking the `1/q` root of each factor
/// first would turn this into `sign(ρ)|ρ|^{1/q}`. At q = 0 the moments are
/// all 1, so the ratio of the logarithmic-mean fluctuation functions is used.
fn rho_from_segments<T: Scalar>(xx: &[T], yy: &[T], xy: &[T], q: T) -> Option<T> {
    let (num, a, b) = if q.is_zero() {
        (signed_generalized_mean(xy, q), generalized_mean(xx, q), generalized_mean(yy, q))
    } else {
        (signed_moment(xy, q), signed_moment(xx, q), signed_moment(yy, q))
    };
    let denom = (a * b).sqrt();
    (denom > T::zero() && denom.is_finite()).then(|| num / denom)
}

/// `ρ_q` for every q of the configuration at one scale, from one detrending
/// pass. Segments are skipped jointly when any of the three (co)variances is
/// below the floor.
fn rho_at_scale<T: Scalar>(x: &[T], y: &[T], scale: usize, config: &MfdfaConfig<T>) -> Result<Vec<Option<T>>> {
    let basis = DetrendBasis::new(scale, config.degree)?;
    let starts: Vec<usize> = segment_starts(x.len(), scale).collect();
    let moments: Vec<(T, T, T)> =
        starts.par_iter().map(|&s| basis.moments(&x[s..s + scale], &y[s..s + scale])).collect();
    let floor = config.variance_floor;
    let kept: Vec<(T, T, T)> =
        moments.into_iter().filter(|(xx, yy, xy)| *xx >= floor && *yy >= floor && xy.abs() >= floor).collect();
    if kept.is_empty() {
        return Err(Error::AllSegmentsSkipped { q: config.q_grid[0].to_f64_lossy(), scale });
    }
    let (xx, (yy, xy)): (Vec<T>, (Vec<T>, Vec<T>)) = kept.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
    Ok(config.q_grid.iter().map(|&q| rho_from_segments(&xx, &yy, &xy, q)).collect())
}

/// `ρ_q(s)` for every q of the configuration.
///
/// For q ≠ 0 this is the ratio of the q-th order moments of the detrended
/// covariances and variances (the fluctuation functions before their `1/q`
/// root), so q = 2 gives the DCCA coefficient. At q = 0 it is the ratio of the
/// logarithmic-mean fluctuation functions. Flagged as unbounded for q ≤ 0.
pub fn rho_q<T: Scalar>(x: &[T], y: &[T], config: &MfdfaConfig<T>) -> Result<Vec<RhoResult<T>>> {
    check_pair(x, y)?;
    config.validate(x.len())?;
    let per_scale: Vec<Result<Vec<Option<T>>>> =
        config.scales.par_iter().map(|&s| rho_at_scale(x, y, s, config)).collect();
    let per_scale: Vec<Vec<Option<T>>> = per_scale.into_iter().collect::<Result<_>>()?;

    config
        .q_grid
        .iter()
        .enumerate()
        .map(|(qi, &q)| {
            let rho = per_scale
                .iter()
                .zip(&config.scales)
                .map(|(per_q, &s)| {
                    per_q[qi].ok_or_else(|| Error::Degenerate(format!("zero denominator in rho at q={q}, s={s}")))
                })
                .collect::<Result<Vec<T>>>()?;
            Ok(RhoResult { q, scales: config.scales.clone(), rho, unbounded: q <= T::zero() })
        })
        .collect()
}

/// `ρ_q(s)` at fixed q and s in moving windows `[start, start + window)`.
///
/// `timestamps` are sample times in seconds and `resolution` the sampling
/// interval (the bin width for binned series).
#[allow(clippy::too_many_arguments)]
pub fn rolling_rho<T: Scalar>(
    x: &[T],
    y: &[T],
    timestamps: &[f64],
    resolution: f64,
    q: T,
    scale: usize,
    degree: usize,
    window: f64,
    step: f64,
) -> Result<RollingRho<T>> {
    check_pair(x, y)?;
    if timestamps.len() != x.len() {
        invalid!("{} timestamps for {} samples", timestamps.len(), x.len());
    }
    if !(window > 0.0 && step > 0.0) {
        invalid!("window and step must be positive (window={window}, step={step})");
    }
    let config = MfdfaConfig {
        q_grid: vec![q],
        scales: vec![scale],
        degree,
        fit_range: None,
        variance_floor: T::of(DEFAULT_VARIANCE_FLOOR),
    };
    DetrendBasis::<T>::new(scale, degree)?;
    let end = timestamps.last().map_or(0.0, |t| t + resolution);
    let bounds = window_bounds(timestamps, end, window, step);
    let rho = bounds
        .par_iter()
        .map(|&(_, lo, hi)| {
            if hi - lo < 10 * scale {
                return None;
            }
            rho_at_scale(&x[lo..hi], &y[lo..hi], scale, &config).ok()?[0]
        })
        .collect();
    Ok(RollingRho {
        q,
        scale,
        window_length: window,
        step,
        window_end_times: bounds.iter().map(|b| b.0).collect(),
        rho,
    })
}
