//! Autocorrelation with lags reported in real time units.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::log_spaced_integers;
use crate::scalar::{ordered_sum, Scalar};

/// Default lag-grid density, points per decade.
pub const DEFAULT_LAGS_PER_DECADE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum AcfEstimator {
    /// `Σ (x_{i+k}−μ)(x_i−μ) / (N σ²)`, bounded by one in magnitude.
    #[default]
    Standard,
    /// `⟨x_{i+k} x_i⟩ / σ²` averaged over the `N−k` available pairs, without
    /// mean subtraction.
    Raw,
}

impl std::str::FromStr for AcfEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(AcfEstimator::Standard),
            "raw" => Ok(AcfEstimator::Raw),
            other => invalid!("unknown ACF estimator {other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfResult<T> {
    pub lags: Vec<usize>,
    /// `τ_k = k · ⟨δt⟩` in seconds.
    pub tau: Vec<f64>,
    pub c: Vec<T>,
}

impl<T: Scalar> AcfResult<T> {
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# k,tau_seconds,C")?;
        for ((k, tau), c) in self.lags.iter().zip(&self.tau).zip(&self.c) {
            writeln!(out, "{k},{tau},{c}")?;
        }
        Ok(())
    }
}

/// Every lag from 1 to `max_lag`.
pub fn linear_lags(max_lag: usize) -> Vec<usize> {
    (1..=max_lag).collect()
}

/// Distinct integer lags from 1 to `max_lag`, log-spaced.
pub fn log_lags(max_lag: usize, per_decade: usize) -> Vec<usize> {
    log_spaced_integers(1, max_lag, per_decade)
}

/// Autocorrelation at the given lags. `lag_seconds` converts lag counts to
/// time (`⟨δt⟩` for an ITT series, `Δt` for a binned one).
///
/// Each lag is an independent O(N) pass, so a log-spaced grid keeps very long
/// lag ranges affordable.
pub fn acf<T: Scalar>(values: &[T], lags: &[usize], estimator: AcfEstimator, lag_seconds: f64) -> Result<AcfResult<T>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    if let Some(&k) = lags.iter().find(|&&k| k == 0 || k >= n) {
        invalid!("lag {k} outside 1..{n}");
    }
    let nn = T::of_usize(n);
    let mean = ordered_sum(values.iter().copied()) / nn;
    let var = ordered_sum(values.iter().map(|&x| (x - mean) * (x - mean))) / nn;
    if !(var > T::zero()) {
        return Err(Error::Degenerate("zero variance, autocorrelation undefined".into()));
    }

    let c = lags
        .par_iter()
        .map(|&k| {
            let pairs = values[k..].iter().zip(&values[..n - k]);
            match estimator {
                AcfEstimator::Standard => ordered_sum(pairs.map(|(&a, &b)| (a - mean) * (b - mean))) / (nn * var),
                AcfEstimator::Raw => ordered_sum(pairs.map(|(&a, &b)| a * b)) / (T::of_usize(n - k) * var),
            }
        })
        .collect();
    Ok(AcfResult { lags: lags.to_vec(), tau: lags.iter().map(|&k| k as f64 * lag_seconds).collect(), c })
}
