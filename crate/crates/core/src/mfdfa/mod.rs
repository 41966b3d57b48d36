//! Multifractal detrended fluctuation analysis.
//!
//! The chain is [`fluctuation_surface`] → [`fit_hurst`] →
//! [`singularity_spectrum`] → [`spectrum_asymmetry`].
//!
//! Reductions are deterministic: per-segment variances are collected in
//! segment order (forward segments, then backward ones) and summed left to
//! right, so results do not depend on the rayon thread count.

pub(crate) mod detrend;
mod hurst;
mod spectrum;
pub(crate) mod surface;

pub use detrend::MAX_DEGREE;
pub use hurst::{fit_hurst, GeneralizedHurst};
pub use spectrum::{singularity_spectrum, spectrum_asymmetry, SingularitySpectrum};
pub use surface::{fluctuation_surface, FluctuationSurface};
pub(crate) use surface::{generalized_mean, signed_generalized_mean};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{log_spaced_integers, GridSpec};
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE: usize = 2;
pub const DEFAULT_SCALES_PER_DECADE: usize = 20;
pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-15;

/// Parameters of an MFDFA / MFDCCA run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MfdfaConfig<T> {
    pub q_grid: Vec<T>,
    /// Strictly increasing segment lengths.
    pub scales: Vec<usize>,
    /// Degree of the detrending polynomial.
    pub degree: usize,
    /// Inclusive range of scales used by the power-law fit.
    pub fit_range: Option<(usize, usize)>,
    /// Segments whose detrended (co)variance magnitude falls below this are
    /// excluded from the fluctuation functions.
    pub variance_floor: T,
}

/// `-4, -3.75, …, 4`.
pub fn default_q_grid<T: Scalar>() -> Vec<T> {
    (0..=32).map(|i| T::of(-4.0 + 0.25 * i as f64)).collect()
}

impl<T: Scalar> Default for MfdfaConfig<T> {
    fn default() -> Self {
        MfdfaConfig {
            q_grid: default_q_grid(),
            scales: Vec::new(),
            degree: DEFAULT_DEGREE,
            fit_range: None,
            variance_floor: T::of(DEFAULT_VARIANCE_FLOOR),
        }
    }
}

impl<T: Scalar> MfdfaConfig<T> {
    /// Default configuration with scales chosen by the data: from
    /// [`min_scale`] to [`max_scale`], log-spaced at 20 per decade.
    pub fn for_series(values: &[T], degree: usize) -> Result<Self> {
        let lo = min_scale(values, degree)?;
        let hi = max_scale(values.len(), degree)?;
        if hi < lo {
            invalid!("no feasible scale range: s_min = {lo} exceeds s_max = {hi}");
        }
        Ok(MfdfaConfig { scales: log_spaced_integers(lo, hi, DEFAULT_SCALES_PER_DECADE), degree, ..Default::default() })
    }

    pub fn with_q(mut self, q: &[f64]) -> Self {
        self.q_grid = q.iter().map(|&v| T::of(v)).collect();
        self
    }

    pub fn with_scales(mut self, scales: Vec<usize>) -> Self {
        self.scales = scales;
        self
    }

    pub fn with_scale_grid(mut self, grid: &GridSpec) -> Self {
        self.scales = grid.integers();
        self
    }

    pub fn with_fit_range(mut self, lo: usize, hi: usize) -> Self {
        self.fit_range = Some((lo, hi));
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    /// Checks the configuration against a series of length `len`.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.q_grid.is_empty() {
            invalid!("empty q grid");
        }
        if self.q_grid.iter().any(|q| !q.is_finite()) {
            invalid!("non-finite q in grid");
        }
        if self.scales.is_empty() {
            invalid!("empty scale grid");
        }
        if self.scales.windows(2).any(|w| w[1] <= w[0]) {
            invalid!("scale grid must be strictly increasing");
        }
        if self.degree > MAX_DEGREE {
            invalid!("detrending degree {} exceeds {MAX_DEGREE}", self.degree);
        }
        let smallest = self.scales[0];
        if smallest < self.degree + 2 {
            invalid!("smallest scale {smallest} below the degree-{} floor {}", self.degree, self.degree + 2);
        }
        let largest = *self.scales.last().unwrap();
        if largest > len {
            return Err(Error::TooShort { needed: largest, got: len });
        }
        if !(self.variance_floor >= T::zero()) {
            invalid!("variance floor must be non-negative");
        }
        Ok(())
    }
}

/// Smallest admissible scale: one more than the longest run of exact zeros,
/// and never below `degree + 2`.
pub fn min_scale<T: Scalar>(values: &[T], degree: usize) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mut longest = 0usize;
    let mut run = 0usize;
    for v in values {
        if v.is_zero() {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    if longest == values.len() {
        return Err(Error::Degenerate("series is entirely zero".into()));
    }
    Ok((longest + 1).max(degree + 2))
}

/// Largest admissible scale, a tenth of the series length.
pub fn max_scale(len: usize, degree: usize) -> Result<usize> {
    let needed = 10 * (degree + 2);
    if len < needed {
        return Err(Error::TooShort { needed, got: len });
    }
    Ok(len / 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_scale_rule() {
        assert_eq!(min_scale(&[1.0f64, 0.0, 0.0, 0.0, 2.0], 2).unwrap(), 4);
        assert_eq!(min_scale(&[1.0f64, 0.0, 0.0, 0.0, 2.0], 3).unwrap(), 5);
        assert_eq!(min_scale(&[1.0f64, 2.0, 3.0], 2).unwrap(), 4);
        assert_eq!(min_scale(&[1.0f64, 2.0, 3.0], 1).unwrap(), 3);
        assert!(min_scale(&[0.0f64; 5], 2).is_err());
        assert_eq!(min_scale(&[0.0f64, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 2).unwrap(), 7);
    }

    #[test]
    fn max_scale_rule() {
        assert_eq!(max_scale(1000, 2).unwrap(), 100);
        assert_eq!(max_scale(10_000_000, 2).unwrap(), 1_000_000);
        assert!(max_scale(39, 2).is_err());
        assert_eq!(max_scale(40, 2).unwrap(), 4);
    }

    #[test]
    fn default_grid_and_validation() {
        let q: Vec<f64> = default_q_grid();
        assert_eq!(q.len(), 33);
        assert_eq!(q[16], 0.0);

        let cfg = MfdfaConfig::<f64>::default().with_scales(vec![4, 8, 16]);
        assert!(cfg.validate(100).is_ok());
        assert!(cfg.validate(10).is_err());
        assert!(cfg.clone().with_scales(vec![3, 8]).validate(100).is_err());
        assert!(cfg.clone().with_scales(vec![8, 8]).validate(100).is_err());
        assert!(cfg.with_q(&[]).validate(100).is_err());
    }

    #[test]
    fn config_for_series() {
        let x: Vec<f64> = (0..10_000).map(|i| if i % 50 < 5 { 0.0 } else { 1.0 + (i % 7) as f64 }).collect();
        let cfg = MfdfaConfig::for_series(&x, 2).unwrap();
        assert_eq!(cfg.scales[0], 6);
        assert_eq!(*cfg.scales.last().unwrap(), 1000);
        assert!(cfg.validate(x.len()).is_ok());
    }
}
