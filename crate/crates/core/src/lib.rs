//! Inter-transaction-time analysis for high-frequency trade data.
//!
//! Tick records are parsed by [`ingest`], turned into inter-trade times,
//! binned activity series and rolling statistics by [`series`], adjusted for
//! intraday and weekly seasonality by [`deseason`], and then analysed with the
//! autocorrelation function ([`acf`]), multifractal detrended fluctuation
//! analysis ([`mfdfa`]), its cross-correlation extension ([`mfdcca`]) and
//! heavy-tail fits ([`dist`]). [`synth`] produces reference series with known
//! scaling for validation.
//!
//! Numerical routines are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common result types to either precision.

pub mod acf;
pub mod deseason;
pub mod dist;
mod error;
pub mod grid;
pub mod ingest;
pub mod mfdcca;
pub mod mfdfa;
mod scalar;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type IttSeries64 = series::IttSeries<f64>;
pub type IttSeries32 = series::IttSeries<f32>;
pub type BinnedSeries64 = series::BinnedSeries<f64>;
pub type BinnedSeries32 = series::BinnedSeries<f32>;
pub type SeasonalPattern64 = deseason::SeasonalPattern<f64>;
pub type SeasonalPattern32 = deseason::SeasonalPattern<f32>;
pub type AcfResult64 = acf::AcfResult<f64>;
pub type AcfResult32 = acf::AcfResult<f32>;
pub type MfdfaConfig64 = mfdfa::MfdfaConfig<f64>;
pub type MfdfaConfig32 = mfdfa::MfdfaConfig<f32>;
pub type FluctuationSurface64 = mfdfa::FluctuationSurface<f64>;
pub type FluctuationSurface32 = mfdfa::FluctuationSurface<f32>;
pub type GeneralizedHurst64 = mfdfa::GeneralizedHurst<f64>;
pub type GeneralizedHurst32 = mfdfa::GeneralizedHurst<f32>;
pub type SingularitySpectrum64 = mfdfa::SingularitySpectrum<f64>;
pub type SingularitySpectrum32 = mfdfa::SingularitySpectrum<f32>;
pub type RhoResult64 = mfdcca::RhoResult<f64>;
pub type RhoResult32 = mfdcca::RhoResult<f32>;
pub type EcdfCurve64 = dist::EcdfCurve<f64>;
pub type EcdfCurve32 = dist::EcdfCurve<f32>;
pub type DistModel64 = dist::DistModel<f64>;
pub type DistModel32 = dist::DistModel<f32>;
