//! Series derived from a tick stream: inter-transaction times, fixed-width
//! activity bins, summary statistics and rolling-window statistics.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::ingest::{TickSeries, Timestamp, MICROS_PER_SECOND};
use crate::scalar::{ordered_sum, Scalar};

/// Waiting times between consecutive trades, in seconds.
///
/// `times[i]` is the timestamp of the trade that opens interval `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IttSeries<T> {
    pub values: Vec<T>,
    pub times: Vec<f64>,
    pub asset_label: String,
    pub venue_label: String,
}

impl<T: Scalar> IttSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Mean, population standard deviation, count and fraction of exact zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesStats<T> {
    pub mean: T,
    pub std: T,
    pub count: usize,
    pub zero_fraction: T,
}

/// Transaction count, traded volume and log-return per fixed-width bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedSeries<T> {
    /// Bin width in seconds.
    pub bin_width: f64,
    /// Epoch seconds of the left edge of the first bin.
    pub start_time: f64,
    pub n: Vec<u64>,
    pub v: Vec<T>,
    pub r: Vec<T>,
    /// Left edge of every bin, epoch seconds.
    pub bin_timestamps: Vec<f64>,
}

impl<T: Scalar> BinnedSeries<T> {
    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn counts(&self) -> Vec<T> {
        self.n.iter().map(|&c| T::of(c as f64)).collect()
    }

    /// Absolute log-returns, the per-bin volatility proxy.
    pub fn volatility(&self) -> Vec<T> {
        self.r.iter().map(|r| r.abs()).collect()
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# bin_width_s={} start_time_s={}", self.bin_width, self.start_time)?;
        writeln!(out, "# t_s,n,volume,log_return,abs_log_return")?;
        for i in 0..self.len() {
            writeln!(out, "{},{},{},{},{}", self.bin_timestamps[i], self.n[i], self.v[i], self.r[i], self.r[i].abs())?;
        }
        Ok(())
    }
}

/// Forward differences of trade timestamps.
pub fn extract_itt<T: Scalar>(series: &TickSeries) -> Result<IttSeries<T>> {
    if series.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: series.len() });
    }
    if let Some(index) = series.first_disorder() {
        return Err(Error::OutOfOrder { index });
    }
    let (values, times) = series
        .records
        .windows(2)
        .map(|w| {
            let dt = w[1].timestamp.micros() - w[0].timestamp.micros();
            (T::of(dt as f64 / MICROS_PER_SECOND as f64), w[0].timestamp.as_secs_f64())
        })
        .unzip();
    Ok(IttSeries { values, times, asset_label: series.asset_label.clone(), venue_label: series.venue_label.clone() })
}

pub fn compute_stats<T: Scalar>(values: &[T]) -> Result<SeriesStats<T>> {
    if values.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let n = T::of_usize(values.len());
    let mean = ordered_sum(values.iter().copied()) / n;
    let var = ordered_sum(values.iter().map(|&x| (x - mean) * (x - mean))) / n;
    let zeros = values.iter().filter(|x| x.is_zero()).count();
    Ok(SeriesStats { mean, std: var.sqrt(), count: values.len(), zero_fraction: T::of_usize(zeros) / n })
}

fn micros_from_secs(s: f64, what: &str) -> Result<i64> {
    let us = (s * MICROS_PER_SECOND as f64).round();
    if !(us.is_finite() && us >= 1.0 && us < i64::MAX as f64) {
        invalid!("{what} must be at least one microsecond, got {s} s");
    }
    Ok(us as i64)
}

/// Bins trades into half-open intervals `[k·Δt, (k+1)·Δt)` anchored at the
/// first timestamp floored to a multiple of `Δt`.
///
/// Bins run contiguously up to the one holding the last trade, so every trade
/// is counted. Log-returns use last-trade-carried-forward prices: the return
/// of a bin is the log change of the last traded price since the previous
/// bin's close (the first bin opens at the first trade's price).
pub fn bin_ticks<T: Scalar>(series: &TickSeries, bin_width: f64) -> Result<BinnedSeries<T>> {
    if !(bin_width > 0.0) {
        invalid!("bin width must be positive, got {bin_width}");
    }
    if series.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    if let Some(index) = series.first_disorder() {
        return Err(Error::OutOfOrder { index });
    }
    let width = micros_from_secs(bin_width, "bin width")?;
    let first = series.records[0].timestamp.micros();
    let last = series.records[series.len() - 1].timestamp.micros();
    let anchor = first.div_euclid(width) * width;
    let bins = ((last - anchor) / width) as usize + 1;

    let mut n = vec![0u64; bins];
    let mut v = vec![T::zero(); bins];
    let mut close = vec![f64::NAN; bins];
    for rec in &series.records {
        let k = ((rec.timestamp.micros() - anchor) / width) as usize;
        n[k] += 1;
        v[k] = v[k] + T::of(rec.volume);
        close[k] = rec.price;
    }

    let mut prev_close = series.records[0].price;
    let mut r = Vec::with_capacity(bins);
    for &c in &close {
        if c.is_nan() {
            r.push(T::zero());
        } else {
            r.push(T::of(c.ln() - prev_close.ln()));
            prev_close = c;
        }
    }

    let bin_timestamps = (0..bins).map(|k| Timestamp(anchor + k as i64 * width).as_secs_f64()).collect();
    Ok(BinnedSeries { bin_width, start_time: Timestamp(anchor).as_secs_f64(), n, v, r, bin_timestamps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RollingStatistic {
    Mean,
    MeanAbs,
}

impl std::str::FromStr for RollingStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(RollingStatistic::Mean),
            "mean-abs" => Ok(RollingStatistic::MeanAbs),
            other => invalid!("unknown rolling statistic {other:?}"),
        }
    }
}

/// A statistic evaluated in moving windows. `None` marks a window without
/// samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingSeries<T> {
    pub window_length: f64,
    pub step: f64,
    pub window_end_times: Vec<f64>,
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> RollingSeries<T> {
    pub fn write_text<W: Write>(&self, mut out: W, statistic: &str, unit: &str) -> Result<()> {
        writeln!(out, "# window_end_s,{statistic}[{unit}]")?;
        for (t, v) in self.window_end_times.iter().zip(&self.values) {
            match v {
                Some(v) => writeln!(out, "{t},{v}")?,
                None => writeln!(out, "{t},nan")?,
            }
        }
        Ok(())
    }
}

/// Timestamped samples on a grid of known resolution.
///
/// `resolution` is the sampling interval of the input (the bin width of a
/// binned series, or the clock resolution of an irregular series); the last
/// sample covers `[t_last, t_last + resolution)`.
#[derive(Debug, Clone, Copy)]
pub struct TimedSamples<'a, T> {
    pub times: &'a [f64],
    pub values: &'a [T],
    pub resolution: f64,
}

impl<'a, T: Scalar> TimedSamples<'a, T> {
    pub fn from_binned(binned: &'a BinnedSeries<T>, values: &'a [T]) -> Self {
        TimedSamples { times: &binned.bin_timestamps, values, resolution: binned.bin_width }
    }

    pub fn from_itt(itt: &'a IttSeries<T>) -> Self {
        TimedSamples { times: &itt.times, values: &itt.values, resolution: 1e-6 }
    }

    /// Exclusive end of the covered time span.
    pub fn end(&self) -> f64 {
        self.times.last().map_or(0.0, |t| t + self.resolution)
    }
}

/// Windows `[start, start + window)` with `start = t_first + k·step`, emitted
/// while the window fits inside the covered span.
pub(crate) fn window_bounds(times: &[f64], end: f64, window: f64, step: f64) -> Vec<(f64, usize, usize)> {
    let Some(&t0) = times.first() else { return Vec::new() };
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let start = t0 + k as f64 * step;
        let stop = start + window;
        // relative slack so that window == span is accepted despite rounding
        if stop > end + 1e-9 * end.abs().max(1.0) {
            break;
        }
        let lo = times.partition_point(|&t| t < start);
        let hi = times.partition_point(|&t| t < stop);
        out.push((stop, lo, hi));
        k += 1;
    }
    out
}

pub fn rolling_stat<T: Scalar>(
    input: TimedSamples<'_, T>,
    statistic: RollingStatistic,
    window: f64,
    step: f64,
) -> Result<RollingSeries<T>> {
    if !(window > 0.0 && step > 0.0) {
        invalid!("window and step must be positive (window={window}, step={step})");
    }
    if window < input.resolution {
        invalid!("window {window} s is shorter than the input resolution {} s", input.resolution);
    }
    if input.times.len() != input.values.len() {
        invalid!("{} timestamps for {} values", input.times.len(), input.values.len());
    }
    let bounds = window_bounds(input.times, input.end(), window, step);
    let values = bounds
        .par_iter()
        .map(|&(_, lo, hi)| {
            if lo == hi {
                return None;
            }
            let slice = &input.values[lo..hi];
            let total = match statistic {
                RollingStatistic::Mean => ordered_sum(slice.iter().copied()),
                RollingStatistic::MeanAbs => ordered_sum(slice.iter().map(|x| x.abs())),
            };
            Some(total / T::of_usize(slice.len()))
        })
        .collect();
    Ok(RollingSeries { window_length: window, step, window_end_times: bounds.iter().map(|b| b.0).collect(), values })
}

/// Divides every value by the population standard deviation of the sequence.
/// The mean is not subtracted.
pub fn normalize_by_sigma<T: Scalar>(values: &[T]) -> Result<Vec<T>> {
    let stats = compute_stats(values)?;
    if !(stats.std > T::zero()) {
        return Err(Error::Degenerate("zero variance, cannot normalize by sigma".into()));
    }
    Ok(values.iter().map(|&x| x / stats.std).collect())
}
