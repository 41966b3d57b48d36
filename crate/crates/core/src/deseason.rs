//! Removal of intraday and intraweek activity cycles.
//!
//! Patterns are bucketed in UTC. A bucket value is the average, over all
//! calendar days (or weeks) that have data in the bucket, of the mean inside
//! that one-hour (one-day) window.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

pub const HOURS_PER_DAY: usize = 24;
pub const DAYS_PER_WEEK: usize = 7;
const SECONDS_PER_HOUR: f64 = 3600.0;
const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DeseasonMode {
    Daily,
    #[default]
    DailyWeekly,
}

impl std::str::FromStr for DeseasonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "daily" => Ok(DeseasonMode::Daily),
            "daily+weekly" | "weekly" => Ok(DeseasonMode::DailyWeekly),
            other => invalid!("unknown deseasonalization mode {other:?}"),
        }
    }
}

/// Hour-of-day (UTC) of an epoch timestamp in seconds.
pub fn hour_of_day(t: f64) -> usize {
    ((t / SECONDS_PER_HOUR).floor() as i64).rem_euclid(HOURS_PER_DAY as i64) as usize
}

/// Day of week (UTC, Monday = 0). 1970-01-01 was a Thursday.
pub fn day_of_week(t: f64) -> usize {
    ((t / SECONDS_PER_DAY).floor() as i64 + 3).rem_euclid(DAYS_PER_WEEK as i64) as usize
}

fn day_index(t: f64) -> i64 {
    (t / SECONDS_PER_DAY).floor() as i64
}

/// Mean daily and weekly activity profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeasonalPattern<T> {
    pub daily: [T; HOURS_PER_DAY],
    /// `None` when only the daily pattern was estimated.
    pub weekly: Option<[T; DAYS_PER_WEEK]>,
}

fn check_inputs<T>(values: &[T], timestamps: &[f64]) -> Result<()> {
    if values.len() != timestamps.len() {
        invalid!("{} values but {} timestamps", values.len(), timestamps.len());
    }
    if timestamps.iter().any(|t| !t.is_finite()) {
        invalid!("non-finite timestamp");
    }
    Ok(())
}

fn span_days(timestamps: &[f64]) -> f64 {
    let (lo, hi) = timestamps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    if lo > hi {
        0.0
    } else {
        (hi - lo) / SECONDS_PER_DAY
    }
}

/// Two-stage bucket average: mean inside every `window` key, then the mean of
/// those window means per bucket.
fn bucket_means<T: Scalar, const B: usize>(
    values: &[T],
    timestamps: &[f64],
    key: impl Fn(f64) -> (i64, usize),
    bucket_name: impl Fn(usize) -> String,
) -> Result<[T; B]> {
    // (window, bucket) -> (sum, count); BTreeMap keeps the reduction order fixed
    let mut windows: BTreeMap<(i64, usize), (T, usize)> = BTreeMap::new();
    for (&x, &t) in values.iter().zip(timestamps) {
        let e = windows.entry(key(t)).or_insert((T::zero(), 0));
        e.0 = e.0 + x;
        e.1 += 1;
    }
    let mut sums = [T::zero(); B];
    let mut counts = [0usize; B];
    for (&(_, bucket), &(sum, n)) in &windows {
        sums[bucket] = sums[bucket] + sum / T::of_usize(n);
        counts[bucket] += 1;
    }
    let mut out = [T::zero(); B];
    for b in 0..B {
        if counts[b] == 0 {
            return Err(Error::EmptyBucket { bucket: bucket_name(b) });
        }
        out[b] = sums[b] / T::of_usize(counts[b]);
    }
    Ok(out)
}

/// Mean value per UTC hour of day.
pub fn estimate_daily_pattern<T: Scalar>(values: &[T], timestamps: &[f64]) -> Result<[T; HOURS_PER_DAY]> {
    check_inputs(values, timestamps)?;
    if span_days(timestamps) < 2.0 {
        invalid!("daily pattern needs at least two days of data, got {:.3}", span_days(timestamps));
    }
    bucket_means::<T, HOURS_PER_DAY>(
        values,
        timestamps,
        |t| (day_index(t), hour_of_day(t)),
        |h| format!("hour {h:02} UTC"),
    )
}

/// Mean value per UTC day of week, Monday first.
pub fn estimate_weekly_pattern<T: Scalar>(values: &[T], timestamps: &[f64]) -> Result<[T; DAYS_PER_WEEK]> {
    check_inputs(values, timestamps)?;
    if span_days(timestamps) < 6.0 {
        invalid!("weekly pattern needs a full week of data, got {:.3} days", span_days(timestamps));
    }
    const NAMES: [&str; 7] = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"];
    bucket_means::<T, DAYS_PER_WEEK>(values, timestamps, |t| (day_index(t), day_of_week(t)), |d| NAMES[d].to_string())
}

impl<T: Scalar> SeasonalPattern<T> {
    /// Estimates the daily pattern, and for `DailyWeekly` the weekly pattern of
    /// the daily-adjusted series, so the two corrections compose.
    pub fn estimate(values: &[T], timestamps: &[f64], mode: DeseasonMode) -> Result<Self> {
        let daily = estimate_daily_pattern(values, timestamps)?;
        let weekly = match mode {
            DeseasonMode::Daily => None,
            DeseasonMode::DailyWeekly => {
                let partial = SeasonalPattern { daily, weekly: None };
                let adjusted = deseasonalize(values, timestamps, &partial, DeseasonMode::Daily)?;
                Some(estimate_weekly_pattern(&adjusted, timestamps)?)
            }
        };
        Ok(SeasonalPattern { daily, weekly })
    }

    /// Weekly pattern rescaled to mean 1.
    pub fn weekly_factors(&self) -> Option<[T; DAYS_PER_WEEK]> {
        self.weekly.map(|w| {
            let mean = w.iter().copied().fold(T::zero(), |a, b| a + b) / T::of_usize(DAYS_PER_WEEK);
            w.map(|x| x / mean)
        })
    }

    pub fn write_daily<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# hour_utc,mean")?;
        for (h, v) in self.daily.iter().enumerate() {
            writeln!(out, "{h},{v}")?;
        }
        Ok(())
    }

    pub fn write_weekly<W: Write>(&self, mut out: W) -> Result<()> {
        let Some(weekly) = &self.weekly else {
            invalid!("pattern has no weekly component");
        };
        writeln!(out, "# day_of_week_utc(monday=0),mean")?;
        for (d, v) in weekly.iter().enumerate() {
            writeln!(out, "{d},{v}")?;
        }
        Ok(())
    }

    pub fn read_daily<R: BufRead>(input: R) -> Result<[T; HOURS_PER_DAY]> {
        read_table::<T, R, HOURS_PER_DAY>(input)
    }

    pub fn read_weekly<R: BufRead>(input: R) -> Result<[T; DAYS_PER_WEEK]> {
        read_table::<T, R, DAYS_PER_WEEK>(input)
    }
}

fn read_table<T: Scalar, R: BufRead, const B: usize>(input: R) -> Result<[T; B]> {
    let mut out = [None; B];
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        let (k, v) = line.split_once(',').ok_or_else(|| parse_err("expected `bucket,value`".into()))?;
        let k: usize = k.trim().parse().map_err(|_| parse_err(format!("bad bucket index {k:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| parse_err(format!("bad value {v:?}")))?;
        if k >= B {
            return Err(parse_err(format!("bucket {k} out of range 0..{B}")));
        }
        out[k] = Some(T::of(v));
    }
    let mut table = [T::zero(); B];
    for (b, v) in out.iter().enumerate() {
        table[b] = v.ok_or_else(|| Error::EmptyBucket { bucket: format!("bucket {b}") })?;
    }
    Ok(table)
}

/// Divides every value by its hour-of-day pattern value, then (in
/// `DailyWeekly` mode) by its mean-one day-of-week factor. Zeros stay zero.
pub fn deseasonalize<T: Scalar>(
    values: &[T],
    timestamps: &[f64],
    pattern: &SeasonalPattern<T>,
    mode: DeseasonMode,
) -> Result<Vec<T>> {
    check_inputs(values, timestamps)?;
    if let Some(h) = pattern.daily.iter().position(|v| !(*v > T::zero() && v.is_finite())) {
        return Err(Error::Degenerate(format!("daily pattern value for hour {h} is not positive")));
    }
    let weekly = match mode {
        DeseasonMode::Daily => None,
        DeseasonMode::DailyWeekly => {
            let factors = pattern
                .weekly_factors()
                .ok_or_else(|| Error::InvalidArgument("pattern has no weekly component".into()))?;
            if let Some(d) = factors.iter().position(|v| !(*v > T::zero() && v.is_finite())) {
                return Err(Error::Degenerate(format!("weekly pattern value for day {d} is not positive")));
            }
            Some(factors)
        }
    };
    Ok(values
        .iter()
        .zip(timestamps)
        .map(|(&x, &t)| {
            let y = x / pattern.daily[hour_of_day(t)];
            match &weekly {
                Some(w) => y / w[day_of_week(t)],
                None => y,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DAY: f64 = SECONDS_PER_DAY;
    // 2017-01-02 00:00 UTC, a Monday
    const MONDAY: f64 = 1_483_315_200.0;

    fn hourly_grid(days: usize, step: f64) -> Vec<f64> {
        let n = (days as f64 * DAY / step) as usize;
        (0..n).map(|i| MONDAY + i as f64 * step).collect()
    }

    #[test]
    fn calendar_helpers() {
        assert_eq!(day_of_week(MONDAY), 0);
        assert_eq!(day_of_week(MONDAY + 5.5 * DAY), 5);
        assert_eq!(day_of_week(0.0), 3);
        assert_eq!(hour_of_day(MONDAY + 3.0 * 3600.0 + 59.0), 3);
        assert_eq!(hour_of_day(-1.0), 23);
    }

    #[test]
    fn constant_series_gives_flat_patterns() {
        let ts = hourly_grid(14, 600.0);
        let vals = vec![4.2f64; ts.len()];
        let p = SeasonalPattern::estimate(&vals, &ts, DeseasonMode::DailyWeekly).unwrap();
        assert!(p.daily.iter().all(|&v| (v - 4.2).abs() < 1e-12));
        assert!(p.weekly.unwrap().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let w = estimate_weekly_pattern(&vals, &ts).unwrap();
        assert!(w.iter().all(|&v| (v - 4.2).abs() < 1e-12));
    }

    #[test]
    fn periodic_series_is_recovered_and_flattened() {
        let g = |h: usize| 1.0 + h as f64 * 0.25;
        let ts = hourly_grid(5, 300.0);
        let vals: Vec<f64> = ts.iter().map(|&t| g(hour_of_day(t))).collect();
        let daily = estimate_daily_pattern(&vals, &ts).unwrap();
        for (h, v) in daily.iter().enumerate() {
            assert!((v - g(h)).abs() < 1e-12);
        }
        let p = SeasonalPattern { daily, weekly: None };
        let des = deseasonalize(&vals, &ts, &p, DeseasonMode::Daily).unwrap();
        assert!(des.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn single_week_equals_per_day_means() {
        let ts = hourly_grid(7, 3600.0);
        let vals: Vec<f64> = ts.iter().map(|&t| (day_of_week(t) + 1) as f64 * (1.0 + (t % 7.0))).collect();
        let w = estimate_weekly_pattern(&vals, &ts).unwrap();
        for d in 0..7 {
            let day: Vec<f64> = ts.iter().zip(&vals).filter(|(&t, _)| day_of_week(t) == d).map(|(_, &v)| v).collect();
            let mean = day.iter().sum::<f64>() / day.len() as f64;
            assert!((w[d] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn zeros_stay_zero_and_bad_divisors_fail() {
        let ts = hourly_grid(3, 900.0);
        let vals: Vec<f64> = (0..ts.len()).map(|i| if i % 3 == 0 { 0.0 } else { 2.0 }).collect();
        let daily = estimate_daily_pattern(&vals, &ts).unwrap();
        let p = SeasonalPattern { daily, weekly: None };
        let des = deseasonalize(&vals, &ts, &p, DeseasonMode::Daily).unwrap();
        for (a, b) in vals.iter().zip(&des) {
            assert_eq!(*a == 0.0, *b == 0.0);
        }

        let mut broken = p.clone();
        broken.daily[5] = 0.0;
        assert!(matches!(deseasonalize(&vals, &ts, &broken, DeseasonMode::Daily), Err(Error::Degenerate(_))));
        assert!(deseasonalize(&vals, &ts, &p, DeseasonMode::DailyWeekly).is_err());
    }

    #[test]
    fn empty_bucket_and_short_span_fail() {
        let ts: Vec<f64> = hourly_grid(3, 600.0).into_iter().filter(|&t| hour_of_day(t) != 7).collect();
        let vals = vec![1.0f64; ts.len()];
        assert!(matches!(estimate_daily_pattern(&vals, &ts), Err(Error::EmptyBucket { .. })));

        let ts = hourly_grid(1, 600.0);
        let vals = vec![1.0f64; ts.len()];
        assert!(estimate_daily_pattern(&vals, &ts).is_err());
    }

    #[test]
    fn pattern_text_round_trip() {
        let ts = hourly_grid(14, 1800.0);
        let vals: Vec<f64> = ts.iter().map(|&t| 1.0 + hour_of_day(t) as f64 / 7.0 + day_of_week(t) as f64).collect();
        let p = SeasonalPattern::estimate(&vals, &ts, DeseasonMode::DailyWeekly).unwrap();
        let (mut d, mut w) = (Vec::new(), Vec::new());
        p.write_daily(&mut d).unwrap();
        p.write_weekly(&mut w).unwrap();
        assert_eq!(String::from_utf8_lossy(&d).lines().count(), 25);
        assert_eq!(SeasonalPattern::<f64>::read_daily(d.as_slice()).unwrap(), p.daily);
        assert_eq!(Some(SeasonalPattern::<f64>::read_weekly(w.as_slice()).unwrap()), p.weekly);
        assert!(SeasonalPattern::<f64>::read_weekly("0,1\n1,1\n".as_bytes()).is_err());
    }
}
