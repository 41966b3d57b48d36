//! Tick-by-tick trade ingestion.
//!
//! Timestamps are stored as integer microseconds since the Unix epoch so that
//! differences between trades are exact and equal timestamps stay equal. The
//! parser never manufactures precision the file does not carry: digits below
//! one microsecond are rejected rather than rounded.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MICROS_PER_SECOND: i64 = 1_000_000;

/// Point in time, microseconds since the Unix epoch (UTC).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn from_micros(us: i64) -> Self {
        Timestamp(us)
    }

    pub fn from_secs(s: i64) -> Self {
        Timestamp(s * MICROS_PER_SECOND)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        let whole = self.0.div_euclid(MICROS_PER_SECOND);
        let frac = self.0.rem_euclid(MICROS_PER_SECOND);
        whole as f64 + frac as f64 * 1e-6
    }
}

impl fmt::Display for Timestamp {
    /// Decimal seconds, trailing fractional zeros trimmed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / MICROS_PER_SECOND as u64;
        let frac = abs % MICROS_PER_SECOND as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TimestampUnit {
    #[default]
    Seconds,
    Millis,
    Micros,
}

impl TimestampUnit {
    fn micros_per_unit(self) -> i64 {
        match self {
            TimestampUnit::Seconds => 1_000_000,
            TimestampUnit::Millis => 1_000,
            TimestampUnit::Micros => 1,
        }
    }

    fn fraction_digits(self) -> usize {
        match self {
            TimestampUnit::Seconds => 6,
            TimestampUnit::Millis => 3,
            TimestampUnit::Micros => 0,
        }
    }
}

impl FromStr for TimestampUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" | "sec" | "seconds" => Ok(TimestampUnit::Seconds),
            "ms" | "millis" => Ok(TimestampUnit::Millis),
            "us" | "µs" | "micros" => Ok(TimestampUnit::Micros),
            other => invalid!("unknown timestamp unit {other:?} (expected s, ms or us)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Column {
    Timestamp,
    Price,
    Volume,
    Skip,
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "timestamp" | "time" | "ts" | "t" => Ok(Column::Timestamp),
            "price" | "p" => Ok(Column::Price),
            "volume" | "vol" | "v" | "amount" => Ok(Column::Volume),
            "_" | "skip" => Ok(Column::Skip),
            other => invalid!("unknown column name {other:?}"),
        }
    }
}

/// Layout of a delimited trade file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormatSpec {
    pub delimiter: char,
    pub columns: Vec<Column>,
    pub timestamp_unit: TimestampUnit,
    pub has_header: bool,
}

impl Default for FormatSpec {
    fn default() -> Self {
        FormatSpec {
            delimiter: ',',
            columns: vec![Column::Timestamp, Column::Price, Column::Volume],
            timestamp_unit: TimestampUnit::Seconds,
            has_header: false,
        }
    }
}

impl FormatSpec {
    /// Parses a comma-separated column list such as `timestamp,price,volume`.
    pub fn parse_columns(list: &str) -> Result<Vec<Column>> {
        list.split(',').map(str::parse).collect()
    }

    fn validate(&self) -> Result<[usize; 3]> {
        let position = |c: Column| -> Result<usize> {
            let mut found = self.columns.iter().enumerate().filter(|(_, &x)| x == c);
            match (found.next(), found.next()) {
                (Some((i, _)), None) => Ok(i),
                (None, _) => invalid!("column layout lacks {c:?}"),
                (Some(_), Some(_)) => invalid!("column {c:?} declared twice"),
            }
        };
        Ok([position(Column::Timestamp)?, position(Column::Price)?, position(Column::Volume)?])
    }
}

/// One executed trade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeRecord {
    pub timestamp: Timestamp,
    pub price: f64,
    pub volume: f64,
}

impl TradeRecord {
    pub fn new(timestamp: Timestamp, price: f64, volume: f64) -> Result<Self> {
        if !(price.is_finite() && price > 0.0) {
            invalid!("price must be positive and finite, got {price}");
        }
        if !(volume.is_finite() && volume >= 0.0) {
            invalid!("volume must be non-negative and finite, got {volume}");
        }
        Ok(TradeRecord { timestamp, price, volume })
    }
}

/// Ordered trades of one asset on one venue.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TickSeries {
    pub records: Vec<TradeRecord>,
    pub asset_label: String,
    pub venue_label: String,
}

impl TickSeries {
    pub fn new(records: Vec<TradeRecord>) -> Self {
        TickSeries { records, ..Default::default() }
    }

    pub fn with_labels(mut self, asset: impl Into<String>, venue: impl Into<String>) -> Self {
        self.asset_label = asset.into();
        self.venue_label = venue.into();
        self
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn timestamps(&self) -> impl Iterator<Item = Timestamp> + '_ {
        self.records.iter().map(|r| r.timestamp)
    }

    /// Index of the first record whose timestamp precedes its predecessor's.
    pub fn first_disorder(&self) -> Option<usize> {
        self.records.windows(2).position(|w| w[1].timestamp < w[0].timestamp).map(|i| i + 1)
    }

    pub fn is_ordered(&self) -> bool {
        self.first_disorder().is_none()
    }
}

/// Parses a decimal string expressed in `unit` into whole microseconds.
pub fn parse_timestamp(field: &str, unit: TimestampUnit) -> std::result::Result<Timestamp, String> {
    let field = field.trim();
    let (negative, body) = match field.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, field.strip_prefix('+').unwrap_or(field)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("non-numeric timestamp {field:?}"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("non-numeric timestamp {field:?}"));
    }

    let keep = unit.fraction_digits();
    let (kept, dropped) = frac_part.split_at(frac_part.len().min(keep));
    if dropped.bytes().any(|b| b != b'0') {
        return Err(format!("timestamp {field:?} has sub-microsecond digits"));
    }

    let overflow = || format!("timestamp {field:?} overflows the {unit:?} unit");
    let whole: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| overflow())? };
    let mut frac: i64 = if kept.is_empty() { 0 } else { kept.parse().map_err(|_| overflow())? };
    for _ in kept.len()..keep {
        frac *= 10;
    }
    let micros = whole.checked_mul(unit.micros_per_unit()).and_then(|w| w.checked_add(frac)).ok_or_else(overflow)?;
    Ok(Timestamp(if negative { -micros } else { micros }))
}

fn parse_number(field: &str, what: &str) -> std::result::Result<f64, String> {
    let v: f64 = field.trim().parse().map_err(|_| format!("non-numeric {what} {:?}", field.trim()))?;
    if !v.is_finite() {
        return Err(format!("non-finite {what} {:?}", field.trim()));
    }
    Ok(v)
}

/// Streams a delimited trade file into a [`TickSeries`], keeping input order.
///
/// Blank lines and lines starting with `#` are ignored. Errors carry the
/// 1-based line number of the offending row.
pub fn parse_trades<R: BufRead>(input: R, spec: &FormatSpec) -> Result<TickSeries> {
    let [ts_col, price_col, vol_col] = spec.validate()?;
    let mut records = Vec::new();
    let mut header_pending = spec.has_header;

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(spec.delimiter).collect();
        if fields.len() != spec.columns.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", spec.columns.len(), fields.len()),
            });
        }
        let record = (|| -> std::result::Result<TradeRecord, String> {
            let timestamp = parse_timestamp(fields[ts_col], spec.timestamp_unit)?;
            let price = parse_number(fields[price_col], "price")?;
            let volume = parse_number(fields[vol_col], "volume")?;
            TradeRecord::new(timestamp, price, volume).map_err(|e| e.to_string())
        })()
        .map_err(|message| Error::Parse { line: line_no, message })?;
        records.push(record);
    }
    Ok(TickSeries::new(records))
}

/// Writes trades in the default `timestamp,price,volume` seconds layout.
///
/// Output parses back to an identical series with `FormatSpec::default()`.
pub fn write_trades<W: Write>(mut out: W, series: &TickSeries) -> Result<()> {
    for r in &series.records {
        writeln!(out, "{},{},{}", r.timestamp, r.price, r.volume)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OrderPolicy {
    #[default]
    Reject,
    Sort,
}

impl FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(OrderPolicy::Reject),
            "sort" => Ok(OrderPolicy::Sort),
            other => invalid!("unknown ordering policy {other:?} (expected reject or sort)"),
        }
    }
}

/// Ensures non-decreasing timestamps, either by refusing disordered input or
/// by a stable sort on timestamp.
pub fn validate_ordering(mut series: TickSeries, policy: OrderPolicy) -> Result<TickSeries> {
    match (policy, series.first_disorder()) {
        (_, None) => Ok(series),
        (OrderPolicy::Reject, Some(index)) => Err(Error::OutOfOrder { index }),
        (OrderPolicy::Sort, Some(_)) => {
            series.records.sort_by_key(|r| r.timestamp);
            Ok(series)
        }
    }
}
