//! Reading trade files and column-oriented series files.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use mfitt::deseason::{deseasonalize, DeseasonMode, SeasonalPattern};
use mfitt::ingest::{parse_trades, validate_ordering, Column, FormatSpec, OrderPolicy, TickSeries, TimestampUnit};
use serde::Serialize;

pub fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => {
            Box::new(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?))
        }
        _ => Box::new(BufReader::new(io::stdin().lock())),
    })
}

fn display_path(path: Option<&Path>) -> String {
    path.map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn parse_delimiter(s: &str) -> std::result::Result<char, String> {
    match s {
        "tab" | "\\t" => Ok('\t'),
        "space" => Ok(' '),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("delimiter must be a single character, `tab` or `space`, got {s:?}")),
            }
        }
    }
}

/// A delimited trade file.
#[derive(Debug, Args, Serialize)]
pub struct TickInput {
    /// Trade file (stdin when absent or `-`)
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Field delimiter (`tab` and `space` are accepted by name)
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delim: char,
    /// Unit of the timestamp field: s, ms or us
    #[arg(long, default_value = "s")]
    pub ts_unit: TimestampUnit,
    /// Column layout, e.g. `timestamp,price,volume` or `_,timestamp,price,volume`
    #[arg(long, default_value = "timestamp,price,volume")]
    pub columns: String,
    /// Skip the first line
    #[arg(long)]
    pub header: bool,
    /// What to do with out-of-order timestamps: reject or sort
    #[arg(long, default_value = "reject")]
    pub order: OrderPolicy,
}

impl TickInput {
    pub fn format(&self) -> Result<FormatSpec> {
        let columns: Vec<Column> = FormatSpec::parse_columns(&self.columns)?;
        Ok(FormatSpec { delimiter: self.delim, columns, timestamp_unit: self.ts_unit, has_header: self.header })
    }

    pub fn load(&self) -> Result<TickSeries> {
        let path = self.input.as_deref();
        let series = parse_trades(open_input(path)?, &self.format()?)
            .with_context(|| format!("reading trades from {}", display_path(path)))?;
        Ok(validate_ordering(series, self.order)?)
    }
}

/// One value column of a series file, with the timestamps of column 0 when
/// the file has more than one column.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub times: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn times(&self, what: &str) -> Result<&[f64]> {
        match &self.times {
            Some(t) => Ok(t),
            None => bail!("{what} needs timestamps, but `{}` has no time column", self.name),
        }
    }

    /// Smallest positive spacing of the timestamps: the bin width of a binned
    /// series, the finest resolved waiting time of an irregular one.
    pub fn resolution(&self) -> Result<f64> {
        let t = self.times("the sampling resolution")?;
        t.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0.0)
            .min_by(|a, b| a.total_cmp(b))
            .context("cannot infer a resolution from fewer than two distinct timestamps")
    }

    /// Mean timestamp spacing, `(t_last − t_first) / (N − 1)`.
    pub fn mean_spacing(&self) -> Option<f64> {
        let t = self.times.as_ref()?;
        (t.len() > 1).then(|| (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64)
    }

    pub fn deseasonalized(self, mode: DeseasonMode) -> Result<Series> {
        let times = self.times("deseasonalization")?;
        let pattern = SeasonalPattern::estimate(&self.values, times, mode)?;
        let values = deseasonalize(&self.values, times, &pattern, mode)?;
        Ok(Series { values, ..self })
    }
}

/// Selects the value column of a series file.
#[derive(Debug, Args, Serialize)]
pub struct SeriesInput {
    /// Series file: one value per line, or columns with timestamps first
    /// (stdin when absent or `-`)
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Value column by index or header name [default: 1 with a time column, else 0]
    #[arg(long)]
    pub col: Option<String>,
}

impl SeriesInput {
    pub fn load(&self) -> Result<Series> {
        read_series(self.input.as_deref(), self.col.as_deref())
    }
}

/// A second series aligned sample by sample with the first.
#[derive(Debug, Args, Serialize)]
pub struct PairInput {
    #[command(flatten)]
    pub x: SeriesInput,
    /// File of the second series [default: the first file]
    #[arg(long = "in2", value_name = "FILE")]
    pub input2: Option<PathBuf>,
    /// Column of the second series
    #[arg(long)]
    pub col2: Option<String>,
}

impl PairInput {
    pub fn load(&self) -> Result<(Series, Series)> {
        let x = self.x.load()?;
        let y = match &self.input2 {
            Some(path) => read_series(Some(path), self.col2.as_deref())?,
            None => {
                let Some(col2) = self.col2.as_deref() else {
                    bail!("give --in2 or --col2 for the second series");
                };
                if self.x.input.is_none() || self.x.input.as_deref() == Some(Path::new("-")) {
                    bail!("two columns of stdin cannot be read separately; use --in FILE");
                }
                read_series(self.x.input.as_deref(), Some(col2))?
            }
        };
        if x.values.len() != y.values.len() {
            bail!("series lengths differ: {} has {}, {} has {}", x.name, x.values.len(), y.name, y.values.len());
        }
        Ok((x, y))
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Reads column `col` of a text file. Blank lines and `#` comments are
/// skipped; the last comment before the data, if it lists as many
/// comma-separated names as there are columns, names the columns.
pub fn read_series(path: Option<&Path>, col: Option<&str>) -> Result<Series> {
    let source = display_path(path);
    let reader = open_input(path)?;
    let mut names: Option<Vec<String>> = None;
    let mut width = 0usize;
    let mut index = 0usize;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading {source}"))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if width == 0 {
                names = Some(comment.trim().split(',').map(|s| s.trim().to_string()).collect());
            }
            continue;
        }
        let fields = split_fields(line);
        if width == 0 {
            width = fields.len();
            index = resolve_column(col, width, names.as_deref().filter(|n| n.len() == width))
                .with_context(|| format!("selecting a column of {source}"))?;
        }
        if fields.len() != width {
            bail!("{source} line {}: expected {width} fields, found {}", i + 1, fields.len());
        }
        let parse = |k: usize| -> Result<f64> {
            fields[k].parse::<f64>().with_context(|| format!("{source} line {}: bad number {:?}", i + 1, fields[k]))
        };
        if width > 1 {
            times.push(parse(0)?);
        }
        values.push(parse(index)?);
    }
    if values.is_empty() {
        bail!("{source} contains no data");
    }
    let name = match names.filter(|n| n.len() == width) {
        Some(n) => n[index].clone(),
        None => format!("{source}:{index}"),
    };
    Ok(Series { name, times: (width > 1).then_some(times), values })
}

fn resolve_column(col: Option<&str>, width: usize, names: Option<&[String]>) -> Result<usize> {
    let index = match col {
        None => usize::from(width > 1),
        Some(c) => match c.parse::<usize>() {
            Ok(k) => k,
            Err(_) => names
                .and_then(|n| n.iter().position(|name| name == c))
                .with_context(|| format!("no column named {c:?}"))?,
        },
    };
    if index >= width {
        bail!("column {index} out of range for {width} columns");
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn single_column_has_no_times() {
        let f = write("# mfitt synth {}\n1.5\n2\n\n-3e-1\n");
        let s = read_series(Some(f.path()), None).unwrap();
        assert_eq!(s.values, vec![1.5, 2.0, -0.3]);
        assert!(s.times.is_none());
    }

    #[test]
    fn columns_by_name_and_index() {
        let f = write("# bin_width_s=10\n# t_s,n,volume\n0,3,1.5\n10,0,0\n20,7,2\n");
        let s = read_series(Some(f.path()), Some("volume")).unwrap();
        assert_eq!(s.name, "volume");
        assert_eq!(s.values, vec![1.5, 0.0, 2.0]);
        assert_eq!(s.times.as_deref(), Some(&[0.0, 10.0, 20.0][..]));
        assert_eq!(read_series(Some(f.path()), None).unwrap().values, vec![3.0, 0.0, 7.0]);
        assert_eq!(s.resolution().unwrap(), 10.0);
        assert!(read_series(Some(f.path()), Some("price")).is_err());
        assert!(read_series(Some(f.path()), Some("3")).is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let f = write("1 2\n3\n");
        assert!(read_series(Some(f.path()), None).is_err());
    }
}
