//! Parameter grids: linear real grids and log-spaced integer grids.

use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Distinct integers log-spaced between `lo` and `hi` (both included) with
/// `per_decade` points per factor of ten before rounding.
pub fn log_spaced_integers(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    if lo == 0 || hi < lo || per_decade == 0 {
        return Vec::new();
    }
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((b - a) * per_decade as f64).round() as usize;
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| {
            let e = if steps == 0 { a } else { a + (b - a) * i as f64 / steps as f64 };
            (10f64.powf(e).round() as usize).clamp(lo, hi)
        })
        .collect();
    out.push(lo);
    out.push(hi);
    out.sort_unstable();
    out.dedup();
    out
}

/// A grid written as `lo:hi:step` (linear) or `lo:hi:xN` (log-spaced, N
/// points per decade). A single number is a one-point grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Linear { lo: f64, hi: f64, step: f64 },
    Log { lo: f64, hi: f64, per_decade: usize },
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| -> Result<f64> {
            p.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number {p:?} in grid {s:?}")))
        };
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Ok(GridSpec::Linear { lo: v, hi: v, step: 1.0 })
            }
            [lo, hi, step] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if hi < lo {
                    invalid!("grid {s:?} has hi < lo");
                }
                if let Some(n) = step.strip_prefix('x') {
                    let per_decade: usize =
                        n.parse().map_err(|_| Error::InvalidArgument(format!("bad points-per-decade in {s:?}")))?;
                    if per_decade == 0 || lo <= 0.0 {
                        invalid!("log grid {s:?} needs lo > 0 and N > 0");
                    }
                    Ok(GridSpec::Log { lo, hi, per_decade })
                } else {
                    let step = num(step)?;
                    if !(step > 0.0) {
                        invalid!("grid {s:?} needs a positive step");
                    }
                    Ok(GridSpec::Linear { lo, hi, step })
                }
            }
            _ => invalid!("grid {s:?} is not of the form lo:hi:step or lo:hi:xN"),
        }
    }
}

impl GridSpec {
    /// Real-valued points. Linear grids are generated as `lo + i·step` so that
    /// e.g. `-4:4:0.25` contains exactly 0.
    pub fn reals(&self) -> Vec<f64> {
        match *self {
            GridSpec::Linear { lo, hi, step } => {
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| lo + i as f64 * step).collect()
            }
            GridSpec::Log { lo, hi, per_decade } => {
                let (a, b) = (lo.log10(), hi.log10());
                let steps = ((b - a) * per_decade as f64).round().max(0.0) as usize;
                (0..=steps)
                    .map(|i| if steps == 0 { lo } else { 10f64.powf(a + (b - a) * i as f64 / steps as f64) })
                    .collect()
            }
        }
    }

    /// Distinct positive integer points.
    pub fn integers(&self) -> Vec<usize> {
        match *self {
            GridSpec::Log { lo, hi, per_decade } => {
                log_spaced_integers(lo.ceil().max(1.0) as usize, hi.floor() as usize, per_decade)
            }
            GridSpec::Linear { .. } => {
                let mut v: Vec<usize> =
                    self.reals().into_iter().filter(|x| *x >= 1.0).map(|x| x.round() as usize).collect();
                v.dedup();
                v
            }
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            GridSpec::Linear { lo, hi, .. } | GridSpec::Log { lo, hi, .. } => (lo, hi),
        }
    }
}
