//! One function per subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use mfitt::acf::{acf as autocorrelation, AcfEstimator, DEFAULT_LAGS_PER_DECADE};
use mfitt::deseason::{deseasonalize, DeseasonMode, SeasonalPattern};
use mfitt::dist::{ecdf_complementary, fit_powerlaw_tail, fit_se_mle, model_overlay, DistKind, DistModel, EcdfCurve};
use mfitt::grid::GridSpec;
use mfitt::mfdcca::{cross_fluctuation, rho_q, rolling_rho};
use mfitt::mfdfa::{
    fit_hurst, fluctuation_surface, singularity_spectrum, FluctuationSurface, GeneralizedHurst, MfdfaConfig,
    DEFAULT_DEGREE,
};
use mfitt::series::{
    bin_ticks, compute_stats, extract_itt, normalize_by_sigma, rolling_stat, RollingStatistic, TimedSamples,
};
use mfitt::synth::{generate, shuffle_surrogate, GeneratorKind, GeneratorSpec};
use serde::Serialize;
use serde_json::json;

use crate::input::{PairInput, Series, SeriesInput, TickInput};
use crate::output::{with_suffix, Run};

const DAY_S: f64 = 86_400.0;
/// Fixed-length "month" of rolling statistics, independent of the calendar.
const MONTH_S: f64 = 30.0 * DAY_S;

fn check_grid(s: &str) -> std::result::Result<String, String> {
    s.parse::<GridSpec>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn grid(s: &str) -> Result<GridSpec> {
    Ok(s.parse::<GridSpec>()?)
}

/// `lo:hi` with numbers such as `1e2:1e5`.
fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let num = |v: &str| -> std::result::Result<usize, String> {
        let x: f64 = v.trim().parse().map_err(|_| format!("bad number {v:?} in {s:?}"))?;
        if !(x >= 1.0 && x.fract() == 0.0) {
            return Err(format!("{v:?} is not a positive integer"));
        }
        Ok(x as usize)
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if hi < lo {
        return Err(format!("range {s:?} has hi < lo"));
    }
    Ok((lo, hi))
}

fn write_columns(out: &mut dyn Write, names: &str, times: Option<&[f64]>, values: &[f64]) -> Result<()> {
    match times {
        Some(t) => {
            writeln!(out, "# t_s,{names}")?;
            for (t, v) in t.iter().zip(values) {
                writeln!(out, "{t},{v}")?;
            }
        }
        None => {
            writeln!(out, "# {names}")?;
            for v in values {
                writeln!(out, "{v}")?;
            }
        }
    }
    Ok(())
}

fn write_pairs(out: &mut dyn Write, rows: &[(&str, String)]) -> Result<()> {
    writeln!(out, "# key,value")?;
    for (k, v) in rows {
        writeln!(out, "{k},{v}")?;
    }
    Ok(())
}

fn load_series(input: &SeriesInput, deseason: Option<DeseasonMode>) -> Result<Series> {
    let s = input.load()?;
    match deseason {
        Some(mode) => s.deseasonalized(mode),
        None => Ok(s),
    }
}

// ---------------------------------------------------------------- stats, itt

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ticks: TickInput,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct StatsReport {
    trades: usize,
    first_timestamp_s: f64,
    last_timestamp_s: f64,
    /// Number of inter-transaction intervals.
    #[serde(rename = "T")]
    t: usize,
    mean_dt_s: f64,
    std_dt_s: f64,
    chi: f64,
}

pub fn stats(args: StatsArgs, json: bool) -> Result<()> {
    let run = Run::new("stats", &args, json)?;
    let ticks = args.ticks.load()?;
    let itt = extract_itt::<f64>(&ticks)?;
    let st = compute_stats(&itt.values)?;
    let report = StatsReport {
        trades: ticks.len(),
        first_timestamp_s: ticks.records[0].timestamp.as_secs_f64(),
        last_timestamp_s: ticks.records[ticks.len() - 1].timestamp.as_secs_f64(),
        t: st.count,
        mean_dt_s: st.mean,
        std_dt_s: st.std,
        chi: st.zero_fraction,
    };
    run.emit(args.out.as_deref(), &report, |out| {
        write_pairs(
            out,
            &[
                ("trades", report.trades.to_string()),
                ("first_timestamp_s", report.first_timestamp_s.to_string()),
                ("last_timestamp_s", report.last_timestamp_s.to_string()),
                ("T", report.t.to_string()),
                ("mean_dt_s", report.mean_dt_s.to_string()),
                ("std_dt_s", report.std_dt_s.to_string()),
                ("chi", report.chi.to_string()),
            ],
        )
    })
}

#[derive(Debug, Args, Serialize)]
pub struct IttArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ticks: TickInput,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn itt(args: IttArgs, json: bool) -> Result<()> {
    let run = Run::new("itt", &args, json)?;
    let itt = extract_itt::<f64>(&args.ticks.load()?)?;
    run.emit(args.out.as_deref(), &itt, |out| write_columns(out, "dt_s", Some(&itt.times), &itt.values))
}

// ------------------------------------------------------------- bin, rolling

#[derive(Debug, Args, Serialize)]
pub struct BinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ticks: TickInput,
    /// Bin width Δt in seconds
    #[arg(long, default_value_t = 10.0)]
    dt: f64,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn bin(args: BinArgs, json: bool) -> Result<()> {
    let run = Run::new("bin", &args, json)?;
    let binned = bin_ticks::<f64>(&args.ticks.load()?, args.dt)?;
    run.emit(args.out.as_deref(), &binned, |out| Ok(binned.write_text(out)?))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Statistic {
    Mean,
    MeanAbs,
}

#[derive(Debug, Args, Serialize)]
pub struct RollingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    #[arg(long, value_enum, default_value_t = Statistic::Mean)]
    stat: Statistic,
    /// Window length in seconds (30 days by default)
    #[arg(long, default_value_t = MONTH_S)]
    window: f64,
    /// Window step in seconds (one day by default)
    #[arg(long, default_value_t = DAY_S)]
    step: f64,
    /// Sampling interval in seconds [default: smallest positive timestamp spacing]
    #[arg(long)]
    resolution: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn rolling(args: RollingArgs, json: bool) -> Result<()> {
    let mut run = Run::new("rolling", &args, json)?;
    let s = args.series.load()?;
    run.set("series", &s.name)?;
    let resolution = match args.resolution {
        Some(r) => r,
        None => s.resolution()?,
    };
    let step = args.step;
    run.set("resolution", resolution)?;
    let statistic = match args.stat {
        Statistic::Mean => RollingStatistic::Mean,
        Statistic::MeanAbs => RollingStatistic::MeanAbs,
    };
    let input = TimedSamples { times: s.times("rolling statistics")?, values: &s.values, resolution };
    let r = rolling_stat(input, statistic, args.window, step)?;
    let label = match args.stat {
        Statistic::Mean => "mean",
        Statistic::MeanAbs => "mean_abs",
    };
    run.emit(args.out.as_deref(), &r, |out| Ok(r.write_text(out, label, &s.name)?))
}

// ------------------------------------------------------------------ deseason

#[derive(Debug, Args, Serialize)]
pub struct DeseasonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    /// daily or daily+weekly
    #[arg(long, default_value = "daily+weekly")]
    mode: DeseasonMode,
    /// Write the estimated pattern to PREFIX.daily.txt and PREFIX.weekly.txt
    #[arg(long, value_name = "PREFIX")]
    patterns_out: Option<PathBuf>,
    /// Apply the pattern stored under PREFIX instead of estimating it
    #[arg(long, value_name = "PREFIX", conflicts_with = "patterns_out")]
    patterns_in: Option<PathBuf>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn read_pattern(prefix: &Path, mode: DeseasonMode) -> Result<SeasonalPattern<f64>> {
    let open = |name: &str| -> Result<_> {
        let path = with_suffix(Some(prefix), name).unwrap();
        crate::input::open_input(Some(&path))
    };
    let daily = SeasonalPattern::read_daily(open("daily.txt")?).context("reading the daily pattern")?;
    let weekly = match mode {
        DeseasonMode::Daily => None,
        DeseasonMode::DailyWeekly => {
            Some(SeasonalPattern::read_weekly(open("weekly.txt")?).context("reading the weekly pattern")?)
        }
    };
    Ok(SeasonalPattern { daily, weekly })
}

pub fn deseason(args: DeseasonArgs, json: bool) -> Result<()> {
    let mut run = Run::new("deseason", &args, json)?;
    let s = args.series.load()?;
    run.set("series", &s.name)?;
    let times = s.times("deseasonalization")?;
    let pattern = match &args.patterns_in {
        Some(prefix) => read_pattern(prefix, args.mode)?,
        None => SeasonalPattern::estimate(&s.values, times, args.mode)?,
    };
    let values = deseasonalize(&s.values, times, &pattern, args.mode)?;
    if let Some(prefix) = &args.patterns_out {
        let path = with_suffix(Some(prefix), "daily.txt");
        run.emit(path.as_deref(), &pattern.daily, |out| Ok(pattern.write_daily(out)?))?;
        if pattern.weekly.is_some() {
            let path = with_suffix(Some(prefix), "weekly.txt");
            run.emit(path.as_deref(), &pattern.weekly, |out| Ok(pattern.write_weekly(out)?))?;
        }
    }
    let result = json!({ "pattern": pattern, "times": times, "values": values });
    run.emit(args.out.as_deref(), &result, |out| write_columns(out, &s.name, Some(times), &values))
}

// ----------------------------------------------------------------------- acf

#[derive(Debug, Args, Serialize)]
pub struct AcfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    /// Deseasonalize first: daily or daily+weekly
    #[arg(long)]
    deseason: Option<DeseasonMode>,
    /// Lag grid, lo:hi:step or lo:hi:xN [default: 1:N/10:x25]
    #[arg(long, value_parser = check_grid)]
    lags: Option<String>,
    /// standard (mean-subtracted) or raw
    #[arg(long, default_value = "standard")]
    estimator: AcfEstimator,
    /// Seconds per lag step [default: mean timestamp spacing, or 1]
    #[arg(long)]
    lag_seconds: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn acf(args: AcfArgs, json: bool) -> Result<()> {
    let mut run = Run::new("acf", &args, json)?;
    let s = load_series(&args.series, args.deseason)?;
    run.set("series", &s.name)?;
    let lags = match &args.lags {
        Some(g) => grid(g)?.integers(),
        None => {
            let max = s.values.len() / 10;
            ensure!(max >= 1, "series of {} samples is too short for the default lag grid", s.values.len());
            GridSpec::Log { lo: 1.0, hi: max as f64, per_decade: DEFAULT_LAGS_PER_DECADE }.integers()
        }
    };
    let lag_seconds = args.lag_seconds.or_else(|| s.mean_spacing()).unwrap_or(1.0);
    run.set("lags", &lags)?;
    run.set("lag_seconds", lag_seconds)?;
    let r = autocorrelation(&s.values, &lags, args.estimator, lag_seconds)?;
    run.emit(args.out.as_deref(), &r, |out| Ok(r.write_text(out)?))
}

// ------------------------------------------------------------ mfdfa, mfdcca

#[derive(Debug, Args, Serialize)]
struct ScaleArgs {
    /// q grid
    #[arg(long, default_value = "-4:4:0.25", value_parser = check_grid, allow_hyphen_values = true)]
    q: String,
    /// Scale grid in samples [default: s_min:N/10:x20]
    #[arg(long, value_parser = check_grid)]
    scales: Option<String>,
    /// Detrending polynomial degree
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    degree: usize,
}

impl ScaleArgs {
    fn config(&self, values: &[f64]) -> Result<MfdfaConfig<f64>> {
        let base = match &self.scales {
            Some(g) => MfdfaConfig::default().with_degree(self.degree).with_scale_grid(&grid(g)?),
            None => MfdfaConfig::for_series(values, self.degree)?,
        };
        let config = base.with_q(&grid(&self.q)?.reals());
        config.validate(values.len())?;
        Ok(config)
    }
}

fn fit_range(requested: Option<(usize, usize)>, config: &MfdfaConfig<f64>) -> (usize, usize) {
    requested.unwrap_or((config.scales[0], *config.scales.last().unwrap()))
}

#[derive(Debug, Args, Serialize)]
pub struct MfdfaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    /// Deseasonalize first: daily or daily+weekly
    #[arg(long)]
    deseason: Option<DeseasonMode>,
    #[command(flatten)]
    #[serde(flatten)]
    scales: ScaleArgs,
    /// Scale range of the power-law fit, lo:hi [default: the whole scale grid]
    #[arg(long, value_parser = parse_range)]
    fit: Option<(usize, usize)>,
    /// Write PREFIX.surface.txt, PREFIX.hq.txt and PREFIX.falpha.txt
    /// (PREFIX.json with --json) [default: all to stdout]
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
}

pub fn mfdfa(args: MfdfaArgs, json: bool) -> Result<()> {
    let mut run = Run::new("mfdfa", &args, json)?;
    let s = load_series(&args.series, args.deseason)?;
    run.set("series", &s.name)?;
    let config = args.scales.config(&s.values)?;
    let range = fit_range(args.fit, &config);
    run.set("q_grid", &config.q_grid)?;
    run.set("scales", &config.scales)?;
    run.set("fit", range)?;
    run.set("variance_floor", config.variance_floor)?;
    run.set("samples", s.values.len())?;

    let surface = fluctuation_surface(&s.values, &config)?;
    let hurst = fit_hurst(&surface, range)?;
    let spectrum = if hurst.q_grid.len() >= 3 { Some(singularity_spectrum(&hurst)?) } else { None };

    let prefix = args.out.as_deref();
    if json {
        let result = json!({ "surface": surface, "hurst": hurst, "spectrum": spectrum });
        return run.emit(with_suffix(prefix, "json").as_deref(), &result, |_| Ok(()));
    }
    let emit_text = |out: &mut dyn Write| -> Result<()> {
        surface.write_text(&mut *out)?;
        hurst.write_text(&mut *out)?;
        if let Some(sp) = &spectrum {
            sp.write_text(&mut *out)?;
        }
        Ok(())
    };
    match prefix {
        None => run.emit(None, &(), emit_text),
        Some(_) => {
            run.emit(with_suffix(prefix, "surface.txt").as_deref(), &(), |out| Ok(surface.write_text(out)?))?;
            run.emit(with_suffix(prefix, "hq.txt").as_deref(), &(), |out| Ok(hurst.write_text(out)?))?;
            match &spectrum {
                Some(sp) => run.emit(with_suffix(prefix, "falpha.txt").as_deref(), &(), |out| Ok(sp.write_text(out)?)),
                None => Ok(()),
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MfdccaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pair: PairInput,
    /// Deseasonalize both series first: daily or daily+weekly
    #[arg(long)]
    deseason: Option<DeseasonMode>,
    #[command(flatten)]
    #[serde(flatten)]
    scales: ScaleArgs,
    /// Scale range of the power-law fit, lo:hi [default: the whole scale grid]
    #[arg(long, value_parser = parse_range)]
    fit: Option<(usize, usize)>,
    /// Write PREFIX.surface.txt and PREFIX.lambda.txt (PREFIX.json with --json)
    #[arg(long, value_name = "PREFIX")]
    out: Option<PathBuf>,
}

fn load_pair(pair: &PairInput, deseason: Option<DeseasonMode>) -> Result<(Series, Series)> {
    let (x, y) = pair.load()?;
    match deseason {
        Some(mode) => Ok((x.deseasonalized(mode)?, y.deseasonalized(mode)?)),
        None => Ok((x, y)),
    }
}

/// Scaling exponents λ(q) of `|F_q^XY(s)|`; NaN for q whose cross function
/// changes sign inside the fit range.
fn cross_exponents(surface: &FluctuationSurface<f64>, range: (usize, usize)) -> Result<GeneralizedHurst<f64>> {
    let inside: Vec<usize> =
        (0..surface.scales.len()).filter(|&i| (range.0..=range.1).contains(&surface.scales[i])).collect();
    let sign_changes: Vec<bool> = (0..surface.q_grid.len())
        .map(|qi| {
            let row = surface.row(qi);
            let first = row[inside[0]].signum();
            inside.iter().any(|&i| row[i].signum() != first || row[i] == 0.0)
        })
        .collect();
    let magnitude =
        FluctuationSurface { f: surface.f.iter().map(|v| v.abs().max(f64::MIN_POSITIVE)).collect(), ..surface.clone() };
    let mut lambda = fit_hurst(&magnitude, range)?;
    for (qi, changes) in sign_changes.iter().enumerate() {
        if *changes {
            lambda.h[qi] = f64::NAN;
            lambda.fit_r2[qi] = f64::NAN;
        }
    }
    Ok(lambda)
}

pub fn mfdcca(args: MfdccaArgs, json: bool) -> Result<()> {
    let mut run = Run::new("mfdcca", &args, json)?;
    let (x, y) = load_pair(&args.pair, args.deseason)?;
    let config = args.scales.config(&x.values)?;
    let range = fit_range(args.fit, &config);
    run.set("q_grid", &config.q_grid)?;
    run.set("scales", &config.scales)?;
    run.set("fit", range)?;
    run.set("pair", [&x.name, &y.name])?;
    run.set("samples", x.values.len())?;
    let surface = cross_fluctuation(&x.values, &y.values, &config)?;
    ensure!(
        surface.scales.iter().filter(|&&s| (range.0..=range.1).contains(&s)).count() >= 4,
        "fit range {}:{} contains fewer than 4 scales",
        range.0,
        range.1
    );
    let lambda = cross_exponents(&surface, range)?;
    let prefix = args.out.as_deref();
    if json {
        let result = json!({ "surface": surface, "lambda": lambda });
        return run.emit(with_suffix(prefix, "json").as_deref(), &result, |_| Ok(()));
    }
    match prefix {
        None => run.emit(None, &(), |out| {
            surface.write_text(&mut *out)?;
            Ok(lambda.write_text(&mut *out)?)
        }),
        Some(_) => {
            run.emit(with_suffix(prefix, "surface.txt").as_deref(), &(), |out| Ok(surface.write_text(out)?))?;
            run.emit(with_suffix(prefix, "lambda.txt").as_deref(), &(), |out| Ok(lambda.write_text(out)?))
        }
    }
}

// ----------------------------------------------------------------------- rho

#[derive(Debug, Args, Serialize)]
pub struct RhoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pair: PairInput,
    /// Deseasonalize both series first: daily or daily+weekly
    #[arg(long)]
    deseason: Option<DeseasonMode>,
    /// q grid (a single q in rolling mode)
    #[arg(long, default_value = "2", value_parser = check_grid, allow_hyphen_values = true)]
    q: String,
    /// Scale grid in samples [default: s_min:N/10:x20]
    #[arg(long, value_parser = check_grid)]
    scales: Option<String>,
    /// Detrending polynomial degree
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    degree: usize,
    /// Rolling mode: window length in seconds
    #[arg(long)]
    window: Option<f64>,
    /// Rolling mode: window step in seconds [default: one day]
    #[arg(long, requires = "window")]
    step: Option<f64>,
    /// Rolling mode: scale in samples
    #[arg(long, requires = "window", conflicts_with = "scale_seconds")]
    scale: Option<usize>,
    /// Rolling mode: scale in seconds, converted with the sampling resolution
    #[arg(long, requires = "window")]
    scale_seconds: Option<f64>,
    /// Sampling interval in seconds [default: smallest positive timestamp spacing]
    #[arg(long)]
    resolution: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn rho(args: RhoArgs, json: bool) -> Result<()> {
    let mut run = Run::new("rho", &args, json)?;
    let (x, y) = load_pair(&args.pair, args.deseason)?;
    let labels = (x.name.as_str(), y.name.as_str());
    run.set("pair", [labels.0, labels.1])?;
    let q_grid = grid(&args.q)?.reals();

    let Some(window) = args.window else {
        let scales = ScaleArgs { q: args.q.clone(), scales: args.scales.clone(), degree: args.degree };
        let config = scales.config(&x.values)?;
        run.set("scales", &config.scales)?;
        let results = rho_q(&x.values, &y.values, &config)?;
        return run.emit(args.out.as_deref(), &results, |out| {
            for r in &results {
                r.write_text(&mut *out, labels)?;
            }
            Ok(())
        });
    };

    ensure!(q_grid.len() == 1, "rolling mode takes a single q, got {}", q_grid.len());
    let times = x.times("rolling rho")?;
    let resolution = match args.resolution {
        Some(r) => r,
        None => x.resolution()?,
    };
    let scale = match (args.scale, args.scale_seconds) {
        (Some(s), _) => s,
        (None, Some(secs)) => (secs / resolution).round() as usize,
        (None, None) => bail!("rolling mode needs --scale or --scale-seconds"),
    };
    let step = args.step.unwrap_or(DAY_S);
    run.set("resolution", resolution)?;
    run.set("scale_samples", scale)?;
    run.set("step", step)?;
    let r = rolling_rho(&x.values, &y.values, times, resolution, q_grid[0], scale, args.degree, window, step)?;
    run.emit(args.out.as_deref(), &r, |out| Ok(r.write_text(out, labels)?))
}

// ------------------------------------------------------------------ cdf, fit

/// `guide`, `exp[:X0]`, `se:ALPHA[:X0]` or `pl:BETA[:XMIN]`.
fn parse_models(s: &str) -> std::result::Result<Vec<DistModel<f64>>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> std::result::Result<Option<f64>, String> {
        parts.get(i).map(|v| v.parse::<f64>().map_err(|_| format!("bad number {v:?} in {s:?}"))).transpose()
    };
    let model = match parts[0] {
        "guide" if parts.len() == 1 => return Ok(DistModel::guide_set()),
        "exp" if parts.len() <= 2 => DistModel::exponential(num(1)?),
        "se" if (2..=3).contains(&parts.len()) => DistModel::stretched_exponential(num(1)?.unwrap(), num(2)?),
        "pl" if (2..=3).contains(&parts.len()) => DistModel::power_law(num(1)?.unwrap(), num(2)?),
        _ => return Err(format!("unknown model {s:?}; expected guide, exp[:X0], se:ALPHA[:X0] or pl:BETA[:XMIN]")),
    };
    model.validate().map_err(|e| e.to_string())?;
    Ok(vec![model])
}

fn model_label(m: &DistModel<f64>) -> String {
    match m.kind {
        DistKind::PowerLaw => format!("pl(beta={})", m.beta.unwrap()),
        DistKind::Exponential => "exp".to_string(),
        _ => format!("se(alpha={})", m.alpha.unwrap()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CdfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    /// Divide the values by their standard deviation first
    #[arg(long)]
    normalize: bool,
    /// Keep at most this many points, spaced evenly in log probability
    #[arg(long, default_value_t = 500)]
    max_points: usize,
    /// Model curves: guide, exp[:X0], se:ALPHA[:X0], pl:BETA[:XMIN] (repeatable)
    #[arg(long, value_parser = parse_models)]
    #[serde(skip)]
    overlay: Vec<Vec<DistModel<f64>>>,
    /// Quantile at which models without a scale are pinned to the data
    #[arg(long, default_value_t = 0.5)]
    anchor: f64,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Overlay {
    label: String,
    model: DistModel<f64>,
    ccdf: Vec<f64>,
}

pub fn cdf(args: CdfArgs, json: bool) -> Result<()> {
    let mut run = Run::new("cdf", &args, json)?;
    let models: Vec<DistModel<f64>> = args.overlay.iter().flatten().copied().collect();
    run.set("overlay", &models)?;
    let s = args.series.load()?;
    run.set("series", &s.name)?;
    let values = if args.normalize { normalize_by_sigma(&s.values)? } else { s.values };
    let full = ecdf_complementary(&values)?;
    let curve: EcdfCurve<f64> = full.log_downsample(args.max_points);
    let overlays = models
        .iter()
        .map(|m| {
            let ccdf = model_overlay(m, &curve.x, Some(&full), Some(args.anchor))
                .with_context(|| format!("overlay {}", model_label(m)))?;
            Ok(Overlay { label: model_label(m), model: *m, ccdf })
        })
        .collect::<Result<Vec<_>>>()?;
    let result = json!({ "ecdf": curve, "overlays": overlays });
    run.emit(args.out.as_deref(), &result, |out| {
        writeln!(out, "# n={}", curve.n)?;
        write!(out, "# x,p")?;
        for o in &overlays {
            write!(out, ",{}", o.label)?;
        }
        writeln!(out)?;
        for (i, (x, p)) in curve.x.iter().zip(&curve.p).enumerate() {
            write!(out, "{x},{p}")?;
            for o in &overlays {
                write!(out, ",{}", o.ccdf[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FitModel {
    Se,
    Pl,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    /// Divide the values by their standard deviation first
    #[arg(long)]
    normalize: bool,
    /// se (Weibull MLE), pl (power-law tail) or both
    #[arg(long, value_enum, default_value_t = FitModel::Both)]
    model: FitModel,
    /// Lower bound of the power-law tail [default: KS search]
    #[arg(long)]
    xmin: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn fit(args: FitArgs, json: bool) -> Result<()> {
    let mut run = Run::new("fit", &args, json)?;
    let s = args.series.load()?;
    run.set("series", &s.name)?;
    let values = if args.normalize { normalize_by_sigma(&s.values)? } else { s.values };
    let se = match args.model {
        FitModel::Se | FitModel::Both => Some(fit_se_mle(&values)?),
        FitModel::Pl => None,
    };
    let pl = match args.model {
        FitModel::Pl | FitModel::Both => Some(fit_powerlaw_tail(&values, args.xmin)?),
        FitModel::Se => None,
    };
    let mut rows: Vec<(&str, String)> = vec![("samples", values.len().to_string())];
    if let Some(f) = &se {
        rows.extend([
            ("se_kind", format!("{:?}", f.model.kind)),
            ("se_alpha", f.model.alpha.unwrap().to_string()),
            ("se_x0", f.model.x0.unwrap().to_string()),
            ("se_log_likelihood", f.log_likelihood.to_string()),
            ("se_converged", f.converged.to_string()),
            ("se_iterations", f.iterations.to_string()),
            ("se_n_used", f.n_used.to_string()),
            ("se_excluded_zero_fraction", f.excluded_fraction.to_string()),
        ]);
    }
    if let Some(f) = &pl {
        rows.extend([
            ("pl_beta", f.model.beta.unwrap().to_string()),
            ("pl_x_min", f.model.x_min.unwrap().to_string()),
            ("pl_x_min_searched", f.x_min_searched.to_string()),
            ("pl_ks_distance", f.ks_distance.to_string()),
            ("pl_tail_count", f.tail_count.to_string()),
        ]);
    }
    let result = json!({ "samples": values.len(), "se": se, "powerlaw": pl });
    run.emit(args.out.as_deref(), &result, |out| write_pairs(out, &rows))
}

// --------------------------------------------------------- synth, surrogate

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    /// Fractional Gaussian noise (--hurst)
    Fgn,
    /// Binomial multiplicative cascade (--p, --levels)
    Cascade,
    /// Weibull renewal intervals (--alpha, --x0)
    Weibull,
    /// Pareto samples (--beta, --xmin)
    Pareto,
    /// Gaussian AR(1) (--phi)
    Ar1,
    /// Gaussian white noise
    White,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of samples (implied by --levels for a cascade)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    x0: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    xmin: f64,
    #[arg(long)]
    phi: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn required<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.with_context(|| format!("--kind {kind} needs {flag}"))
}

impl SynthArgs {
    fn spec(&self) -> Result<GeneratorSpec> {
        if let Kind::Cascade = self.kind {
            let levels = required(self.levels, "--levels", "cascade")?;
            let spec = GeneratorSpec::cascade(required(self.p, "--p", "cascade")?, levels, self.seed);
            if let Some(n) = self.n {
                ensure!(n == spec.length, "--n {n} disagrees with 2^{levels} = {}", spec.length);
            }
            spec.validate()?;
            return Ok(spec);
        }
        let kind = match self.kind {
            Kind::Fgn => GeneratorKind::Fgn { hurst: required(self.hurst, "--hurst", "fgn")? },
            Kind::Weibull => {
                GeneratorKind::WeibullRenewal { alpha: required(self.alpha, "--alpha", "weibull")?, x0: self.x0 }
            }
            Kind::Pareto => GeneratorKind::Pareto { beta: required(self.beta, "--beta", "pareto")?, x_min: self.xmin },
            Kind::Ar1 => GeneratorKind::Ar1 { phi: required(self.phi, "--phi", "ar1")? },
            Kind::White => GeneratorKind::White,
            Kind::Cascade => unreachable!(),
        };
        let spec = GeneratorSpec::new(kind, required(self.n, "--n", "this generator")?, self.seed);
        spec.validate()?;
        Ok(spec)
    }
}

pub fn synth(args: SynthArgs, json: bool) -> Result<()> {
    let spec = args.spec()?;
    let run = Run::new("synth", &spec, json)?;
    let values: Vec<f64> = generate(&spec)?;
    let result = json!({ "spec": spec, "values": values });
    run.emit(args.out.as_deref(), &result, |out| write_columns(out, &spec.kind.to_string(), None, &values))
}

#[derive(Debug, Args, Serialize)]
pub struct SurrogateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    series: SeriesInput,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file [default: stdout]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn surrogate(args: SurrogateArgs, json: bool) -> Result<()> {
    let mut run = Run::new("surrogate", &args, json)?;
    let s = args.series.load()?;
    run.set("series", &s.name)?;
    let shuffled = shuffle_surrogate(&s.values, args.seed);
    let result = json!({ "times": s.times, "values": shuffled });
    run.emit(args.out.as_deref(), &result, |out| write_columns(out, &s.name, s.times.as_deref(), &shuffled))
}
