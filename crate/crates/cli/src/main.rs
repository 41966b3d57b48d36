//! `mfitt`: tick data → inter-transaction times / activity bins →
//! deseasonalization → ACF, MFDFA, MFDCCA, ρ_q and heavy-tail fits.

mod commands;
mod input;
mod output;

use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;

#[derive(Debug, Parser)]
#[command(name = "mfitt", version, about = "Multifractal and heavy-tail analysis of trade tick data")]
struct Cli {
    /// Write each result as one JSON object instead of text tables
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of worker threads; results do not depend on it
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trade count, ⟨δt⟩, σ_δt and the null-interval fraction χ
    Stats(StatsArgs),
    /// Inter-transaction times as `t_s,dt_s`
    Itt(IttArgs),
    /// Transaction count, volume and log-return per fixed-width bin
    Bin(BinArgs),
    /// Moving-window mean of a timestamped series
    Rolling(RollingArgs),
    /// Divide out the hour-of-day (and day-of-week) activity pattern
    Deseason(DeseasonArgs),
    /// Autocorrelation function with lags in seconds
    Acf(AcfArgs),
    /// Fluctuation functions, h(q) and the singularity spectrum
    Mfdfa(MfdfaArgs),
    /// Cross fluctuation functions of two aligned series
    Mfdcca(MfdccaArgs),
    /// q-dependent detrended cross-correlation coefficient, static or rolling
    Rho(RhoArgs),
    /// Complementary cumulative distribution with model overlays
    Cdf(CdfArgs),
    /// Maximum-likelihood Weibull and power-law tail fits
    Fit(FitArgs),
    /// Synthetic series with known correlation or distribution
    Synth(SynthArgs),
    /// Random shuffle of a series (destroys temporal structure only)
    Surrogate(SurrogateArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        anyhow::ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let json = cli.json;
    match cli.command {
        Command::Stats(a) => stats(a, json),
        Command::Itt(a) => itt(a, json),
        Command::Bin(a) => bin(a, json),
        Command::Rolling(a) => rolling(a, json),
        Command::Deseason(a) => deseason(a, json),
        Command::Acf(a) => acf(a, json),
        Command::Mfdfa(a) => mfdfa(a, json),
        Command::Mfdcca(a) => mfdcca(a, json),
        Command::Rho(a) => rho(a, json),
        Command::Cdf(a) => cdf(a, json),
        Command::Fit(a) => fit(a, json),
        Command::Synth(a) => synth(a, json),
        Command::Surrogate(a) => surrogate(a, json),
    }
}

/// A closed downstream pipe (`| head`) ends the output early but is not a
/// failure.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c.downcast_ref::<io::Error>().or_else(|| match c.downcast_ref::<mfitt::Error>() {
            Some(mfitt::Error::Io(io)) => Some(io),
            _ => None,
        });
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mfitt: {e:#}");
            ExitCode::FAILURE
        }
    }
}
