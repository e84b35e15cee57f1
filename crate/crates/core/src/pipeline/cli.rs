//! Argument parsing and dispatch for the `cavityfit` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::commands::{self, Outcome};
use super::{exit_code, resolve_out, EXIT_INPUT, EXIT_OK};
use crate::fit::Weighting;

#[derive(Debug, Parser)]
#[command(name = "cavityfit", version, about = "Cavity-QED lifetime and linewidth analysis")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    /// 1/max(counts, 1)
    Counts,
    /// iteratively re-weighted by the model
    Model,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Counts => Weighting::Counts,
            WeightingArg::Model => Weighting::Model,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an exGaussian to a lifetime histogram (columns t_ns,counts).
    FitLifetime(FitLifetimeArgs),
    /// Fit a Lorentzian to a PLE scan (columns freq_ghz,counts).
    FitPle(FitPleArgs),
    /// Fit decay rate against detuning (delta_nm or delta_ghz, tau_ns, sigma_tau_ns).
    DetuningSeries(DetuningArgs),
    /// Cooperativity from linewidths and the lifetime ratio.
    Cooperativity(CooperativityArgs),
    /// Purcell enhancement from a lifetime ratio or from cavity parameters.
    Purcell(PurcellArgs),
    /// Integrate the master equation and compare with the eliminated rate.
    Simulate(SimulateArgs),
    /// Write a synthetic data set from a spec file.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct FitLifetimeArgs {
    pub input: PathBuf,
    /// Instrument response width, held fixed.
    #[arg(long, default_value_t = crate::fit::DEFAULT_SIGMA_IRF_NS)]
    pub sigma_irf_ns: f64,
    #[arg(long, value_enum, default_value_t = WeightingArg::Model)]
    pub weighting: WeightingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitPleArgs {
    pub input: PathBuf,
    /// Frequency window "lo,hi" in GHz selecting one line.
    #[arg(long, allow_hyphen_values = true)]
    pub window_ghz: Option<String>,
    /// Second scan, fitted in the same window; its width minus this one's is reported.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = WeightingArg::Model)]
    pub weighting: WeightingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetuningArgs {
    pub input: PathBuf,
    /// Cavity linewidth κ/2π in GHz, for the width comparison.
    #[arg(long)]
    pub kappa_ghz: Option<f64>,
    /// Reference wavelength for delta_nm columns.
    #[arg(long)]
    pub lambda_nm: Option<f64>,
    /// Comma-separated 0-based row indices to leave out of the fit.
    #[arg(long)]
    pub exclude: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CooperativityArgs {
    /// Lifetime-limited linewidth γ/2π.
    #[arg(long)]
    pub gamma_mhz: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_gamma_mhz: f64,
    /// Measured total linewidth γ_tot/2π.
    #[arg(long)]
    pub gamma_tot_mhz: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_tot_mhz: f64,
    /// Lifetime ratio τ_off/τ_on.
    #[arg(long)]
    pub ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_ratio: f64,
    /// Recompute C with this total linewidth (e.g. after removing thermal broadening).
    #[arg(long)]
    pub gamma_tot_projected_mhz: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub sigma_tot_projected_mhz: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PurcellArgs {
    /// Measured lifetime ratio τ_off/τ_on (measurement mode).
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub sigma_ratio: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub dw: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Purcell factor F_P (model mode).
    #[arg(long)]
    pub fp: Option<f64>,
    /// Normalized dipole-field overlap.
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub lambda_nm: Option<f64>,
    /// Cavity-emitter detuning in GHz.
    #[arg(long, allow_hyphen_values = true)]
    pub detuning_ghz: Option<f64>,
    /// Fraction of the dipole decay into non-cavity modes.
    #[arg(long)]
    pub open_fraction: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Trajectory CSV; defaults to the report path with .trajectory.csv.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Worker threads for detuning sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Data CSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = args.into_iter().skip(1).collect();
    let (name, result) = match &cli.command {
        Command::FitLifetime(a) => ("fit-lifetime", commands::fit_lifetime(a, argv)),
        Command::FitPle(a) => ("fit-ple", commands::fit_ple(a, argv)),
        Command::DetuningSeries(a) => ("detuning-series", commands::detuning_series(a, argv)),
        Command::Cooperativity(a) => ("cooperativity", commands::cooperativity(a, argv)),
        Command::Purcell(a) => ("purcell", commands::purcell(a, argv)),
        Command::Simulate(a) => ("simulate", commands::simulate(a, argv)),
        Command::Synth(a) => ("synth", commands::synth(a)),
    };
    match result {
        Ok(outcome) => finish(&cli, name, outcome),
        Err(e) => {
            eprintln!("cavityfit {name}: {e}");
            exit_code(&e)
        }
    }
}

fn out_arg(cmd: &Command) -> Option<&std::path::Path> {
    match cmd {
        Command::FitLifetime(a) => a.out.as_deref(),
        Command::FitPle(a) => a.out.as_deref(),
        Command::DetuningSeries(a) => a.out.as_deref(),
        Command::Cooperativity(a) => a.out.as_deref(),
        Command::Purcell(a) => a.out.as_deref(),
        Command::Simulate(a) => a.out.as_deref(),
        Command::Synth(a) => a.out.as_deref(),
    }
}

fn finish(cli: &Cli, name: &str, outcome: Outcome) -> i32 {
    let Some(report) = outcome.report else {
        return outcome.exit;
    };
    let ext = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = resolve_out(out_arg(&cli.command), &format!("{name}.report.{ext}"));
    let written = match cli.format {
        Format::Json => report
            .to_json()
            .and_then(|s| std::fs::write(&path, s).map_err(Into::into)),
        Format::Csv => std::fs::File::create(&path)
            .map_err(Into::into)
            .and_then(|f| report.write_csv(std::io::BufWriter::new(f))),
    };
    if let Err(e) = written {
        eprintln!("cavityfit {name}: writing {}: {e}", path.display());
        return EXIT_INPUT;
    }
    for r in &report.results {
        let unit = if r.unit.is_empty() { String::new() } else { format!(" {}", r.unit) };
        println!("{:<28} {}{unit}", r.name, r.display);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("report: {}", path.display());
    outcome.exit
}
