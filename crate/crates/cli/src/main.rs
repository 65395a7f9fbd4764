//! `nahm`: expansions, obstructions and energies from the command line.

mod commands;
mod config;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;
use report::Report;

#[derive(Parser)]
#[command(name = "nahm", version, about = "Nahm pole expansions of self-dual connections on hyperbolic collars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Formal log-series expansion of the geodesic normal family.
    Expand(RunArgs),
    /// Obstruction tensor from the recursion and from the Weyl tensor.
    Obstruction(RunArgs),
    /// Poincaré–Einstein conditions on the metric jets.
    CheckPe(RunArgs),
    /// Integrate the evolution equation from the expansion.
    Evolve(RunArgs),
    /// Laurent coefficients of the truncated energy.
    Energy(RunArgs),
    /// Chern–Simons value of the boundary connection.
    Cs(RunArgs),
    /// List the built-in geometries.
    Presets(OutputArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here; `-` prints it instead of the table.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// t3-flat, s3-hyperbolic, t3-h2 or berger:<lambda>.
    #[arg(long)]
    preset: Option<String>,
    /// h₂ for t3-h2: three diagonal entries or nine row-major entries.
    #[arg(long, allow_hyphen_values = true)]
    h2: Option<String>,
    /// `zero` or nine row-major entries of a symmetric trace-free matrix.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Truncation order (check-pe: number of conditions, 1–3).
    #[arg(long)]
    order: Option<usize>,
    /// Local error tolerance of the integrator.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated cut-offs for the energy fit.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    x_from: Option<f64>,
    #[arg(long)]
    x_to: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let o = Overrides {
            preset: self.preset.clone(),
            h2: self.h2.clone(),
            sigma: self.sigma.clone(),
            order: self.order,
            tol: self.tol,
            t_grid: self.t_grid.clone(),
            t_max: self.t_max,
            x_from: self.x_from,
            x_to: self.x_to,
            json: self.output.json.clone(),
        };
        RunConfig::resolve(self.config.as_deref(), &o)
    }
}

type Handler = fn(&RunConfig) -> Result<Report, CliError>;

fn emit(report: &Report, json: Option<&Path>) -> Result<(), CliError> {
    match json {
        Some(p) if p == Path::new("-") => print!("{}", report.to_json_string()),
        Some(p) => {
            print!("{}", report.table);
            std::fs::write(p, report.to_json_string())?;
        }
        None => print!("{}", report.table),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, f): (&RunArgs, Handler) = match &cli.command {
        Command::Presets(out) => return emit(&commands::presets_cmd(), out.json.as_deref()),
        Command::Expand(a) => (a, commands::expand_cmd),
        Command::Obstruction(a) => (a, commands::obstruction_cmd),
        Command::CheckPe(a) => (a, commands::check_pe_cmd),
        Command::Evolve(a) => (a, commands::evolve_cmd),
        Command::Energy(a) => (a, commands::energy_cmd),
        Command::Cs(a) => (a, commands::cs_cmd),
    };
    let cfg = args.resolve()?;
    let report = f(&cfg)?;
    emit(&report, cfg.json.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
