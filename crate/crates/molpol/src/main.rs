//! Command-line interface to the `molpol` library.
//!
//! Exit codes: 0 on success, 2 for configuration and input problems
//! (including usage errors and oversize basis requests), 3 for numerical
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use molpol::config::{preset_names, RunConfig};
use molpol::error::{ConfigError, Error};
use molpol::runner::{self, RunOptions};

#[derive(Parser)]
#[command(
    name = "molpol",
    version,
    about = "Cavity polariton dynamics for molecular ensembles",
    after_help = "Built-in presets: run `molpol run --preset <name>`, or start from \
                  `molpol validate --preset <name>`. Unknown names list the catalog."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the run configuration comes from.
#[derive(Args)]
struct Source {
    /// Path to a run configuration (TOML; `.json` files are read as JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in preset configuration.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory (default: `out/<preset or config stem>`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write `plot.gp`, a gnuplot script for the produced files.
    #[arg(long)]
    plot: bool,
    /// Worker threads for independent sweep points.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every species' vibrational levels and overlap matrices.
    SolveVib(OutputArgs),
    /// Enumerate the symmetric basis and write it with diagonal energies.
    Build(OutputArgs),
    /// Propagate the initial state; write populations and autocorrelation.
    Propagate(OutputArgs),
    /// Compute the broadened absorption spectrum.
    Spectrum(OutputArgs),
    /// Propagate and write the population columns only.
    Populations(OutputArgs),
    /// Sweep golden-rule relaxation rates over ensemble sizes.
    Rates(OutputArgs),
    /// Compare truncated dynamics against the untruncated product engine.
    OracleCompare(OutputArgs),
    /// Check a configuration and report the run it would perform.
    Validate(Source),
    /// Produce the full output bundle a configuration asks for.
    Run(OutputArgs),
}

fn load(source: &Source) -> Result<(RunConfig, String, Option<String>), Error> {
    if let Some(name) = &source.preset {
        let cfg = RunConfig::preset(name)?;
        return Ok((cfg, name.clone(), Some(name.clone())));
    }
    if let Some(path) = &source.config {
        let cfg = RunConfig::from_path(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_owned());
        return Ok((cfg, stem, None));
    }
    Err(Error::Config(ConfigError::Invalid(format!(
        "pass --config <file> or --preset <name>; presets: {}",
        preset_names().join(", ")
    ))))
}

fn options(args: &OutputArgs) -> Result<(RunConfig, RunOptions), Error> {
    let (cfg, name, preset) = load(&args.source)?;
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(&name));
    Ok((
        cfg,
        RunOptions { out_dir, preset, emit_plot: args.plot, jobs: args.jobs },
    ))
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::SolveVib(a) => {
            let (cfg, opts) = options(&a)?;
            runner::solve_vib(&cfg, &opts)
        }
        Command::Build(a) => {
            let (cfg, opts) = options(&a)?;
            runner::build(&cfg, &opts)
        }
        Command::Propagate(a) => {
            let (cfg, opts) = options(&a)?;
            runner::propagate(&cfg, &opts)
        }
        Command::Spectrum(a) => {
            let (cfg, opts) = options(&a)?;
            runner::spectrum(&cfg, &opts)
        }
        Command::Populations(a) => {
            let (cfg, opts) = options(&a)?;
            runner::populations(&cfg, &opts)
        }
        Command::Rates(a) => {
            let (cfg, opts) = options(&a)?;
            runner::rates(&cfg, &opts)
        }
        Command::OracleCompare(a) => {
            let (cfg, opts) = options(&a)?;
            runner::oracle_compare(&cfg, &opts)
        }
        Command::Validate(source) => {
            let (cfg, _, _) = load(&source)?;
            println!("{}", runner::validate(&cfg)?);
            Ok(())
        }
        Command::Run(a) => {
            let (cfg, opts) = options(&a)?;
            runner::full_run(&cfg, &opts)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
