use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use antipt_cli::config::{parse_config_onto, SweepSpec};
use antipt_cli::eval::has_error_tags;
use antipt_cli::figures::Figure;
use antipt_cli::point;
use antipt_cli::sweep::{run_sweep, SweepError};
use antipt_cli::table::{Format, Table};
use clap::{Args, Parser, Subcommand};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "antipt", version, about = "Anti-PT magnonic Kerr sensor: spectra, steady states, stability and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (key = value with unit suffixes).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; overrides the config.
    #[arg(long)]
    format: Option<Format>,
    /// Seed for the perturbation directions of the ODE oracle.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and numeric eigenvalues at one point.
    Spectrum(Common),
    /// All steady states at one point.
    Steady(Common),
    /// Steady states with Routh–Hurwitz and eigenvalue verdicts.
    Stability(Common),
    /// Parameter sweep over the configured axes.
    Sweep(Common),
    /// Time-domain check of every steady state.
    Dynamics {
        #[command(flatten)]
        common: Common,
        /// Also write a sampled trajectory to this file.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Trajectory length in units of 1/Gamma.
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
    },
    Fig2(Common),
    Fig3a(Common),
    Fig3b(Common),
    Fig3c(Common),
    Fig4(Common),
    Fig5a(Common),
    Fig5b(Common),
}

enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

fn load(common: &Common, base: SweepSpec) -> std::result::Result<SweepSpec, Failure> {
    let mut spec = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::Config)?;
            parse_config_onto(&text, base)
                .with_context(|| format!("in {}", path.display()))
                .map_err(Failure::Config)?
        }
        None => base,
    };
    if let Some(f) = common.format {
        spec.output.format = f;
    }
    if let Some(s) = common.seed {
        spec.output.seed = s;
    }
    if let Some(p) = &common.out {
        spec.output.path = Some(p.display().to_string());
    }
    spec.params.validate().map_err(|e| Failure::Config(e.into()))?;
    Ok(spec)
}

fn write_table(t: &Table, spec: &SweepSpec, path: Option<&str>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {p}"))?);
            t.write(spec.output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            t.write(spec.output.format, &mut w)?;
        }
    }
    Ok(())
}

fn model(e: antipt_core::ModelError) -> Failure {
    Failure::Other(anyhow::Error::new(e))
}

fn run(cli: Cli) -> std::result::Result<u8, Failure> {
    let common = match &cli.command {
        Command::Spectrum(c)
        | Command::Steady(c)
        | Command::Stability(c)
        | Command::Sweep(c)
        | Command::Fig2(c)
        | Command::Fig3a(c)
        | Command::Fig3b(c)
        | Command::Fig3c(c)
        | Command::Fig4(c)
        | Command::Fig5a(c)
        | Command::Fig5b(c) => c.clone(),
        Command::Dynamics { common, .. } => common.clone(),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let figure = match &cli.command {
        Command::Fig2(_) => Some(Figure::Fig2),
        Command::Fig3a(_) => Some(Figure::Fig3a),
        Command::Fig3b(_) => Some(Figure::Fig3b),
        Command::Fig3c(_) => Some(Figure::Fig3c),
        Command::Fig4(_) => Some(Figure::Fig4),
        Command::Fig5a(_) => Some(Figure::Fig5a),
        Command::Fig5b(_) => Some(Figure::Fig5b),
        _ => None,
    };
    let spec = load(&common, figure.map(Figure::base_spec).unwrap_or_default())?;

    let table = if let Some(fig) = figure {
        fig.run(&spec).map_err(model)?
    } else {
        match &cli.command {
            Command::Spectrum(_) => point::spectrum_table(&spec.params).map_err(model)?,
            Command::Steady(_) => point::steady_table(&spec.params).map_err(model)?,
            Command::Stability(_) => point::stability_table(&spec.params).map_err(model)?,
            Command::Sweep(_) => match run_sweep(&spec) {
                Ok(t) => t,
                Err(e @ (SweepError::NoAxis | SweepError::DuplicateAxis(_) | SweepError::Config(_))) => {
                    return Err(Failure::Config(e.into()))
                }
            },
            Command::Dynamics { trajectory, t_max, .. } => {
                if let Some(path) = trajectory {
                    let traj = point::trajectory_table(&spec.params, spec.output.seed, *t_max, 2000).map_err(model)?;
                    write_table(&traj, &spec, Some(&path.display().to_string()))?;
                }
                point::dynamics_table(&spec.params, spec.output.seed).map_err(model)?
            }
            _ => unreachable!(),
        }
    };
    let mut table = table;
    if figure.is_none() && !matches!(cli.command, Command::Sweep(_)) {
        for (k, v) in spec.metadata() {
            table.meta(&k, v);
        }
        table.meta("tool", concat!("antipt ", env!("CARGO_PKG_VERSION")));
        antipt_cli::eval::add_legend(&mut table);
    }
    write_table(&table, &spec, spec.output.path.as_deref())?;
    Ok(if has_error_tags(&table) { EXIT_NUMERICAL } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
