use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tvbarrier::experiment::{check_out_dir, outputs, regenerate_table, run_all};
use tvbarrier::RunConfig;
use tvbarrier_core::controller::ControllerKind;

#[derive(Parser)]
#[command(version, about = "Adaptive time-varying barrier control experiments on a two-link arm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the pick-and-place scenario and write traces, metrics and plot data.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated subset of proposed, asmc, ablf.
        #[arg(long, value_delimiter = ',')]
        controllers: Option<Vec<ControllerKind>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid step in seconds.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Parse and validate a config file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regenerate the comparison table from traces in an output directory.
    Table {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, controllers, out, dt, t_end } => {
            let mut cfg = RunConfig::from_path(&config)?;
            if let Some(c) = controllers {
                cfg.run.controllers = c;
            }
            if let Some(o) = out {
                cfg.run.out = o;
            }
            if let Some(dt) = dt {
                cfg.integrator.dt = dt;
            }
            if let Some(t) = t_end {
                cfg.integrator.t_end = t;
            }
            cfg.validate().context("invalid override")?;
            check_out_dir(&cfg.run.out)?;

            let outcomes = run_all(&cfg)?;
            let (files, table) = outputs(&outcomes)?;
            let written = files.write_to(&cfg.run.out)?;
            print!("{table}");
            println!("wrote {} files to {}", written.len(), cfg.run.out.display());
        }
        Command::Validate { config } => {
            let cfg = RunConfig::from_path(&config)?;
            let names: Vec<_> = cfg.run.controllers.iter().map(|k| k.name()).collect();
            println!(
                "{}: ok (controllers {}, dt {} s x {} substeps, t_end {} s)",
                config.display(),
                names.join(","),
                cfg.integrator.dt,
                cfg.integrator.substeps,
                cfg.integrator.t_end
            );
        }
        Command::Table { out } => print!("{}", regenerate_table(&out)?),
    }
    Ok(())
}
