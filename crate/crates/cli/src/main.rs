//! `nlts` - pseudo-spectral simulator and verification harness for the
//! transport equation with nonlocal velocity.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use nlts_cli::commands;
use nlts_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "nlts", version, about = "Nonlocal transport simulator and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a configured run, writing the diagnostics series and snapshots
    Run {
        /// TOML run configuration
        config: PathBuf,
        /// Root for relative output paths (overrides NLTS_OUTPUT_ROOT)
        #[arg(long)]
        output_root: Option<PathBuf>,
        /// Print the fully-populated config and exit
        #[arg(long)]
        echo: bool,
    },
    /// Run diagnostics checks over a recorded series (and snapshots)
    Check {
        /// Series CSV produced by `run`
        series: PathBuf,
        /// Snapshot directory for field-based checks
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// The run configuration (the echo next to the series works)
        #[arg(long)]
        config: PathBuf,
        /// Run every known check
        #[arg(long, conflicts_with = "name")]
        all: bool,
        /// Run one named check (repeatable)
        #[arg(long)]
        name: Vec<String>,
    },
    /// Level-set iteration table over a snapshot directory
    Degiorgi {
        snapshot_dir: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// Superlinear recurrence: one instance or the threshold sweep
    Recurrence {
        #[arg(long = "C")]
        base: f64,
        #[arg(long = "beta")]
        exponent: f64,
        #[arg(long = "W0")]
        start: f64,
        #[arg(long, default_value_t = 200)]
        k_max: usize,
        /// Sweep a 20x20 (C, beta) grid with 10 starts below each threshold
        #[arg(long)]
        grid: bool,
    },
    /// Spectral-operator invariants, including the kernel/Fourier
    /// cross-validation quadratures
    OperatorsSelftest,
    /// Stop time and gradient growth across a list of alpha values
    BlowupScan {
        config: PathBuf,
        /// Comma-separated alpha values
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_root, echo } => {
            let cfg = RunConfig::load(&config)?;
            if echo {
                print!("{}", cfg.echo());
                return Ok(true);
            }
            let summary = commands::run(&cfg, output_root.as_deref(), false)?;
            Ok(summary.failed_checks.is_empty())
        }
        Command::Check { series, snapshots, config, all: _, name } => {
            let cfg = RunConfig::load(&config)?;
            let (verdicts, jsonl) = commands::check(&series, snapshots.as_deref(), &cfg, &name)?;
            println!("{:<22} {:>14} {:>12}  {}", "check", "worst", "tolerance", "verdict");
            let mut all_pass = true;
            for v in &verdicts {
                println!("{}", v.table_row());
                all_pass &= v.pass;
            }
            println!("verdicts: {}", jsonl.display());
            Ok(all_pass)
        }
        Command::Degiorgi { snapshot_dir, alpha, k_max } => {
            let (rows, all_pass) = commands::degiorgi_table(&snapshot_dir, alpha, k_max)?;
            println!(" k     level          t_k            W_k        recurrence bound  verdict");
            let mut jsonl = String::new();
            for row in &rows {
                println!("{}", commands::degiorgi_row_string(row));
                jsonl.push_str(&format!(
                    "{{\"k\":{},\"level\":{},\"t\":{},\"mass\":{},\"pass\":{}}}\n",
                    row.k,
                    row.level,
                    row.t.map(|t| t.to_string()).unwrap_or_else(|| "null".into()),
                    row.mass.map(|m| m.to_string()).unwrap_or_else(|| "null".into()),
                    row.pass
                ));
            }
            let out = snapshot_dir.join("degiorgi.verdicts.jsonl");
            std::fs::write(&out, jsonl).with_context(|| format!("writing {}", out.display()))?;
            Ok(all_pass)
        }
        Command::Recurrence { base, exponent, start, k_max, grid } => {
            let rows = commands::recurrence_table(base, exponent, start, k_max, grid)?;
            println!("C,beta,W0,converged,k_at_underflow");
            let mut all_converged = true;
            for row in &rows {
                println!("{}", row.csv());
                all_converged &= row.converged;
            }
            Ok(all_converged)
        }
        Command::OperatorsSelftest => {
            let lines = commands::operators_selftest()?;
            let mut all_pass = true;
            for line in &lines {
                println!("{}", line.row());
                all_pass &= line.pass;
            }
            Ok(all_pass)
        }
        Command::BlowupScan { config, alphas } => {
            let cfg = RunConfig::load(&config)?;
            let rows = commands::blowup_scan(&cfg, &alphas)?;
            println!("alpha,reason,t_stop,grad_growth");
            for row in &rows {
                println!("{},{},{},{}", row.alpha, row.reason.as_str(), row.t_stop, row.grad_growth);
            }
            Ok(true)
        }
    }
}
