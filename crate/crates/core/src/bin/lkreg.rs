use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lkreg::engine::Termination;
use lkreg::harness::{self, ExperimentConfig, RawConfig};
use lkreg::Error;

#[derive(Parser)]
#[command(name = "lkreg", version, about = "Landweber-Kaczmarz reconstructions with inexact inner solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Config file with `key = value` lines
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named parameter set (ct-paper, ct-desk, pde-paper, pde-desk)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Noise seed, overriding the config
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Print the admissibility report for a configuration
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Write the tomography system matrix in coordinate format
    ExportMatrix {
        #[command(flatten)]
        source: Source,
        /// Destination file
        #[arg(long, value_name = "PATH", default_value = "matrix.txt")]
        out: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NotPositiveDefinite { .. } | Error::InnerSolver { .. } => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn load(source: &Source) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&source.config, &source.preset) {
        (Some(path), preset) => RawConfig::load(path)?.resolve(preset.as_deref())?,
        (None, Some(name)) => harness::preset(name)?,
        (None, None) => return Err(Error::Config("pass --config or --preset".into())),
    };
    if let Some(seed) = source.seed {
        cfg.seed = seed;
    }
    cfg.check()?;
    Ok(cfg)
}

fn cmd_run(source: &Source, out: &Path) -> Result<u8, Error> {
    let cfg = load(source)?;
    let outcome = harness::run_experiment(&cfg, out)?;
    let s = &outcome.summary;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    let err = s
        .final_rel_error
        .map(|e| format!(", relative error {e:.4}"))
        .unwrap_or_default();
    println!(
        "{}: {:?} after {} iterations ({:.1} s{err}); wrote {}",
        s.name,
        s.terminated_by,
        s.n_final,
        s.elapsed_seconds,
        out.display()
    );
    Ok(if s.terminated_by == Termination::InnerFailure {
        EXIT_SOLVER
    } else {
        0
    })
}

fn cmd_validate(source: &Source) -> Result<u8, Error> {
    let cfg = load(source)?;
    let report = harness::validation_report(&cfg);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

fn cmd_export(source: &Source, out: &Path) -> Result<u8, Error> {
    let cfg = load(source)?;
    let a = harness::export_matrix(&cfg, out)?;
    println!("{} x {} matrix with {} nonzeros written to {}", a.rows(), a.cols(), a.nnz(), out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { source, out } => cmd_run(source, out),
        Command::Validate { source } => cmd_validate(source),
        Command::ExportMatrix { source, out } => cmd_export(source, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
