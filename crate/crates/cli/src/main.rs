use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nontidy::cohomology::sw_height;
use nontidy::complex::{build_quotient_model, export_text, ComplexSummary, Resolution};
use nontidy::crystal::{find_odd_involution, torsion_free_certificate};
use nontidy_cli::{emit_report, run_pipeline, Format, Mode, PipelineConfig, PipelineError, MAX_GROUP_DIM};

#[derive(Parser)]
#[command(
    name = "nontidy",
    version,
    about = "Exact checks of height and coindex for the twisted flat manifolds X_n"
)]
struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline and print a report.
    Verify {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "1/4")]
        resolution: Resolution,
        /// group-only, cohomology-only or full; full for dim ≤ 3 by default.
        #[arg(long)]
        mode: Option<Mode>,
        /// json or markdown.
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the torsion-freeness certificate as JSON.
    Torsion {
        #[arg(long)]
        dim: usize,
    },
    /// Decide whether an odd element of order two exists.
    Involution {
        #[arg(long)]
        dim: usize,
    },
    /// Print the height report of the complex model as JSON.
    Cohomology {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "1/4")]
        resolution: Resolution,
    },
    /// Write the complex model as text and print its summary.
    ExportComplex {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "1/4")]
        resolution: Resolution,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_output(bytes: &[u8], out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => io::stdout().write_all(bytes),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Box<dyn std::error::Error>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    io::stdout().write_all(&bytes)?;
    Ok(())
}

fn check_group_dim(dim: usize) -> Result<(), PipelineError> {
    if dim > MAX_GROUP_DIM {
        return Err(PipelineError::InvalidInput(format!(
            "group checks are limited to dimension {MAX_GROUP_DIM}"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Verify {
            dim,
            resolution,
            mode,
            format,
            out,
        } => {
            let config = PipelineConfig {
                dim,
                resolution,
                mode: mode.unwrap_or_else(|| Mode::default_for(dim)),
            };
            let report = run_pipeline(&config)?;
            log::info!("{}", report.conclusion);
            write_output(&emit_report(&report, format)?, out.as_ref())?;
            Ok(report.passed())
        }
        Command::Torsion { dim } => {
            check_group_dim(dim)?;
            let cert = torsion_free_certificate(dim)?;
            let replay = cert.replay();
            if let Err(e) = &replay {
                log::error!("{e}");
            }
            print_json(&cert)?;
            Ok(replay.is_ok() && cert.is_torsion_free())
        }
        Command::Involution { dim } => {
            check_group_dim(dim)?;
            let found = find_odd_involution(dim)?;
            print_json(&json!({ "dim": dim, "odd_involution": found }))?;
            Ok(found.is_none())
        }
        Command::Cohomology { dim, resolution } => {
            if dim == 0 {
                return Err(PipelineError::InvalidInput("dimension must be at least 1".into()).into());
            }
            let model = build_quotient_model(dim, resolution)?;
            let report = sw_height(&model)?;
            print_json(&report)?;
            Ok(report.height == dim)
        }
        Command::ExportComplex { dim, resolution, out } => {
            let model = build_quotient_model(dim, resolution)?;
            fs::write(&out, export_text(&model))?;
            log::info!("wrote {}", out.display());
            print_json(&ComplexSummary::of(&model))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
