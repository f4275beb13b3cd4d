use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pam_cli::commands;
use pam_cli::config::ModelConfig;
use pam_cli::output::{emit, Format, Table};
use pam_cli::verify::{self, Suite};
use pam_cli::{exit_code, VERIFY_FAILED};
use pam_core::PamError;

/// Moment bounds, Lyapunov and Hölder exponents, and chaos diagnostics for the
/// parabolic Anderson model.
#[derive(Debug, Parser)]
#[command(name = "pam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Io {
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Overrides `numerics.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// p-th moment bounds on the configured (t, x) grid.
    Bounds(Io),
    /// Lyapunov exponent bound and critical coupling.
    Lyapunov(Io),
    /// Hölder exponents of the solution paths.
    Holder(Io),
    /// Chaos-level quantities at a given order.
    Chaos {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Run the built-in self-check suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the check table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn configure_workers() {
    if let Some(n) = std::env::var("PAM_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load(io: &Io) -> Result<ModelConfig, PamError> {
    let mut cfg = ModelConfig::load(&io.config)?;
    if let Some(seed) = io.seed {
        cfg.numerics.seed = seed;
    }
    Ok(cfg)
}

fn write(table: &Table, io: &Io) -> Result<(), PamError> {
    emit(&table.encode(io.format), io.out.as_deref())
        .map_err(|e| PamError::Config(format!("cannot write output: {e}")))
}

fn run(cli: Cli) -> Result<i32, PamError> {
    match cli.command {
        Command::Bounds(io) => write(&commands::bounds(&load(&io)?)?, &io).map(|_| 0),
        Command::Lyapunov(io) => write(&commands::lyapunov(&load(&io)?)?, &io).map(|_| 0),
        Command::Holder(io) => {
            let table = commands::holder(&load(&io)?)?;
            write(&table, &io)?;
            if io.out.is_some() {
                print!("{}", table.to_pretty());
            }
            Ok(0)
        }
        Command::Chaos { io, order } => {
            if order == 0 {
                return Err(PamError::Config("--order must be at least 1".into()));
            }
            let (table, status) = commands::chaos(&load(&io)?, order)?;
            write(&table, &io)?;
            for line in status {
                if io.out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            seed,
            out,
            format,
        } => {
            let checks = verify::run(suite, seed);
            let table = verify::table(&checks);
            print!("{}", table.to_pretty());
            if let Some(p) = out {
                emit(&table.encode(format), Some(&p))
                    .map_err(|e| PamError::Config(format!("cannot write output: {e}")))?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} passed, {} failed", checks.len(), checks.len() - failed, failed);
            Ok(if failed == 0 { 0 } else { VERIFY_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_workers();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
