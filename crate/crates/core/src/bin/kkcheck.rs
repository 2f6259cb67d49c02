//! Command-line front end: run named verification suites and emit
//! machine-readable reports.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails its tolerance,
//! 2 usage error, 3 internal consistency error, 4 i/o error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kkcheck_core::error::Error;
use kkcheck_core::report::{run_suite, Group, Suite, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "kkcheck",
    about = "Numerical verification suites for Kaluza-Klein variational models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named check suite.
    Suite {
        /// lie | forms | geometry | fibration | variational | all
        name: String,
        /// u1 | su2 | su3 | u1su2su3
        #[arg(long, default_value = "su2")]
        group: String,
        /// Seed for all randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the per-check default tolerances.
        #[arg(long)]
        tol: Option<f64>,
        /// Sample count for property-style checks.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// json | csv
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Suite {
            name,
            group,
            seed,
            tol,
            samples,
            out,
            format,
        } => {
            let suite = match Suite::parse(&name) {
                Ok(s) => s,
                Err(e) => return usage(&e),
            };
            let group = match Group::parse(&group) {
                Ok(g) => g,
                Err(e) => return usage(&e),
            };
            if format != "json" && format != "csv" {
                return usage(&Error::input(format!("unknown format '{format}'")));
            }
            if let Some(t) = tol {
                if t <= 0.0 {
                    return usage(&Error::input("tolerance must be positive"));
                }
            }
            let cfg = SuiteConfig {
                suite,
                group,
                seed,
                tol,
                samples,
            };
            let report = match run_suite(&cfg) {
                Ok(r) => r,
                Err(e @ Error::Internal(_)) => {
                    eprintln!("{e}");
                    return ExitCode::from(3);
                }
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let body = if format == "csv" {
                report.to_csv()
            } else {
                let mut s = report.to_json();
                s.push('\n');
                s
            };
            let wrote = match &out {
                Some(path) => std::fs::write(path, &body).map_err(Error::from),
                None => std::io::stdout()
                    .write_all(body.as_bytes())
                    .map_err(Error::from),
            };
            if let Err(e) = wrote {
                eprintln!("{e}");
                return ExitCode::from(4);
            }
            for c in &report.checks {
                eprintln!(
                    "{} {}: residual {:.3e} (tol {:.1e})",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.tolerance
                );
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn usage(e: &Error) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(2)
}
