use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csos_cli::config::Suite;
use csos_cli::{registry, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "csos", about = "Identity, spectrum and degeneracy checks for CSOS models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the suites of a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// restrict to these suites (repeatable)
        #[arg(long = "suite")]
        suites: Vec<Suite>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// directory for report.json and degeneracy.csv
        #[arg(long, default_value = "csos-out")]
        out: PathBuf,
    },
    /// Print the statement and anchor of a named identity
    Explain { identity: String },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return code(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match cli.cmd {
        Cmd::Explain { identity } => match registry::explain(&identity) {
            Some(text) => {
                print!("{text}");
                code(0)
            }
            None => {
                eprintln!("unknown identity: {identity}");
                code(EXIT_USAGE)
            }
        },
        Cmd::Run { config, suites, jobs, out } => {
            let cfg = match csos_cli::load_config(&config, &suites) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return code(e.exit_code());
                }
            };
            let report = match csos_cli::run(&cfg, jobs) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return code(e.exit_code());
                }
            };
            if let Err(e) = report.write_files(&out) {
                eprintln!("writing {}: {e}", out.display());
                return code(EXIT_USAGE);
            }
            print!("{}", report.table());
            code(csos_cli::exit_code(&report))
        }
    }
}
