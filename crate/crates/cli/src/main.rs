use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use open_moyal::experiments::{self, RunConfig};

#[derive(Parser)]
#[command(name = "open-moyal", version, about = "Free particle in a harmonic reservoir: scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a `key = value` config file.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star-product identities and the dissipation-operator identity.
    Selftest,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let mut cfg = match RunConfig::from_file(&config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(2);
        }
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    match experiments::run(&cfg) {
        Ok(outcome) => {
            for check in &outcome.report.checks {
                println!("{}", check.line());
            }
            for (k, v) in &outcome.report.flags {
                println!("flag {k} = {v}");
            }
            println!("wrote {}", outcome.csv_path.display());
            println!("wrote {}", outcome.report_path.display());
            exit(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code())
        }
    }
}

fn selftest() -> ExitCode {
    match experiments::selftest() {
        Ok(checks) => {
            for check in &checks {
                println!("{}", check.line());
            }
            exit(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out } => run(config, seed, out),
        Command::Selftest => selftest(),
    }
}
