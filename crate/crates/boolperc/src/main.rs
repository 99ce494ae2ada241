use std::path::PathBuf;
use std::process::ExitCode;

use boolperc::config::{ExperimentConfig, SCHEMA};
use boolperc::experiments::run_file;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "boolperc",
    version,
    about = "Boolean-model percolation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a configuration and print it with defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the configuration schema.
    Schema,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Schema => {
            print!("{SCHEMA}");
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            match ExperimentConfig::load(&config).and_then(|c| c.resolve()) {
                Ok(c) => {
                    print!("{}", c.to_toml_string());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Run {
            config,
            seed,
            out,
            workers,
        } => match run_file(&config, seed, out.as_deref(), workers) {
            Ok(out) => {
                for c in &out.checks {
                    println!(
                        "{} {}: {}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
                println!(
                    "wrote {} files to {}",
                    out.files.len(),
                    out.out_dir.display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
