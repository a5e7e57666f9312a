use clap::{Parser, Subcommand};
use duelbandit_cli::{commands, dataset, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Dueling-bandit simulation toolkit: validate and analyze preference
/// matrices, and run seeded regret experiments.
#[derive(Parser)]
#[command(name = "duelbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in datasets.
    List,
    /// Validate a preference-matrix CSV file.
    Validate {
        /// Path to a K x K CSV of win probabilities.
        path: PathBuf,
    },
    /// Print the asymptotic regret bounds of a dataset.
    Analyze {
        /// Built-in dataset name or a CSV path.
        dataset: String,
        /// example1 parameter, strictly inside (0, 1).
        #[arg(long)]
        q: Option<f64>,
        /// arithmetic arm count (2..=11).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Execute the experiment described by a JSON config.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Worker threads (default: DUELBANDIT_THREADS or one per core).
        #[arg(long)]
        threads: Option<usize>,
        /// Also write per-run regret curves next to the aggregated CSVs.
        #[arg(long)]
        verbose_runs: bool,
        /// Echo the parsed config as JSON and exit without running.
        #[arg(long)]
        print_config: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => {
            print!("{}", commands::cmd_list());
            Ok(())
        }
        Command::Validate { path } => {
            println!("{}", commands::cmd_validate(&path)?);
            Ok(())
        }
        Command::Analyze { dataset, q, k } => {
            let spec = dataset::spec_from_cli(&dataset, q, k);
            print!("{}", commands::cmd_analyze(&spec)?);
            Ok(())
        }
        Command::Run {
            config,
            threads,
            verbose_runs,
            print_config,
        } => {
            if print_config {
                println!("{}", commands::cmd_print_config(&config)?);
                return Ok(());
            }
            let outcome = commands::cmd_run(&config, threads, verbose_runs)?;
            for line in &outcome.lines {
                println!("{line}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code() as u8)
        }
    }
}
