use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use goalcomm::harness::{
    grid_cells, parse_config, regenerate_report, run_and_report, single_cells, HarnessError,
    RunConfig,
};
use goalcomm::oracle::oracle_check;

#[derive(Parser)]
#[command(
    name = "goalcomm",
    version,
    about = "Teacher-learner goal communication experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the first configured pairing and schedule for every seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a per-round event log for each cell.
        #[arg(long)]
        verbose: bool,
    },
    /// Run every pairing x schedule x seed cell.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate summary.md from the curve CSVs in a directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the brute-force verification suite.
    OracleCheck,
}

fn load(path: &PathBuf) -> Result<RunConfig, HarnessError> {
    parse_config(&fs::read_to_string(path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            verbose,
        } => load(&config).and_then(|mut c| {
            c.verbose |= verbose;
            let cells = single_cells(&c);
            run_and_report(&c, cells, &out)
                .map(|r| println!("wrote {} runs to {}", r.len(), out.display()))
        }),
        Command::Grid { config, out } => load(&config).and_then(|c| {
            let cells = grid_cells(&c);
            run_and_report(&c, cells, &out)
                .map(|r| println!("wrote {} runs to {}", r.len(), out.display()))
        }),
        Command::Report { input } => regenerate_report(&input).map(|s| {
            println!(
                "summarized {} cells into {}",
                s.len(),
                input.join("summary.md").display()
            )
        }),
        Command::OracleCheck => {
            let report = oracle_check();
            print!("{report}");
            if !report.passed() {
                return ExitCode::FAILURE;
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
