use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hcopt_cli::{load, output_dir, run_compare, run_experiment, run_oracle, RunError};

#[derive(Parser)]
#[command(
    name = "hcopt",
    version,
    about = "Run hidden-convexity optimizers from TOML experiment files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method and write traces plus summary.csv.
    Run(Args),
    /// Evaluate methods and policies on common scenarios; writes compare.csv and pairwise.csv.
    Compare(Args),
    /// Check the problem and methods against grid, closed-form, LP and enumeration oracles.
    Oracle(Args),
}

#[derive(clap::Args)]
struct Args {
    config: PathBuf,
    /// Output directory (default: $HCOPT_OUTPUT_ROOT/<output_dir or name>).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cli: Cli) -> Result<PathBuf, RunError> {
    let (Command::Run(a) | Command::Compare(a) | Command::Oracle(a)) = &cli.command;
    let res = load(&a.config)?;
    let dir = output_dir(&res, a.out.as_deref());
    match cli.command {
        Command::Run(_) => {
            let report = run_experiment(&res, &dir)?;
            let failed = report.failures();
            if failed > 0 {
                return Err(RunError::Partial(format!(
                    "{failed} run(s) failed; see {}",
                    dir.join("summary.csv").display()
                )));
            }
        }
        Command::Compare(_) => {
            run_compare(&res, &dir)?;
        }
        Command::Oracle(_) => {
            run_oracle(&res, &dir)?;
        }
    }
    Ok(dir)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
