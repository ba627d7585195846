use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lagext::cli::{self, CliError, CocycleSource, Outcome, ReportFormat, EXIT_INPUT};
use lagext::verify::Exec;

#[derive(Parser)]
#[command(name = "lagext", version, about = "Exact Lagrangian extensions of flat Lie algebras")]
struct Args {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms for every block present in FILE.
    Check { file: PathBuf },
    /// Dimensions of the cocycle, coboundary and cohomology spaces.
    Cohomology { file: PathBuf },
    /// Build the Lagrangian extension of the connection in FILE.
    Extend {
        file: PathBuf,
        /// `zero`, `random:SEED` or a spec file with a cocycle block.
        #[arg(long, default_value = "zero")]
        cocycle: CocycleSource,
        /// Add cohomology dimensions to the summary.
        #[arg(long)]
        cohomology: bool,
    },
    /// Symplectic reduction of FILE by the span of the given vectors.
    Reduce {
        file: PathBuf,
        /// Comma-separated vectors, e.g. `e^1,e^2`.
        #[arg(long)]
        ideal: String,
    },
    /// Run every check on every catalog entry.
    VerifyCatalog {
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Verify entries one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// The embedded catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print the catalog in spec format.
    Export,
}

fn load(path: &Path) -> Result<(String, String), CliError> {
    Ok((path.display().to_string(), cli::read_file(path)?))
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Check { file } => {
            let (name, text) = load(&file)?;
            cli::run_check(&name, &text)
        }
        Command::Cohomology { file } => {
            let (name, text) = load(&file)?;
            cli::run_cohomology(&name, &text)
        }
        Command::Extend { file, cocycle, cohomology } => {
            let (name, text) = load(&file)?;
            cli::run_extend(&name, &text, &cocycle, cohomology)
        }
        Command::Reduce { file, ideal } => {
            let (name, text) = load(&file)?;
            cli::run_reduce(&name, &text, &ideal)
        }
        Command::VerifyCatalog { samples, seed, entry, format, sequential } => {
            let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            cli::run_verify_catalog(samples, seed, entry.as_deref(), format, exec)
        }
        Command::Catalog { action: CatalogAction::Export } => Ok(Outcome {
            output: cli::catalog_export().to_string(),
            code: 0,
        }),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match run(args.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.code as u8)
}
