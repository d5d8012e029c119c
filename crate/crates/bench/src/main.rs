use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rod_bench::cases::{case_file_text, CASE_NAMES};
use rod_bench::checks::{run_checks, CheckConfig};
use rod_bench::run::{convergence_study, run_case, summary, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "rod", about = "Mixed rod finite element benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a benchmark case and write its artifacts.
    Run {
        /// Case name, or path to a `.rod` model file.
        case: String,
        #[arg(long)]
        mesh: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Output directory; `ROD_OUT` overrides it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh convergence study for a case with an exact centerline.
    Converge {
        case: String,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,80,160")]
        meshes: Vec<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Randomized property checks of the element and solver.
    Check {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the model file of a case.
    Export {
        case: String,
        #[arg(long)]
        mesh: Option<usize>,
    },
    /// List the available cases.
    List,
}

fn exit_code(e: &RunError) -> ExitCode {
    match e {
        RunError::Solve { .. } => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { case, mesh, steps, tol, out } => {
            let out = std::env::var_os("ROD_OUT")
                .map(PathBuf::from)
                .or(out)
                .unwrap_or_else(|| PathBuf::from("out").join(&case));
            let opts = RunOptions { mesh, steps, tol, out: Some(out.clone()) };
            match run_case(&case, &opts) {
                Ok(report) => {
                    print!("{}", summary(&report));
                    println!("artifacts in {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("rod: {e}");
                    exit_code(&e)
                }
            }
        }
        Command::Converge { case, meshes, tol } => {
            let opts = RunOptions { tol, ..Default::default() };
            match convergence_study(&case, &meshes, &opts.config()) {
                Ok(report) => {
                    print!("{}", report.render());
                    match &report.failure {
                        Some((_, e)) => exit_code(e),
                        None => ExitCode::SUCCESS,
                    }
                }
                Err(e) => {
                    eprintln!("rod: {e}");
                    exit_code(&e)
                }
            }
        }
        Command::Check { trials, seed } => {
            let report = run_checks(&CheckConfig { trials, seed });
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Export { case, mesh } => match rod_bench::cases::case(&case, mesh) {
            Ok(c) => {
                print!("{}", case_file_text(&c));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("rod: {e}");
                ExitCode::from(3)
            }
        },
        Command::List => {
            for name in CASE_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}
