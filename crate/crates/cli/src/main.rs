//! `momentbc`: truncated moment problems from the command line.
//!
//! Every command reads one JSON document and writes JSON (default) or CSV. Exit status is 0 on
//! success, 1 when a library precondition fails, 2 for malformed input and 3 for I/O errors.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use momentbc::determinacy::Problem;
use momentbc::{Backend, Rational};

use crate::commands::{Doc, KernelArgs};
use crate::io::{
    document_backend, parse_err, read_document, write_output, CliError, CliResult, Output,
};

#[derive(Parser)]
#[command(
    name = "momentbc",
    version,
    about = "Truncated moment problems via boundary control"
)]
struct Cli {
    /// Arithmetic backend; overrides a `backend` field in the input.
    #[arg(long, global = true, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Acceptance tolerance for `roundtrip` and the kernel-form agreement check.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Hamburger,
    Stieltjes,
}

#[derive(Subcommand)]
enum Command {
    /// Hankel positivity through the given order.
    Check {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Moments to response vector, or back with `--inverse`.
    Transform {
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Connecting, companion and response operators.
    Operators {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// N-atom solution matching s_0..s_{2N-1}.
    Solve {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Forward simulation of the Jacobi dynamics.
    Simulate {
        input: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        /// Widened lattice instead of the Dirichlet condition at n = N+1.
        #[arg(long)]
        open: bool,
    },
    /// Reproducing kernel and Christoffel function.
    Kernel {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        /// Evaluate on a square lattice instead of a single point.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value = "-2", allow_hyphen_values = true)]
        grid_min: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        grid_max: String,
        #[arg(long, default_value_t = 9)]
        grid_steps: usize,
    },
    /// Finite-order determinacy table.
    Determinacy {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ProblemArg::Hamburger)]
        problem: ProblemArg,
        #[arg(long)]
        tmax: Option<usize>,
    },
    /// Simulate, transform, solve and compare against the direct spectral data.
    Roundtrip {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse()
}

impl Command {
    fn input(&self) -> &PathBuf {
        match self {
            Command::Check { input, .. }
            | Command::Transform { input, .. }
            | Command::Operators { input, .. }
            | Command::Solve { input, .. }
            | Command::Simulate { input, .. }
            | Command::Kernel { input, .. }
            | Command::Determinacy { input, .. }
            | Command::Roundtrip { input, .. } => input,
        }
    }
}

macro_rules! dispatch {
    ($backend:expr, $f:ident ( $($arg:expr),* )) => {
        match $backend {
            Backend::Float => commands::$f::<f64>($($arg),*),
            Backend::Rational => commands::$f::<Rational>($($arg),*),
        }
    };
}

fn execute(cli: &Cli, doc: &Doc, backend: Backend) -> CliResult<Output> {
    match &cli.command {
        Command::Check { order, .. } => dispatch!(backend, check(doc, *order)),
        Command::Transform { inverse, .. } => dispatch!(backend, transform(doc, *inverse)),
        Command::Operators { order, .. } => dispatch!(backend, operators(doc, *order)),
        Command::Solve { order, .. } => dispatch!(backend, solve(doc, *order)),
        Command::Simulate { horizon, open, .. } => {
            dispatch!(backend, simulate_cmd(doc, *horizon, *open))
        }
        Command::Kernel {
            order,
            z,
            lambda,
            grid,
            grid_min,
            grid_max,
            grid_steps,
            ..
        } => {
            let args = KernelArgs {
                order: *order,
                z: z.clone(),
                lambda: lambda.clone(),
                grid: grid.then(|| (grid_min.clone(), grid_max.clone(), *grid_steps)),
                tol: cli.tol,
            };
            dispatch!(backend, kernel(doc, &args))
        }
        Command::Determinacy { problem, tmax, .. } => {
            let problem = match problem {
                ProblemArg::Hamburger => Problem::Hamburger,
                ProblemArg::Stieltjes => Problem::Stieltjes,
            };
            dispatch!(backend, determinacy(doc, problem, *tmax))
        }
        Command::Roundtrip { order, .. } => dispatch!(backend, roundtrip(doc, *order, cli.tol)),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("MOMENTBC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        parse_err(format!(
            "MOMENTBC_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: &Cli) -> CliResult<()> {
    if !cli.tol.is_finite() || cli.tol <= 0.0 {
        return Err(parse_err(format!(
            "tolerance must be positive, got {}",
            cli.tol
        )));
    }
    configure_threads()?;
    let doc = read_document(cli.command.input())?;
    let backend = cli.backend.or(document_backend(&doc)?).unwrap_or_default();
    let output = execute(cli, &doc, backend)?;
    let text = match cli.format {
        Format::Json => output.to_json(),
        Format::Csv => output.to_csv()?,
    };
    write_output(&text, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e.to_json()).expect("error JSON")
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
