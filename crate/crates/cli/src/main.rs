use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use varseq_cli::{parse_problem, run_command, CliError, Command, Settings, DEFAULT_PROBLEM};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Kv,
}

/// Symbolic variational calculus on problem files.
#[derive(Parser, Debug)]
#[command(name = "varseq", version)]
struct Args {
    cmd: Command,
    /// Problem file (optional for `selftest`).
    problem: Option<PathBuf>,
    /// Vector field to use, by name.
    #[arg(long)]
    field: Option<String>,
    /// Polynomial degree bound of the exactness ansatz.
    #[arg(long)]
    ansatz_degree: Option<usize>,
    /// Gauss-Legendre nodes per cycle dimension.
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// Period tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn run(args: &Args) -> Result<bool, CliError> {
    let text = match &args.problem {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None if args.cmd == Command::Selftest => DEFAULT_PROBLEM.to_string(),
        None => return Err(CliError::Usage(format!("`{}` needs a problem file", args.cmd.name()))),
    };
    let problem = parse_problem(&text).map_err(|e| match (&args.problem, e) {
        (Some(path), CliError::Syntax { line, column, message }) => {
            CliError::Usage(format!("{}:{line}:{column}: syntax error: {message}", path.display()))
        }
        (Some(path), CliError::Semantic { line, column, message }) => {
            CliError::Usage(format!("{}:{line}:{column}: {message}", path.display()))
        }
        (_, e) => e,
    })?;
    let settings = Settings {
        field: args.field.clone(),
        ansatz_degree: args.ansatz_degree,
        quad_nodes: args.quad_nodes,
        tolerance: args.tolerance,
    };
    let report = run_command(args.cmd, &problem, &settings)?;
    let rendered = match args.format {
        Format::Text => report.to_text(),
        Format::Kv => report.to_kv(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{rendered}"),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
