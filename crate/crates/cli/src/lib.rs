//! Problem-file front end: expression and TOML parsing, canonical printing,
//! and command dispatch onto `varseq-core`.

pub mod commands;
pub mod error;
pub mod problem;
pub mod syntax;

pub use commands::{run_command, Command, Settings};
pub use error::CliError;
pub use problem::{parse_problem, print_problem, FieldDecl, Options, ProblemFile};

/// Problem used by `selftest` when no file is given.
pub const DEFAULT_PROBLEM: &str = "[problem]\nn = 1\nm = 1\nbase = [\"t\"]\nfields = [\"u\"]\n";
