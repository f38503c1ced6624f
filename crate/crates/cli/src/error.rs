use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{line}:{column}: {message}")]
    Semantic { line: usize, column: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] varseq_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
