//! Error type shared across the toolkit.

/// Errors produced by construction, simulation, analysis, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid run configuration (unknown names, missing fields, bad values).
    #[error("configuration error: {0}")]
    Config(String),

    /// Structurally invalid input to an operation (dimension mismatch, ...).
    #[error("input error: {0}")]
    Input(String),

    /// The construction pipeline cannot proceed (singular matrix, degenerate
    /// conserved-row span, ...).
    #[error("construction error: {0}")]
    Construction(String),

    /// The weight-selection linear program has no solution: no positive
    /// diagonal weights exist for this velocity set and background velocity.
    /// This is a scientific result, not a failure; callers map it to a
    /// dedicated exit status.
    #[error("no positive diagonal weights exist for this background velocity and velocity set")]
    Infeasible,

    /// A simulation produced non-finite values and was stopped.
    #[error("simulation aborted: {0}")]
    Aborted(String),

    /// Malformed on-disk artifact (matrix CSV, operator file, snapshot).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
