use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A symbolic operation was handed a polynomial of path degree above the cap.
    #[error("path degree {0} exceeds the cap of {1}")]
    DegreeCap(usize, usize),
    /// Two paths or blocks do not compose at a common vertex.
    #[error("endpoint mismatch: {0}")]
    Endpoints(String),
    /// A linear solve or inversion hit a (numerically) singular matrix.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// Input violates a genericity assumption (eigenvalue collision, vanishing pairing, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// Moment-map residual above tolerance where an on-shell datum is required.
    #[error("datum is off-shell: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    OffShell { residual: f64, tol: f64 },
    /// Shape or precondition violation on matrix data.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A randomized search ran out of budget.
    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),
    /// Parsing of the text serialization failed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
