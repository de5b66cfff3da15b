use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto process exit codes: parameter errors → 2,
/// data errors → 3, numerical errors → 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{path}:{line}: {msg}")]
    DataFormat {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("matrix of size {n} exceeds the dense cap of {cap}; {hint}")]
    DenseCap { n: usize, cap: usize, hint: String },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    EigenNoConvergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("graph has no attribute matrix but method {0} requires one")]
    MissingAttributes(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code class for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::DimensionMismatch(_) | Error::MissingAttributes(_) => 2,
            Error::DataFormat { .. } | Error::Data(_) | Error::Io { .. } => 3,
            Error::DenseCap { .. }
            | Error::EigenNoConvergence { .. }
            | Error::NumericalDegeneracy(_) => 4,
        }
    }
}
