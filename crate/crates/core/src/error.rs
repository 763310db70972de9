use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid index ({i}, {j}) out of range for {n_points} points per side")]
    IndexOutOfRange { i: usize, j: usize, n_points: usize },

    #[error("grid mismatch: expected {expected_n} points at spacing {expected_dx}, got {found_n} at {found_dx}")]
    GridMismatch {
        expected_n: usize,
        expected_dx: f64,
        found_n: usize,
        found_dx: f64,
    },

    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field is identically zero")]
    ZeroField,

    #[error("operator is not symmetric: max asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    Asymmetric { asymmetry: f64, tolerance: f64 },

    #[error("inverse FFT left an imaginary residue of {residue:e} (limit {tolerance:e})")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("matrix decomposition failed: {0}")]
    Decomposition(String),

    #[error("dense oracle is limited to {max} unknowns, operator has {found}")]
    OracleTooLarge { max: usize, found: usize },

    #[error("non-finite field value after step {step}")]
    NonFinite { step: usize },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {message}")]
    Config {
        line: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: match line {
                Some(l) => format!("line {l}: {}", message.into()),
                None => message.into(),
            },
        }
    }

    /// True for errors caused by user input rather than numerics or I/O.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }

    /// True for aborts raised by the numerical kernels.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::Decomposition(_)
                | Error::ImaginaryResidue { .. }
                | Error::Asymmetric { .. }
        )
    }
}
