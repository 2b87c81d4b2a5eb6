use thiserror::Error;

/// Pauli axis of a qubit transfer eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max entry deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("epsilon {0} outside the model domain [0, 0.5]")]
    EpsilonOutOfRange(f64),

    #[error("first channel is not invertible: transfer eigenvalue along {axis} vanishes")]
    NonInvertible { axis: PauliAxis },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("operator is not traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("saturation conditions are infeasible (margin {0:e})")]
    Infeasible(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "not_square",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EpsilonOutOfRange(_) => "epsilon_out_of_range",
            Error::NonInvertible { .. } => "non_invertible",
            Error::InvalidState(_) => "invalid_state",
            Error::NotTraceless(_) => "not_traceless",
            Error::Infeasible(_) => "infeasible",
            Error::InvalidChannel(_) => "invalid_channel",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
