use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite control input")]
    NonFiniteInput,

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    /// A square-root argument in a valve flow equation went negative.
    #[error("pressure bound violated: radicand {radicand:e} in {equation}")]
    PressureBound { equation: &'static str, radicand: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("expected {expected} state entries for {family}, got {got}")]
    StateDimension {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{family} needs {expected} saturation limits, got {got}")]
    LimitCount {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unknown plant family `{0}`")]
    UnknownFamily(String),

    #[error("plant family `{0}` is not constructible: its plant dynamics are not defined")]
    UnsupportedFamily(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigInvariant(String),

    #[error("telemetry: {0}")]
    Telemetry(String),

    #[error("empty telemetry")]
    EmptyTelemetry,

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.into(),
        reason: reason.into(),
    }
}
