use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("{what} = {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("no real spin makes u = {u} an equilibrium")]
    NoRealSpin { u: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("insufficient samples: {found} (need at least {needed})")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxSteps(usize),

    #[error("trajectory left the domain at t = {time}")]
    BoundaryEscape { time: f64 },

    #[error("inconclusive probe: max deviation {deviation} between {stable_bound} and {escape_bound}")]
    Inconclusive {
        deviation: f64,
        stable_bound: f64,
        escape_bound: f64,
    },

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn config_at(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line: Some(line),
            message: message.into(),
        }
    }

    /// Whether this error came from configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::UnboundParameter(_)
                | Error::InvalidPotential(_)
                | Error::InvalidArgument(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
