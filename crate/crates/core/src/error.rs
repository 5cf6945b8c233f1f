use thiserror::Error;

/// Errors raised by model construction, simulation, signal handling and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("disconnected topology: {0}")]
    DisconnectedTopology(String),

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("non-integer decimation ratio: {source_fs} Hz -> {target_fs} Hz")]
    NonIntegerDecimation { source_fs: f64, target_fs: f64 },

    #[error("insufficient length for requested depth: level {level} input has {len} samples, filter needs {needed}")]
    InsufficientLength { level: usize, len: usize, needed: usize },

    #[error("mismatched extension policy: pyramid built with {built}, reconstruction asked for {requested}")]
    MismatchedExtension { built: String, requested: String },

    #[error("channel {channel}: {source}")]
    Channel {
        channel: String,
        #[source]
        source: Box<Error>,
    },

    #[error("channel/generator count mismatch: {channels} channels, {generators} generators")]
    ChannelCountMismatch { channels: usize, generators: usize },

    #[error("invalid window [{t0}, {t1}]: {reason}")]
    InvalidWindow { t0: f64, t1: f64, reason: String },

    #[error("malformed signal data: {0}")]
    MalformedSignal(String),

    #[error("nonuniform sampling: {0}")]
    NonuniformSampling(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn in_channel(self, label: &str) -> Self {
        Error::Channel {
            channel: label.to_string(),
            source: Box::new(self),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoEquilibrium(_) => true,
            Error::Channel { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
