use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("world generation failed validation after {attempts} attempts")]
    RetryExhausted { attempts: u32 },

    #[error("coordinates ({x}, {y}) are outside the map")]
    OutOfBounds { x: i32, y: i32 },

    #[error("cannot step a terminal state")]
    SteppedTerminal,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed container: {0}")]
    MalformedContainer(String),

    #[error("unknown caption {0:?}")]
    UnknownCaption(String),

    #[error("malformed paraphrase table: {0}")]
    MalformedTable(String),

    #[error("missing template binding {{{0}}}")]
    MissingBinding(&'static str),

    #[error("unknown task {0:?}")]
    UnknownTask(String),

    #[error("logit length mismatch: cond has {cond}, uncond has {uncond}")]
    LengthMismatch { cond: usize, uncond: usize },

    #[error("episode has no timesteps")]
    EmptyEpisode,

    #[error("mismatched inputs: {0}")]
    MismatchedInputs(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed mechanics table: {0}")]
    Defaults(String),

    #[error("episode {episode}: {source}")]
    Episode {
        episode: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::IoFailure {
            path: path.into(),
            source,
        }
    }

    pub fn in_episode(self, episode: u64) -> Self {
        Error::Episode {
            episode,
            source: Box::new(self),
        }
    }

    /// Short machine-readable code, used by the bridge and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::RetryExhausted { .. } => "RetryExhausted",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::SteppedTerminal => "SteppedTerminal",
            Error::EmptyInput(_) => "EmptyInput",
            Error::IoFailure { .. } | Error::Io(_) => "IoFailure",
            Error::MalformedContainer(_) => "MalformedContainer",
            Error::UnknownCaption(_) => "UnknownCaption",
            Error::MalformedTable(_) => "MalformedTable",
            Error::MissingBinding(_) => "MissingBinding",
            Error::UnknownTask(_) => "UnknownTask",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EmptyEpisode => "EmptyEpisode",
            Error::MismatchedInputs(_) => "MismatchedInputs",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Defaults(_) => "MalformedDefaults",
            Error::Episode { source, .. } => source.code(),
        }
    }
}
