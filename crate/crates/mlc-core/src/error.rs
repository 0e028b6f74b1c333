//! Error type shared across the codec.

use std::fmt;
use std::io;

/// Errors produced by the codec and its I/O layers.
#[derive(Debug)]
pub enum Error {
    /// Dimension, length, or channel-layout mismatch between inputs.
    Shape(String),
    /// A model or encoder configuration that violates its invariants.
    Config(String),
    /// An operation that requires non-empty input got an empty one.
    Empty(&'static str),
    /// Malformed or truncated encoded stream. `frame` is the frame index
    /// being decoded when the error was detected, if known.
    Stream { frame: Option<u64>, msg: String },
    /// Unsupported or malformed WAV content.
    Wav(String),
    Io(io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Error {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Error {
        Error::Config(msg.into())
    }

    pub(crate) fn stream(msg: impl Into<String>) -> Error {
        Error::Stream {
            frame: None,
            msg: msg.into(),
        }
    }

    /// Attaches a frame index to a stream error, leaving other errors as-is.
    pub(crate) fn at_frame(self, frame: u64) -> Error {
        match self {
            Error::Stream { frame: None, msg } => Error::Stream {
                frame: Some(frame),
                msg,
            },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Empty(what) => write!(f, "empty input: {what}"),
            Error::Stream { frame: None, msg } => write!(f, "invalid stream: {msg}"),
            Error::Stream {
                frame: Some(k),
                msg,
            } => write!(f, "invalid stream at frame {k}: {msg}"),
            Error::Wav(msg) => write!(f, "wav: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Error {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
