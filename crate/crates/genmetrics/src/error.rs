use std::fmt;
use std::io;
use std::path::PathBuf;

/// Where in an input file a problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based text line.
    Line(usize),
    /// 1-based row of a feature matrix.
    Row(usize),
    Header,
    /// Byte offset into a binary file.
    Offset(u64),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Row(n) => write!(f, "row {n}"),
            Location::Header => f.write_str("header"),
            Location::Offset(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {location}: {message}", path.display())]
    Parse {
        path: PathBuf,
        location: Location,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        source: genmetrics_core::Error,
    },
    #[error(transparent)]
    Metric(#[from] genmetrics_core::Error),
    #[error("cannot start thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error("{0}")]
    Output(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, location: Location, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            location,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
