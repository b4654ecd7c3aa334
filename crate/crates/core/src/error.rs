use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A joint state does not fit the problem it was evaluated against.
    #[error("invalid joint state: {0}")]
    InvalidState(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Payoffs must be recorded in nondecreasing time order.
    #[error("payoff at t={t} recorded after an update at t={last}")]
    OutOfOrder { t: u64, last: u64 },

    #[error("search already reached its horizon of {0} steps")]
    HorizonReached(u64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
