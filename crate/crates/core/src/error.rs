use std::io;
use std::path::PathBuf;

/// Errors produced while building, storing or inverting a BWT.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("the input collection is empty")]
    EmptyCollection,

    #[error("string {index} is empty")]
    EmptyString { index: usize },

    #[error("string {index} contains the separator byte {separator:#04x} at offset {offset}")]
    SeparatorInString {
        index: usize,
        offset: usize,
        separator: u8,
    },

    #[error("symbol {symbol} is outside the alphabet [1, {sigma}]")]
    SymbolOutOfRange { symbol: u64, sigma: u64 },

    #[error("run length must be positive")]
    ZeroLengthRun,

    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),

    #[error("base BWT requested for a text of length {len} but the collection has {k} strings")]
    NotFinal { len: u64, k: u64 },

    #[error("corrupted round data: {0}")]
    Corrupt(String),

    #[error("malformed BWT: {0}")]
    MalformedBwt(String),

    #[error("{path}:{line}: {msg}")]
    Input {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("{context}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        let context = context.into();
        if source.kind() == io::ErrorKind::StorageFull {
            return Error::Io {
                context: format!("{context} (disk full)"),
                source,
            };
        }
        Error::Io { context, source }
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
