use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] plumbing_core::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed structured input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable identifier printed by the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Core(e) => e.name(),
            Error::Syntax { .. } => "SyntaxError",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "ParseError",
            Error::Usage(_) => "UsageError",
        }
    }

    /// Process exit code: 2 for usage problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { line, msg: msg.into() }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
