use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Library(#[from] nonrev::Error),
}

impl CliError {
    /// 2 for anything the caller got wrong, 1 when the numerics failed.
    pub fn exit_code(&self) -> u8 {
        use nonrev::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Library(
                E::InvalidSpec(_)
                | E::InvalidDensity(_)
                | E::InvalidArgument(_)
                | E::DimensionMismatch { .. }
                | E::SupportMismatch,
            ) => 2,
            CliError::Library(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::Library(e) => e.kind(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

pub type CliResult<T> = Result<T, CliError>;
