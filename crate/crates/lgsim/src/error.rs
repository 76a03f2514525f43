use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(lgsim_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<lgsim_core::Error> for CliError {
    fn from(e: lgsim_core::Error) -> Self {
        use lgsim_core::Error as E;
        match e {
            E::FractionOutOfRange { .. }
            | E::InvalidArgument(_)
            | E::UnsupportedDimension(_)
            | E::StringTooShort(_)
            | E::EnumerationRange(_)
            | E::InvalidState(_)
            | E::InvalidScheme(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
