use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse config: {0}")]
    Parse(String),

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: sdqsim_core::Error,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// A sub-config rejected by its own `validate`.
    pub fn field(section: &str, e: sdqsim_core::Error) -> Self {
        let msg = match e {
            sdqsim_core::Error::InvalidParameter(m) => m,
            other => other.to_string(),
        };
        CliError::Validation(format!("[{section}] {msg}"))
    }

    pub fn numerical(context: impl Into<String>) -> impl FnOnce(sdqsim_core::Error) -> Self {
        let context = context.into();
        move |source| CliError::Numerical { context, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
