pub mod args;
pub mod commands;
pub mod dataset;

/// A failure with its exit code: 2 for bad input, 3 for numerical or
/// internal errors.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn user(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl From<otdcov::Error> for CliError {
    fn from(e: otdcov::Error) -> Self {
        if e.is_user_error() {
            CliError::user(e.to_string())
        } else {
            CliError::internal(e.to_string())
        }
    }
}

pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("OTDCOV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::user(format!("OTDCOV_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))
}

