use std::fmt;

use qcompat::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DOMAIN: i32 = 2;
    pub const INVALID_INPUT: i32 = 3;
    pub const MISSING_STRATA: i32 = 4;
    pub const CHECK_FAILED: i32 = 1;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: exit::INVALID_INPUT, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError { code: exit::DOMAIN, message: message.into() }
    }

    pub fn context(self, what: &str) -> Self {
        CliError { code: self.code, message: format!("{what}: {}", self.message) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Exit code for a library error.
pub fn code_for(e: &Error) -> i32 {
    match e {
        Error::Domain { .. }
        | Error::UnsupportedDerivative { .. }
        | Error::SingularState(_)
        | Error::QuadratureNotConverged(_)
        | Error::DivergentFisher { .. }
        | Error::Symplectic(_) => exit::DOMAIN,
        Error::MissingStrata(_) => exit::MISSING_STRATA,
        _ => exit::INVALID_INPUT,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::MissingStrata(v) => format!("no dimension declared for strata {v:?}; add them under \"strata\""),
            _ => e.to_string(),
        };
        CliError { code: code_for(&e), message }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::invalid(e.to_string())
    }
}
