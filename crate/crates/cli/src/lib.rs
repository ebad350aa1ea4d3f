//! Command-line companion to `symext-core`: state construction, checks,
//! decompositions, scans and searches with JSON/CSV output, plus the
//! self-test harness backing the `selftest` subcommand and the acceptance
//! suite.

pub mod cli;
pub mod report;
pub mod selftest;
pub mod stateio;

/// Process exit codes used by the binary.
pub mod exit_code {
    pub const OK: i32 = 0;
    /// Malformed input: bad state file, out-of-range parameters.
    pub const VALIDATION: i32 = 2;
    /// The numerical back end failed to certify a result.
    pub const NUMERICAL: i32 = 3;
    /// Unknown subcommand.
    pub const USAGE: i32 = 64;
}

/// Error carrying the exit code it should terminate with.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: exit_code::VALIDATION,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: exit_code::NUMERICAL,
            message: message.into(),
        }
    }
}

impl core::fmt::Display for CliError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<symext_core::linalg::LinalgError> for CliError {
    fn from(e: symext_core::linalg::LinalgError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<symext_core::sdp::SdpError> for CliError {
    fn from(e: symext_core::sdp::SdpError) -> Self {
        use symext_core::sdp::SdpError::*;
        match e {
            Numerical(_) => Self::numerical(e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<symext_core::extendibility::ExtendibilityError> for CliError {
    fn from(e: symext_core::extendibility::ExtendibilityError) -> Self {
        use symext_core::extendibility::ExtendibilityError as E;
        match e {
            E::Sdp(inner) => inner.into(),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<symext_core::bsa::BsaError> for CliError {
    fn from(e: symext_core::bsa::BsaError) -> Self {
        use symext_core::bsa::BsaError as B;
        match e {
            B::Sdp(inner) => inner.into(),
            B::Extendibility(inner) => inner.into(),
            B::NotOptimal(_) | B::Internal(_) => Self::numerical(e.to_string()),
            B::Linalg(inner) => inner.into(),
        }
    }
}

impl From<symext_core::analysis::AnalysisError> for CliError {
    fn from(e: symext_core::analysis::AnalysisError) -> Self {
        use symext_core::analysis::AnalysisError as A;
        match e {
            A::Linalg(inner) => inner.into(),
            A::Extendibility(inner) => inner.into(),
            A::Bsa(inner) => inner.into(),
            A::BadArgument(msg) => Self::validation(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::validation(format!("json: {e}"))
    }
}
