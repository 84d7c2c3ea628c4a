use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants fall into three families that the command-line front end maps
/// onto distinct exit codes: malformed input ([`Error::Parse`]), mathematical
/// domain violations, and exhausted computational budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generator {index} is not in SL/Sp: {reason}")]
    NotInGroup { index: usize, reason: String },

    #[error("generator {index} is not symplectic for the given form")]
    NotSymplectic { index: usize },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("modulus {modulus} not coprime to mu = {mu}")]
    ModulusNotCoprime { modulus: String, mu: String },

    #[error("resource exceeded at modulus {modulus} ({level}): {detail}")]
    ResourceExceeded {
        modulus: String,
        level: String,
        detail: String,
    },

    #[error("no stabilization for p = {prime} after {cap} increments: input may not be dense or engine under-resolved")]
    NoStabilization { prime: u64, cap: u32 },
}

impl Error {
    /// True for errors caused by exhausting a configured budget.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::ResourceExceeded { .. } | Error::NoStabilization { .. }
        )
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
