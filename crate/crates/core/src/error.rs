use thiserror::Error;

/// Errors produced by the library.
///
/// The variants group into three classes that the command-line front end maps
/// onto exit codes: malformed input, violated resource guards, and internal
/// property failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u32, modulus: u32 },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rho = {rho} outside {range}")]
    RhoOutOfRange { rho: f64, range: &'static str },
    #[error("guard `{name}` exceeded: {value} > {limit}")]
    Guard {
        name: &'static str,
        value: u128,
        limit: u128,
    },
}

impl Error {
    pub fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
