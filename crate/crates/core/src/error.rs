use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("variable index {index} out of range for a law over {count} variables")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cyclic or forward wiring: factor {factor} refers to variable {parent}")]
    CyclicWiring { factor: usize, parent: usize },

    #[error("symbol {symbol} outside alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("setup is not an sd-2DMBC: {0}")]
    NotStochasticallyDegraded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
