//! Secret-key agreement over two-way wiretap channels: information measures,
//! channel models, typicality, key-capacity bounds and the interactive
//! channel coding protocol.

mod error;
mod lp;

pub mod bounds;
pub mod channels;
pub mod icc;
pub mod probability;
pub mod typicality;

pub use channels::{
    degradedness_check, make_bsc_pair, DegradationOrder, DegradationReport, Dmbc, TwoDmbcSetup,
};
pub use error::{Error, Result};
pub use icc::{BlockPlan, EvaluationReport, IccCodebook, SessionOutcome, SystematicCode};
pub use probability::{
    compose_markov, conditional_mutual_information, entropy, mutual_information, Alphabet,
    ConditionalPmf, Factor, JointPmf, Pmf, Symbol,
};
pub use typicality::{BipartiteWord, BookMode, TypicalBook, TypicalityParams};

/// Default exponent limit for exhaustive enumeration (`2^24` items).
pub const DEFAULT_GUARD_BITS: u32 = 24;

/// Enumeration limit in bits, overridable through `SKEC_GUARD_ETA`.
pub fn guard_bits() -> u32 {
    std::env::var("SKEC_GUARD_ETA")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD_BITS)
}
