//! The interactive channel coding protocol: block plans, systematic codes,
//! codebooks and key binning, session simulation, Eve's exact posterior and
//! Monte-Carlo evaluation of the uniformity, reliability and secrecy
//! criteria.
//!
//! Book and key indices are 0-based.

mod code;
mod codebook;
mod evaluate;
mod eve;
mod plan;
mod packed;
mod session;

pub use code::{SystematicCode, TypicalSetCode};
pub use codebook::{IccCodebook, KeyPartition};
pub use evaluate::{evaluate, evaluate_sessions, wilson_interval, DeltaCheck, EvaluationConfig, EvaluationReport, FailureCounts};
pub use eve::{check_decode, fano_bound, EveModel};
pub use plan::{BlockPlan, PlanKind, DEFAULT_ALPHA};
pub use session::{run_session, run_session_general, run_session_special, FailureMode, SessionOutcome, Views};
