//! The ALBA rewrite engine: preprocessing, reduction rules, the strategic and
//! exhaustive drivers, traces, and invariant checkers.

pub mod checks;
pub mod preprocess;
pub mod rules;
pub mod run;
pub mod system;

use thiserror::Error;

pub use checks::{check_compact_appropriate, check_safety, check_topological_adequacy, is_ackermann_ready, is_stripped};
pub use preprocess::{eliminate_uniform, preprocess};
pub use rules::{apply_rule, AckSide, Applied, Flavor, Rule};
pub use run::{canonical_names, replay, run, EngineConfig, Mode, RunResult, RunStatus, Step, SystemTrace, Trace};
pub use system::{System, TaggedInequality};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("branch above {0} is not SAC with the required sign")]
    NotSacBranch(String),
    #[error("approximation at {0} is not pivotal")]
    NotPivotal(String),
    #[error("approximated subterm `{0}` is neither base-language nor a single (co)nominal")]
    GammaNotAdmissible(String),
    #[error("no such position: {0}")]
    BadPosition(String),
    #[error("head cannot be residuated: {0}")]
    HeadNotResiduable(String),
    #[error("cannot split `{0}`")]
    NotSplittable(String),
    #[error("system is not Ackermann-ready for {var}: {member}")]
    NotAckermannReady { var: String, member: String },
    #[error("cannot isolate {0}")]
    NotIsolable(String),
    #[error("replay diverged at step {0}")]
    ReplayMismatch(usize),
}
