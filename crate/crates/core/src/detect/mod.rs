//! Soft-output detectors: Q-BCJR, Q-BP, exhaustive oracle, unquantized BCJR.

pub mod bruteforce;
pub mod llr;
pub mod qbcjr;
pub mod qbp;
mod tables;
pub mod trellis;
pub mod unquantized;

pub use bruteforce::{bruteforce_llrs, bruteforce_marginals, BRUTEFORCE_LIMIT};
pub use llr::{LlrFrame, OpCounts, LLR_CLAMP};
pub use qbcjr::{qbcjr_llrs, qbcjr_marginals};
pub use qbp::{qbp_llrs, qbp_run, BpMessages, DEFAULT_BP_ITERATIONS};
pub use trellis::{build_trellis, Trellis, DEFAULT_TRELLIS_BUDGET};
pub use unquantized::bcjr_unquantized_llrs;
