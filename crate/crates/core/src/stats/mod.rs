//! Run statistics: CHSH correlations, the success-count martingale test with
//! exact binomial tails, and the Fine and Boole feasibility checkers.

mod boole;
mod chsh;
mod fine;
mod martingale;

pub use boole::{agreement_probabilities, boole_check, BooleConstraint, BooleReport, BOOLE_ATOMS};
pub use chsh::{
    chsh_from_rho, chsh_score, correlation_by_offset, estimate_correlations, estimate_from_trials, read_offset_csv,
    write_offset_csv, CellCorrelation, ChshCorrelations, OffsetCorrelation, CELL_LABELS, CHSH_SIGNS,
};
pub use fine::{
    fine_check, fine_check_counts, ConstraintKind, CountTable, FineConstraint, FineReport, ProbabilityTable,
    FINE_TOLERANCE,
};
pub use martingale::{
    bell_test, bell_test_log, binomial_lower_tail, binomial_tail, is_success, ln_binomial_tail, log10_binomial_tail,
    success_count, success_count_trials, CellTally, SuccessCounts, TestVerdict, LOCAL_SUCCESS_BOUND,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("the run log holds no trials")]
    EmptyLog,

    #[error("cell {0}{1} has no trials")]
    MissingCell(u8, u8),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("threshold {x} outside 0..={limit}")]
    InvalidThreshold { x: u64, limit: u64 },

    #[error("malformed probability table: {0}")]
    InvalidTable(String),

    #[error("fixed-delta runs have no randomized four-point design; the success-count bound does not apply")]
    NoRandomizedDesign,
}
