//! Real ranked-ballot elections: parsing, reduction to three candidates by
//! IRV elimination, proportional completion of bullet votes, and audits of
//! whole directories of elections.

mod audit;
mod complete;
mod parse;
mod reduce;

pub use audit::{audit_dataset, AuditMode, AuditRecord, AuditReport, MeasureCount, SkippedFile};
pub use complete::{complete_proportionally, split_largest_remainder};
pub use parse::{parse_ballots, parse_ballots_str, write_ballots, RawElection};
pub use reduce::{reduce_to_three, reduce_to_three_with_rng, EliminationRound, ReducedElection, ReductionLog};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmpiricalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no ballots")]
    EmptyElection,
    #[error("need at least 3 candidates, found {0}")]
    TooFewCandidates(usize),
    #[error("expected exactly 3 candidates, found {0}")]
    NotThreeCandidates(usize),
}
