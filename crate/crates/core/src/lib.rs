//! Analysis of how often instant runoff voting elects a weak candidate in
//! three-candidate elections.
//!
//! * [`election`]: profiles, IRV, plurality, Borda, Bucklin, Condorcet rules.
//! * [`spatial`]: 1D/2D Euclidean voter models and ballot truncation.
//! * [`montecarlo`]: seeded, thread-count independent simulation sweeps.
//! * [`analytic`]: IAC and IC limiting probabilities.
//! * [`empirical`]: ballot files, reduction to three candidates, proportional
//!   completion and dataset audits.

pub mod analytic;
pub mod election;
pub mod empirical;
pub mod montecarlo;
pub mod seeds;
pub mod spatial;

pub use election::{Ballot, Candidate, CandidateSet, ElectionError, Pick, Profile3};
