//! Learners: the multiplicative-weights baseline, the lazy 0/1-weight scheme,
//! its value-based variant that estimates expert thresholds instead of
//! querying an oracle, a full-simulation baseline and a random-eviction
//! strawman.
//!
//! Every learner runs in two phases per step. [`Learner::observe`] is the
//! weight update and sees expert memories as they were before the step;
//! [`Learner::absorb`] is the memory update and sees them after the experts
//! have stored the step's fact.

mod full_sim;
mod lazy;
mod majority;
mod mwu;
mod random_evict;
mod value_lazy;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experts::ExpertOracle;
use crate::model::{Event, Fact, FactSet};

pub use full_sim::FullSim;
pub use lazy::Lazy;
pub use majority::{majority_kept, weighted_keep};
pub use mwu::{Mwu, DEFAULT_GAMMA};
pub use random_evict::RandomEvict;
pub use value_lazy::{ThresholdRefresh, ValueLazy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    Mwu,
    Lazy,
    ValueLazy,
    FullSim,
    RandomEvict,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 5] = [
        LearnerKind::Mwu,
        LearnerKind::Lazy,
        LearnerKind::ValueLazy,
        LearnerKind::FullSim,
        LearnerKind::RandomEvict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Mwu => "mwu",
            LearnerKind::Lazy => "lazy",
            LearnerKind::ValueLazy => "value-lazy",
            LearnerKind::FullSim => "full-sim",
            LearnerKind::RandomEvict => "random-evict",
        }
    }

    /// Fact-memory cap the algorithm guarantees for `n` experts of memory
    /// `m`. The random-eviction strawman holds exactly its budget, `m` by
    /// default.
    pub fn fact_cap(self, n: usize, m: usize) -> usize {
        match self {
            LearnerKind::Mwu | LearnerKind::Lazy | LearnerKind::ValueLazy => 2 * m,
            LearnerKind::FullSim => m * n,
            LearnerKind::RandomEvict => m,
        }
    }

    /// Whether the learner carries an upper bound on its mistakes.
    pub fn has_mistake_bound(self) -> bool {
        matches!(self, LearnerKind::Lazy | LearnerKind::ValueLazy | LearnerKind::FullSim)
    }
}

impl serde::Serialize for LearnerKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown learner `{s}` (expected one of mwu, lazy, value-lazy, full-sim, random-evict)"
                ))
            })
    }
}

/// A learner advanced by the game loop, one step at a time.
pub trait Learner {
    fn kind(&self) -> LearnerKind;

    /// Facts currently stored.
    fn memory(&self) -> &FactSet;

    /// Bare questions stored alongside the facts.
    fn question_memory(&self) -> usize {
        0
    }

    /// Number of numeric bookkeeping entries (counters, thresholds, flags).
    fn aux_state(&self) -> usize;

    /// Size of the active expert set, or 0 for learners without one.
    fn active_count(&self) -> usize {
        0
    }

    /// Weight update. `oracle` reflects expert memories before this step's
    /// update.
    fn observe(&mut self, event: &Event, oracle: &dyn ExpertOracle) -> Result<()>;

    /// Memory update. `fact` is the step's fact when its answer is known;
    /// `oracle` reflects expert memories after this step's update.
    fn absorb(&mut self, fact: Option<Fact>, oracle: &dyn ExpertOracle) -> Result<()>;

    fn as_value_lazy(&self) -> Option<&ValueLazy> {
        None
    }

    /// Number of times the active set shrank, for learners that keep one.
    fn active_updates(&self) -> u64 {
        0
    }

    fn hard_resets(&self) -> u64 {
        0
    }

    /// Per-expert error counters, for learners that keep them.
    fn error_counts(&self) -> Option<&[u64]> {
        None
    }
}
