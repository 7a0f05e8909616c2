//! Memory-bounded online question answering with expert advice.
//!
//! An adversary streams facts (teach) and questions (evaluate). Experts and
//! a learner each keep a bounded set of facts; an evaluation costs 1 to
//! everyone missing the fact. This crate provides the experts, several
//! learners, stream generators including an adaptive lower-bound
//! adversary, and a game harness that checks memory and mistake bounds at
//! every step.

pub mod adversaries;
pub mod error;
pub mod experts;
pub mod harness;
pub mod learners;
pub mod model;
pub mod verify;

pub use error::{Error, Result};
pub use experts::{ExpertId, ExpertOracle, ExpertSuite, OracleBacking, SuiteKind, ValueFunction, ValueTable};
pub use learners::{Learner, LearnerKind};
pub use model::{AnswerId, Event, EventKind, Fact, FactSet, GameLedger, GroundTruth, QuestionId, Stream, Vocabulary};
