//! Experts, their ground-truth simulation, and the access oracle learners use
//! to ask whether an expert currently stores a fact.

mod builtin;
mod oracle;
mod scripted;
mod suite_file;
mod value;

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{EventKind, Fact, FactMemory, GroundTruth, QuestionId};

pub use builtin::{random_value_functions, scripted_suite, SuiteKind};
pub use oracle::{ExpertOracle, OracleBacking, OracleHandle, ThresholdOracle};
pub use scripted::{ScriptedExpert, ScriptedPolicy};
pub use suite_file::{format_suite, parse_suite, read_suite, SuiteFile};
pub use value::{max_m, ValueBasedExpert, ValueFunction, ValueTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpertId(pub usize);

impl fmt::Display for ExpertId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// What a single offer did to an expert's memory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OfferOutcome {
    pub stored: bool,
    pub evicted: Option<Fact>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Expert {
    ValueBased(ValueBasedExpert),
    Scripted(ScriptedExpert),
}

impl Expert {
    pub fn id(&self) -> ExpertId {
        match self {
            Expert::ValueBased(e) => e.id(),
            Expert::Scripted(e) => e.id(),
        }
    }

    pub fn capacity(&self) -> usize {
        match self {
            Expert::ValueBased(e) => e.capacity(),
            Expert::Scripted(e) => e.capacity(),
        }
    }

    pub fn holds_question(&self, q: QuestionId) -> bool {
        match self {
            Expert::ValueBased(e) => e.holds_question(q),
            Expert::Scripted(e) => e.holds_question(q),
        }
    }

    pub fn offer(&mut self, fact: Fact, kind: EventKind) -> Result<OfferOutcome> {
        match self {
            Expert::ValueBased(e) => e.offer(fact),
            Expert::Scripted(e) => e.offer(fact, kind),
        }
    }

    pub fn facts(&self) -> Vec<Fact> {
        match self {
            Expert::ValueBased(e) => e.facts().collect(),
            Expert::Scripted(e) => e.memory().iter().collect(),
        }
    }

    pub fn memory_len(&self) -> usize {
        match self {
            Expert::ValueBased(e) => e.len(),
            Expert::Scripted(e) => e.memory().len(),
        }
    }

    pub fn as_value_based(&self) -> Option<&ValueBasedExpert> {
        match self {
            Expert::ValueBased(e) => Some(e),
            Expert::Scripted(_) => None,
        }
    }
}

impl FactMemory for Expert {
    fn holds(&self, fact: &Fact) -> bool {
        match self {
            Expert::ValueBased(e) => e.facts().any(|f| f == *fact),
            Expert::Scripted(e) => e.memory().contains(fact),
        }
    }
}

/// Ground-truth simulation of all experts of one game.
///
/// Alongside the experts it keeps, for every question of the universe, the
/// set of experts currently holding it, so membership and majority counts
/// are bit operations.
#[derive(Debug, Clone)]
pub struct ExpertSuite {
    experts: Vec<Expert>,
    capacity: usize,
    universe: usize,
    holders: Vec<FixedBitSet>,
}

impl ExpertSuite {
    /// Every expert must have memory `capacity` and an id equal to its
    /// position.
    pub fn new(experts: Vec<Expert>, capacity: usize, universe: usize) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::config("expert suite is empty"));
        }
        for (i, e) in experts.iter().enumerate() {
            if e.id() != ExpertId(i) {
                return Err(Error::config(format!("expert at position {i} has id {}", e.id())));
            }
            if e.capacity() != capacity {
                return Err(Error::config(format!(
                    "expert {} has memory {}, suite declares {capacity}",
                    e.id(),
                    e.capacity()
                )));
            }
        }
        let n = experts.len();
        let mut suite = ExpertSuite {
            experts,
            capacity,
            universe,
            holders: vec![FixedBitSet::with_capacity(n); universe],
        };
        for e in 0..n {
            for fact in suite.experts[e].facts() {
                let q = suite.check_universe(fact.question)?;
                suite.holders[q].insert(e);
            }
        }
        Ok(suite)
    }

    /// Value-based suite with one expert per value function.
    pub fn value_based(functions: Vec<ValueFunction>, capacity: usize, universe: usize) -> Result<Self> {
        let experts = functions
            .into_iter()
            .enumerate()
            .map(|(i, f)| Expert::ValueBased(ValueBasedExpert::new(ExpertId(i), capacity, f)))
            .collect();
        Self::new(experts, capacity, universe)
    }

    fn check_universe(&self, q: QuestionId) -> Result<usize> {
        if q.index() < self.universe {
            Ok(q.index())
        } else {
            Err(Error::OutsideUniverse {
                question: q,
                universe: self.universe,
            })
        }
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn experts(&self) -> &[Expert] {
        &self.experts
    }

    pub fn expert(&self, id: ExpertId) -> Result<&Expert> {
        self.experts.get(id.0).ok_or(Error::UnknownExpert(id))
    }

    /// Experts currently holding `q`, or `None` outside the universe.
    pub fn holders(&self, q: QuestionId) -> Option<&FixedBitSet> {
        self.holders.get(q.index())
    }

    pub fn holds(&self, expert: ExpertId, q: QuestionId) -> bool {
        self.holders(q).is_some_and(|h| h.contains(expert.0))
    }

    /// Step-4 memory update: offers `fact` to every expert.
    pub fn offer_all(&mut self, fact: Fact, kind: EventKind) -> Result<()> {
        let q = self.check_universe(fact.question)?;
        for e in 0..self.experts.len() {
            let outcome = self.experts[e].offer(fact, kind)?;
            if outcome.stored {
                self.holders[q].insert(e);
            }
            if let Some(evicted) = outcome.evicted {
                self.holders[evicted.question.index()].set(e, false);
            }
        }
        Ok(())
    }

    /// Per-expert cost of evaluating `q`: 1 iff the expert lacks the
    /// ground-truth fact.
    pub fn true_mistake_update(&self, q: QuestionId, truth: &GroundTruth) -> Vec<u8> {
        let mut costs = vec![0; self.len()];
        self.fill_costs(q, truth, &mut costs);
        costs
    }

    /// In-place form of [`true_mistake_update`](Self::true_mistake_update).
    pub fn fill_costs(&self, q: QuestionId, truth: &GroundTruth, costs: &mut [u8]) {
        match (truth.answer(q), self.holders(q)) {
            (Some(_), Some(holders)) => {
                for (e, c) in costs.iter_mut().enumerate() {
                    *c = u8::from(!holders.contains(e));
                }
            }
            _ => costs.fill(1),
        }
    }

    /// All value functions, if every expert is value based.
    pub fn value_functions(&self) -> Option<Vec<ValueFunction>> {
        self.experts
            .iter()
            .map(|e| e.as_value_based().map(|v| v.values().clone()))
            .collect()
    }

    pub fn value_table(&self) -> Option<ValueTable> {
        self.value_functions()
            .map(|fs| ValueTable::from_functions(&fs, self.universe))
    }

    pub fn is_value_based(&self) -> bool {
        self.experts.iter().all(|e| e.as_value_based().is_some())
    }

    /// True threshold of a value-based expert.
    pub fn true_threshold(&self, id: ExpertId) -> Option<u64> {
        self.expert(id).ok()?.as_value_based().map(ValueBasedExpert::true_threshold)
    }
}
