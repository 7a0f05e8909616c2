use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;

use super::{ExpertId, ExpertSuite, ValueTable};
use crate::error::{Error, Result};
use crate::model::QuestionId;

/// Query access to expert memories: does expert `e` store the fact for `q`
/// right now?
pub trait ExpertOracle {
    fn num_experts(&self) -> usize;

    fn query(&self, expert: ExpertId, q: QuestionId) -> Result<bool>;

    /// Number of experts in `among` that store `q`.
    fn count_holders(&self, q: QuestionId, among: &FixedBitSet) -> Result<usize> {
        let mut count = 0;
        for e in among.ones() {
            count += usize::from(self.query(ExpertId(e), q)?);
        }
        Ok(count)
    }
}

impl ExpertOracle for ExpertSuite {
    fn num_experts(&self) -> usize {
        self.len()
    }

    fn query(&self, expert: ExpertId, q: QuestionId) -> Result<bool> {
        if expert.0 >= self.len() {
            return Err(Error::UnknownExpert(expert));
        }
        Ok(self.holds(expert, q))
    }

    fn count_holders(&self, q: QuestionId, among: &FixedBitSet) -> Result<usize> {
        Ok(self.holders(q).map_or(0, |h| h.intersection_count(among)))
    }
}

/// Which backing answers oracle queries during a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleBacking {
    /// Read the simulated expert memories.
    #[default]
    Simulation,
    /// Compare each expert's value against its true threshold.
    Threshold,
}

/// Oracle answering from value functions and true thresholds alone.
///
/// A value-based expert holds `q` exactly when `q` has been shown and
/// `v_e(q)` reaches the expert's threshold. Thresholds are tracked with a
/// per-expert min-heap of the top values seen, independently of
/// [`ExpertSuite`]'s simulation.
#[derive(Debug, Clone)]
pub struct ThresholdOracle {
    values: ValueTable,
    capacity: usize,
    seen: FixedBitSet,
    tops: Vec<BinaryHeap<Reverse<u64>>>,
}

impl ThresholdOracle {
    pub fn new(values: ValueTable, capacity: usize) -> Self {
        let n = values.num_experts();
        let universe = values.universe();
        ThresholdOracle {
            values,
            capacity,
            seen: FixedBitSet::with_capacity(universe),
            tops: vec![BinaryHeap::with_capacity(capacity + 1); n],
        }
    }

    /// Records that `q` was shown to every expert.
    pub fn observe(&mut self, q: QuestionId) -> Result<()> {
        if q.index() >= self.values.universe() {
            return Err(Error::OutsideUniverse {
                question: q,
                universe: self.values.universe(),
            });
        }
        if self.seen.put(q.index()) {
            return Ok(());
        }
        let row = self.values.defined_row(q)?;
        for (heap, &v) in self.tops.iter_mut().zip(row) {
            heap.push(Reverse(v));
            if heap.len() > self.capacity {
                heap.pop();
            }
        }
        Ok(())
    }

    pub fn true_threshold(&self, expert: ExpertId) -> Result<u64> {
        let heap = self.tops.get(expert.0).ok_or(Error::UnknownExpert(expert))?;
        if self.capacity == 0 || heap.len() < self.capacity {
            Ok(0)
        } else {
            Ok(heap.peek().map_or(0, |r| r.0))
        }
    }

    pub fn has_seen(&self, q: QuestionId) -> bool {
        self.seen.contains(q.index())
    }
}

impl ExpertOracle for ThresholdOracle {
    fn num_experts(&self) -> usize {
        self.values.num_experts()
    }

    fn query(&self, expert: ExpertId, q: QuestionId) -> Result<bool> {
        let threshold = self.true_threshold(expert)?;
        if self.capacity == 0 || !self.has_seen(q) {
            return Ok(false);
        }
        Ok(self.values.value(expert, q)? >= threshold)
    }
}

/// An oracle with either backing.
#[derive(Debug, Clone, Copy)]
pub enum OracleHandle<'a> {
    Simulation(&'a ExpertSuite),
    Threshold(&'a ThresholdOracle),
}

impl ExpertOracle for OracleHandle<'_> {
    fn num_experts(&self) -> usize {
        match self {
            OracleHandle::Simulation(s) => s.num_experts(),
            OracleHandle::Threshold(t) => t.num_experts(),
        }
    }

    fn query(&self, expert: ExpertId, q: QuestionId) -> Result<bool> {
        match self {
            OracleHandle::Simulation(s) => s.query(expert, q),
            OracleHandle::Threshold(t) => t.query(expert, q),
        }
    }

    fn count_holders(&self, q: QuestionId, among: &FixedBitSet) -> Result<usize> {
        match self {
            OracleHandle::Simulation(s) => s.count_holders(q, among),
            OracleHandle::Threshold(t) => t.count_holders(q, among),
        }
    }
}
