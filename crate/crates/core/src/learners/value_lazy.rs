//! Lazy weights for value-based experts, without an oracle.
//!
//! Instead of asking whether expert `e` stores `q`, the learner compares
//! `v_e(q)` against an estimate `T_e` of the expert's true threshold. The
//! estimate is the `M`-th largest value over the questions the learner still
//! remembers (facts plus recorded minor mistakes), so it never exceeds the
//! true threshold. A second estimate, the pre-threshold, is built from the
//! minor mistakes alone and decides when a minor mistake gets charged to
//! the experts after all.
//!
//! Thresholds are stored as the question attaining them; values are looked
//! up in the [`ValueTable`] on demand. `None` is the under-full sentinel 0.

use indexmap::IndexSet;

use super::lazy::ActiveSet;
use super::{Learner, LearnerKind};
use crate::error::Result;
use crate::experts::{ExpertId, ExpertOracle, ValueTable};
use crate::model::{Event, Fact, FactSet, QuestionId};

/// When the threshold estimates are refreshed relative to storing the
/// step's fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRefresh {
    /// Refresh over the remembered questions, then store the new fact. With
    /// this order a fact that arrives above every estimate is kept without
    /// being counted, and memory can reach `2M + 1`.
    BeforeInsert,
    /// Store the new fact, then refresh over a pool that includes it.
    #[default]
    AfterInsert,
}

#[derive(Debug, Clone)]
pub struct ValueLazy {
    values: ValueTable,
    capacity: usize,
    set: ActiveSet,
    thresholds: Vec<Option<QuestionId>>,
    pre_thresholds: Vec<Option<QuestionId>>,
    memory: FactSet,
    minor: IndexSet<QuestionId>,
    refresh: ThresholdRefresh,
    // questions that joined the pool since the last refresh
    pending: Vec<QuestionId>,
    // set when experts are reactivated and need a full refresh
    stale: bool,
    scratch: Vec<(u64, QuestionId)>,
    threshold_scratch: Vec<u64>,
    major_charges: u64,
    minor_recorded: u64,
}

fn value_of(values: &ValueTable, e: usize, threshold: Option<QuestionId>) -> u64 {
    threshold
        .and_then(|q| values.row(q))
        .map_or(0, |row| row[e])
}

/// `m`-th largest of `pool` by expert `e`'s value, with the question that
/// attains it, or `None` when the pool is smaller than `m`.
fn mth_largest(
    values: &ValueTable,
    e: usize,
    pool: impl Iterator<Item = QuestionId>,
    m: usize,
    scratch: &mut Vec<(u64, QuestionId)>,
) -> Result<Option<(u64, QuestionId)>> {
    scratch.clear();
    for q in pool {
        scratch.push((values.value(ExpertId(e), q)?, q));
    }
    if m == 0 || scratch.len() < m {
        return Ok(None);
    }
    let (_, nth, _) = scratch.select_nth_unstable_by(m - 1, |a, b| b.0.cmp(&a.0));
    Ok(Some(*nth))
}

impl ValueLazy {
    pub fn new(values: ValueTable, capacity: usize) -> Self {
        Self::with_refresh(values, capacity, ThresholdRefresh::default())
    }

    pub fn with_refresh(values: ValueTable, capacity: usize, refresh: ThresholdRefresh) -> Self {
        let n = values.num_experts();
        ValueLazy {
            values,
            capacity,
            set: ActiveSet::new(n),
            thresholds: vec![None; n],
            pre_thresholds: vec![None; n],
            memory: FactSet::new(),
            minor: IndexSet::new(),
            refresh,
            pending: Vec::new(),
            stale: false,
            scratch: Vec::new(),
            threshold_scratch: Vec::new(),
            major_charges: 0,
            minor_recorded: 0,
        }
    }

    pub fn refresh_order(&self) -> ThresholdRefresh {
        self.refresh
    }

    pub fn num_experts(&self) -> usize {
        self.values.num_experts()
    }

    pub fn errors(&self) -> &[u64] {
        &self.set.errors
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.set.is_active(e)
    }

    pub fn threshold(&self, e: usize) -> u64 {
        value_of(&self.values, e, self.thresholds[e])
    }

    pub fn pre_threshold(&self, e: usize) -> u64 {
        value_of(&self.values, e, self.pre_thresholds[e])
    }

    /// Question attaining the threshold estimate, if it has left the sentinel.
    pub fn threshold_question(&self, e: usize) -> Option<QuestionId> {
        self.thresholds[e]
    }

    pub fn minor_mistakes(&self) -> impl Iterator<Item = QuestionId> + '_ {
        self.minor.iter().copied()
    }

    /// Evaluations charged directly to the failing experts.
    pub fn major_charges(&self) -> u64 {
        self.major_charges
    }

    /// Evaluations recorded as minor mistakes.
    pub fn minor_recorded(&self) -> u64 {
        self.minor_recorded
    }

    fn pool(&self) -> impl Iterator<Item = QuestionId> + '_ {
        self.memory
            .questions()
            .chain(self.minor.iter().copied().filter(|&q| !self.memory.contains_question(q)))
    }

    fn note_pool_entry(&mut self, q: QuestionId) {
        self.pending.push(q);
    }

    /// Raises each active expert's pre-threshold to the `M`-th largest value
    /// among the minor mistakes (with `q` added), then charges and forgets
    /// every minor mistake that at least half of the active experts now
    /// fail.
    pub fn update_pre_threshold(&mut self, q: QuestionId) -> Result<()> {
        self.values.defined_row(q)?;
        if self.minor.insert(q) {
            self.note_pool_entry(q);
        }
        for e in self.set.active.ones() {
            let top = mth_largest(&self.values, e, self.minor.iter().copied(), self.capacity, &mut self.scratch)?;
            if let Some((x, attained)) = top {
                if x > value_of(&self.values, e, self.pre_thresholds[e]) {
                    self.pre_thresholds[e] = Some(attained);
                }
            }
        }
        let snapshot: Vec<QuestionId> = self.minor.iter().copied().collect();
        let mut failing = Vec::new();
        for q in snapshot {
            let row = self.values.defined_row(q)?;
            failing.clear();
            failing.extend(
                self.set
                    .active
                    .ones()
                    .filter(|&e| row[e] < value_of(&self.values, e, self.pre_thresholds[e])),
            );
            if 2 * failing.len() >= self.set.active_len {
                for &e in &failing {
                    self.set.errors[e] += 1;
                }
                self.major_charges += 1;
                self.minor.shift_remove(&q);
            }
        }
        Ok(())
    }

    /// Raises each active expert's threshold estimate to the `M`-th largest
    /// value over the remembered questions. Only experts whose estimate
    /// some newly remembered question exceeds are recomputed; for the
    /// others the pool's `M`-th largest value cannot have passed the
    /// estimate.
    pub fn update_threshold(&mut self) -> Result<()> {
        let pending = std::mem::take(&mut self.pending);
        let all = std::mem::replace(&mut self.stale, false);
        let mut dirty: Vec<usize> = Vec::new();
        for e in self.set.active.ones() {
            let current = value_of(&self.values, e, self.thresholds[e]);
            let mut raise = all;
            for &q in &pending {
                if raise {
                    break;
                }
                raise = self.values.value(ExpertId(e), q)? > current;
            }
            if raise {
                dirty.push(e);
            }
        }
        if dirty.is_empty() {
            return Ok(());
        }
        let pool: Vec<QuestionId> = self.pool().collect();
        for e in dirty {
            let top = mth_largest(&self.values, e, pool.iter().copied(), self.capacity, &mut self.scratch)?;
            if let Some((x, attained)) = top {
                if x > value_of(&self.values, e, self.thresholds[e]) {
                    self.thresholds[e] = Some(attained);
                }
            }
        }
        Ok(())
    }

    /// Reference refresh over every active expert with no pruning.
    #[cfg(test)]
    fn update_threshold_exhaustive(&mut self) -> Result<()> {
        self.pending.clear();
        self.stale = false;
        let pool: Vec<QuestionId> = self.pool().collect();
        for e in self.set.active.ones().collect::<Vec<_>>() {
            let top = mth_largest(&self.values, e, pool.iter().copied(), self.capacity, &mut self.scratch)?;
            if let Some((x, attained)) = top {
                if x > value_of(&self.values, e, self.thresholds[e]) {
                    self.thresholds[e] = Some(attained);
                }
            }
        }
        Ok(())
    }

    fn store(&mut self, fact: Option<Fact>) -> Result<()> {
        if let Some(fact) = fact {
            self.values.defined_row(fact.question)?;
            if self.memory.insert(fact)? {
                self.note_pool_entry(fact.question);
            }
        }
        Ok(())
    }

    fn filter_memory(&mut self) {
        let n = self.values.num_experts();
        self.threshold_scratch.clear();
        self.threshold_scratch
            .extend((0..n).map(|e| value_of(&self.values, e, self.thresholds[e])));
        let thresholds = &self.threshold_scratch;
        let values = &self.values;
        let set = &self.set;
        self.memory.retain(|f| {
            let Some(row) = values.row(f.question) else {
                return false;
            };
            let savers = set.active.ones().filter(|&e| row[e] >= thresholds[e]).count();
            !set.drops(savers)
        });
    }
}

impl Learner for ValueLazy {
    fn kind(&self) -> LearnerKind {
        LearnerKind::ValueLazy
    }

    fn memory(&self) -> &FactSet {
        &self.memory
    }

    fn question_memory(&self) -> usize {
        self.minor.len()
    }

    fn aux_state(&self) -> usize {
        // error counter, two thresholds and an active flag per expert
        4 * self.values.num_experts()
    }

    fn active_count(&self) -> usize {
        self.set.active_len
    }

    fn observe(&mut self, event: &Event, _oracle: &dyn ExpertOracle) -> Result<()> {
        let Event::Evaluate(q) = *event else {
            return Ok(());
        };
        if self.memory.contains_question(q) {
            return Ok(());
        }
        let row = self.values.defined_row(q)?;
        let failed: Vec<usize> = self
            .set
            .active
            .ones()
            .filter(|&e| row[e] < value_of(&self.values, e, self.thresholds[e]))
            .collect();
        if 2 * failed.len() < self.set.active_len {
            self.minor_recorded += 1;
            self.update_pre_threshold(q)?;
        } else {
            for e in failed {
                self.set.errors[e] += 1;
            }
            self.major_charges += 1;
        }
        if self.set.settle(self.capacity as u64).reset {
            self.stale = true;
        }
        Ok(())
    }

    fn absorb(&mut self, fact: Option<Fact>, _oracle: &dyn ExpertOracle) -> Result<()> {
        match self.refresh {
            ThresholdRefresh::BeforeInsert => {
                self.update_threshold()?;
                self.store(fact)?;
            }
            ThresholdRefresh::AfterInsert => {
                self.store(fact)?;
                self.update_threshold()?;
            }
        }
        self.filter_memory();
        Ok(())
    }

    fn as_value_lazy(&self) -> Option<&ValueLazy> {
        Some(self)
    }

    fn active_updates(&self) -> u64 {
        self.set.updates
    }

    fn error_counts(&self) -> Option<&[u64]> {
        Some(&self.set.errors)
    }

    fn hard_resets(&self) -> u64 {
        self.set.resets
    }
}
