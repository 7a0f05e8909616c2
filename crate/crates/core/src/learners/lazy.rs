use fixedbitset::FixedBitSet;

use super::{Learner, LearnerKind};
use crate::error::Result;
use crate::experts::{ExpertId, ExpertOracle};
use crate::model::{Event, Fact, FactSet};

/// Active-set bookkeeping shared by both lazy learners: error counters, the
/// 0/1 weights, and the shrink and hard-reset rules.
#[derive(Debug, Clone)]
pub(crate) struct ActiveSet {
    pub(crate) errors: Vec<u64>,
    pub(crate) active: FixedBitSet,
    pub(crate) active_len: usize,
    pub(crate) updates: u64,
    pub(crate) resets: u64,
}

/// What [`ActiveSet::settle`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Settled {
    pub(crate) shrunk: bool,
    pub(crate) reset: bool,
}

impl ActiveSet {
    pub(crate) fn new(n: usize) -> Self {
        let mut active = FixedBitSet::with_capacity(n);
        active.insert_range(..);
        ActiveSet {
            errors: vec![0; n],
            active,
            active_len: n,
            updates: 0,
            resets: 0,
        }
    }

    pub(crate) fn is_active(&self, e: usize) -> bool {
        self.active.contains(e)
    }

    /// Drops the active experts with at least `threshold` errors when they
    /// make up a third of the active set or more, then reactivates everyone
    /// with cleared counters if nobody is left.
    pub(crate) fn settle(&mut self, threshold: u64) -> Settled {
        let bad: Vec<usize> = self.active.ones().filter(|&e| self.errors[e] >= threshold).collect();
        let mut out = Settled::default();
        if self.active_len <= 3 * bad.len() {
            for &e in &bad {
                self.active.set(e, false);
            }
            self.active_len -= bad.len();
            self.updates += 1;
            out.shrunk = true;
        }
        if self.active_len == 0 {
            self.errors.fill(0);
            self.active.insert_range(..);
            self.active_len = self.errors.len();
            self.resets += 1;
            out.reset = true;
        }
        out
    }

    /// Remove rule: fewer than half of the active experts store the fact.
    #[inline]
    pub(crate) fn drops(&self, savers: usize) -> bool {
        2 * savers < self.active_len
    }
}

/// Lazy weights: experts carry weight 1 while active and 0 once dropped.
#[derive(Debug, Clone)]
pub struct Lazy {
    capacity: u64,
    set: ActiveSet,
    memory: FactSet,
}

impl Lazy {
    /// `capacity` is the expert memory size, which doubles as the error
    /// count that marks an expert as bad.
    pub fn new(num_experts: usize, capacity: usize) -> Self {
        Lazy {
            capacity: capacity as u64,
            set: ActiveSet::new(num_experts),
            memory: FactSet::new(),
        }
    }

    pub fn errors(&self) -> &[u64] {
        &self.set.errors
    }

    pub fn active(&self) -> &FixedBitSet {
        &self.set.active
    }
}

impl Learner for Lazy {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Lazy
    }

    fn memory(&self) -> &FactSet {
        &self.memory
    }

    fn aux_state(&self) -> usize {
        // one counter and one active flag per expert
        2 * self.set.errors.len()
    }

    fn active_count(&self) -> usize {
        self.set.active_len
    }

    fn observe(&mut self, event: &Event, oracle: &dyn ExpertOracle) -> Result<()> {
        let Event::Evaluate(q) = *event else {
            return Ok(());
        };
        // every expert is charged, active or not
        for (e, count) in self.set.errors.iter_mut().enumerate() {
            if !oracle.query(ExpertId(e), q)? {
                *count += 1;
            }
        }
        self.set.settle(self.capacity);
        Ok(())
    }

    fn absorb(&mut self, fact: Option<Fact>, oracle: &dyn ExpertOracle) -> Result<()> {
        if let Some(fact) = fact {
            self.memory.insert(fact)?;
        }
        let mut verdicts = Vec::with_capacity(self.memory.len());
        for q in self.memory.questions() {
            verdicts.push(!self.set.drops(oracle.count_holders(q, &self.set.active)?));
        }
        let mut verdicts = verdicts.into_iter();
        self.memory.retain(|_| verdicts.next().unwrap_or(false));
        Ok(())
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::{Expert, ExpertSuite, ScriptedExpert, ScriptedPolicy};
    use crate::model::{AnswerId, EventKind, QuestionId};

    fn fact(q: u32) -> Fact {
        Fact::new(QuestionId(q), AnswerId(q))
    }

    fn with_errors(errors: &[u64]) -> ActiveSet {
        let mut set = ActiveSet::new(errors.len());
        set.errors.copy_from_slice(errors);
        set
    }

    #[test]
    fn three_active_one_bad_shrinks() {
        // |active| = 3 <= 3 * |bad| = 3
        let mut set = with_errors(&[5, 0, 0]);
        let out = set.settle(5);
        assert!(out.shrunk && !out.reset);
        assert_eq!(set.active_len, 2);
        assert!(!set.is_active(0));
    }

    #[test]
    fn four_active_one_bad_stays() {
        let mut set = with_errors(&[5, 0, 0, 0]);
        assert_eq!(set.settle(5), Settled::default());
        assert_eq!(set.active_len, 4);
    }

    #[test]
    fn everyone_bad_hard_resets() {
        let mut set = with_errors(&[2, 3, 4]);
        let out = set.settle(2);
        assert!(out.shrunk && out.reset);
        assert_eq!(set.active_len, 3);
        assert_eq!(set.errors, vec![0, 0, 0]);
        assert_eq!(set.active.count_ones(..), 3);
        assert_eq!((set.updates, set.resets), (1, 1));
    }

    #[test]
    fn inactive_experts_are_still_charged() {
        let experts = (0..3)
            .map(|i| Expert::Scripted(ScriptedExpert::new(ExpertId(i), 1, ScriptedPolicy::EvaluatedOnly)))
            .collect();
        let suite = ExpertSuite::new(experts, 1, 4).unwrap();
        let mut lazy = Lazy::new(3, 1);
        // nobody holds q0: all three reach the bad count and reset
        lazy.observe(&Event::Evaluate(QuestionId(0)), &suite).unwrap();
        assert_eq!(lazy.hard_resets(), 1);
        assert_eq!(lazy.errors(), &[0, 0, 0]);

        lazy.set.active.set(2, false);
        lazy.set.active_len = 2;
        lazy.set.errors = vec![0, 0, 0];
        lazy.capacity = 10;
        lazy.observe(&Event::Evaluate(QuestionId(1)), &suite).unwrap();
        assert_eq!(lazy.errors(), &[1, 1, 1]);
    }

    #[test]
    fn keeps_facts_half_of_active_store() {
        // expert 0 keeps odd questions, expert 1 even, expert 2 none
        let experts = (0..3)
            .map(|i| {
                let policy = match i {
                    2 => ScriptedPolicy::EvaluatedOnly,
                    _ => ScriptedPolicy::Residue { modulus: 2, residue: 1 - i as u32 },
                };
                Expert::Scripted(ScriptedExpert::new(ExpertId(i), 2, policy))
            })
            .collect();
        let mut suite = ExpertSuite::new(experts, 2, 8).unwrap();
        let mut lazy = Lazy::new(3, 2);
        suite.offer_all(fact(1), EventKind::Teach).unwrap();
        lazy.absorb(Some(fact(1)), &suite).unwrap();
        // one of three active experts: 2 * 1 < 3, dropped
        assert!(lazy.memory().is_empty());

        lazy.set.active.set(2, false);
        lazy.set.active_len = 2;
        suite.offer_all(fact(3), EventKind::Teach).unwrap();
        lazy.absorb(Some(fact(3)), &suite).unwrap();
        // one of two: kept
        assert!(lazy.memory().contains(&fact(3)));
    }
}
