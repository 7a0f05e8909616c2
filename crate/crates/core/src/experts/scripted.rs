use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExpertId, OfferOutcome};
use crate::error::Result;
use crate::model::{EventKind, Fact, FactSet, QuestionId};

/// Retention rules for experts that are not value based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptedPolicy {
    /// Keeps the most recently offered facts; a re-offer refreshes recency.
    Recent,
    /// Keeps the first facts offered and never evicts.
    First,
    /// Evicts a uniformly random stored fact to make room for a new one.
    RandomEvict { seed: u64 },
    /// Only stores questions whose id is congruent to `residue`, recency order.
    Residue { modulus: u32, residue: u32 },
    /// Only stores facts revealed by evaluations, recency order.
    EvaluatedOnly,
}

impl ScriptedPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ScriptedPolicy::Recent => "recent",
            ScriptedPolicy::First => "first",
            ScriptedPolicy::RandomEvict { .. } => "random",
            ScriptedPolicy::Residue { .. } => "residue",
            ScriptedPolicy::EvaluatedOnly => "evaluated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedExpert {
    id: ExpertId,
    capacity: usize,
    memory: FactSet,
    policy: ScriptedPolicy,
    rng: ChaCha8Rng,
}

impl ScriptedExpert {
    pub fn new(id: ExpertId, capacity: usize, policy: ScriptedPolicy) -> Self {
        let seed = match policy {
            ScriptedPolicy::RandomEvict { seed } => seed,
            _ => 0,
        };
        ScriptedExpert {
            id,
            capacity,
            memory: FactSet::new(),
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn id(&self) -> ExpertId {
        self.id
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn policy(&self) -> ScriptedPolicy {
        self.policy
    }

    pub fn memory(&self) -> &FactSet {
        &self.memory
    }

    pub fn holds_question(&self, q: QuestionId) -> bool {
        self.memory.contains_question(q)
    }

    pub fn offer(&mut self, fact: Fact, kind: EventKind) -> Result<OfferOutcome> {
        if self.capacity == 0 {
            return Ok(OfferOutcome::default());
        }
        match self.policy {
            ScriptedPolicy::Recent => self.offer_recent(fact),
            ScriptedPolicy::First => {
                if self.memory.len() < self.capacity && self.memory.insert(fact)? {
                    Ok(OfferOutcome {
                        stored: true,
                        evicted: None,
                    })
                } else {
                    Ok(OfferOutcome::default())
                }
            }
            ScriptedPolicy::RandomEvict { .. } => {
                if self.memory.contains_question(fact.question) {
                    self.memory.insert(fact)?;
                    return Ok(OfferOutcome::default());
                }
                let evicted = if self.memory.len() >= self.capacity {
                    let slot = self.rng.random_range(0..self.memory.len());
                    self.memory.remove_at(slot)
                } else {
                    None
                };
                self.memory.insert(fact)?;
                Ok(OfferOutcome {
                    stored: true,
                    evicted,
                })
            }
            ScriptedPolicy::Residue { modulus, residue } => {
                if modulus != 0 && fact.question.0 % modulus == residue {
                    self.offer_recent(fact)
                } else {
                    Ok(OfferOutcome::default())
                }
            }
            ScriptedPolicy::EvaluatedOnly => {
                if kind == EventKind::Evaluate {
                    self.offer_recent(fact)
                } else {
                    Ok(OfferOutcome::default())
                }
            }
        }
    }

    fn offer_recent(&mut self, fact: Fact) -> Result<OfferOutcome> {
        if self.memory.contains_question(fact.question) {
            // validates the answer, then moves the fact to the back
            self.memory.insert(fact)?;
            self.memory.remove(fact.question);
            self.memory.insert(fact)?;
            return Ok(OfferOutcome::default());
        }
        self.memory.insert(fact)?;
        let evicted = if self.memory.len() > self.capacity {
            self.memory.remove_at(0)
        } else {
            None
        };
        Ok(OfferOutcome {
            stored: true,
            evicted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnswerId;

    fn fact(q: u32) -> Fact {
        Fact::new(QuestionId(q), AnswerId(q))
    }

    fn held(e: &ScriptedExpert) -> Vec<u32> {
        e.memory().questions().map(|q| q.0).collect()
    }

    #[test]
    fn recent_keeps_last_m() {
        let mut e = ScriptedExpert::new(ExpertId(0), 2, ScriptedPolicy::Recent);
        for q in [1, 2, 1, 3] {
            e.offer(fact(q), EventKind::Teach).unwrap();
        }
        assert_eq!(held(&e), vec![1, 3]);
    }

    #[test]
    fn first_never_evicts() {
        let mut e = ScriptedExpert::new(ExpertId(0), 2, ScriptedPolicy::First);
        for q in [4, 5, 6] {
            e.offer(fact(q), EventKind::Teach).unwrap();
        }
        assert_eq!(held(&e), vec![4, 5]);
    }

    #[test]
    fn residue_filters_questions() {
        let mut e = ScriptedExpert::new(ExpertId(0), 3, ScriptedPolicy::Residue { modulus: 2, residue: 1 });
        for q in 0..6 {
            e.offer(fact(q), EventKind::Teach).unwrap();
        }
        assert_eq!(held(&e), vec![1, 3, 5]);
    }

    #[test]
    fn evaluated_only_ignores_teaches() {
        let mut e = ScriptedExpert::new(ExpertId(0), 3, ScriptedPolicy::EvaluatedOnly);
        e.offer(fact(1), EventKind::Teach).unwrap();
        e.offer(fact(2), EventKind::Evaluate).unwrap();
        assert_eq!(held(&e), vec![2]);
    }

    #[test]
    fn random_evict_is_seeded() {
        let run = || {
            let mut e = ScriptedExpert::new(ExpertId(0), 3, ScriptedPolicy::RandomEvict { seed: 9 });
            for q in 0..40 {
                e.offer(fact(q % 11), EventKind::Teach).unwrap();
            }
            held(&e)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn every_policy_respects_capacity() {
        let policies = [
            ScriptedPolicy::Recent,
            ScriptedPolicy::First,
            ScriptedPolicy::RandomEvict { seed: 3 },
            ScriptedPolicy::Residue { modulus: 3, residue: 0 },
            ScriptedPolicy::EvaluatedOnly,
        ];
        for policy in policies {
            let mut e = ScriptedExpert::new(ExpertId(0), 4, policy);
            for i in 0..200u32 {
                let kind = if i % 3 == 0 { EventKind::Evaluate } else { EventKind::Teach };
                e.offer(fact((i * 7) % 23), kind).unwrap();
                assert!(e.memory().len() <= 4, "{policy:?}");
            }
        }
    }
}
