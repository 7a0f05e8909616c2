use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Learner, LearnerKind};
use crate::error::Result;
use crate::experts::ExpertOracle;
use crate::model::{Event, Fact, FactSet};

/// Ignores the experts: stores every fact and evicts a uniformly random one
/// once over budget.
#[derive(Debug, Clone)]
pub struct RandomEvict {
    budget: usize,
    memory: FactSet,
    rng: ChaCha8Rng,
}

impl RandomEvict {
    pub fn new(budget: usize, seed: u64) -> Self {
        RandomEvict {
            budget,
            memory: FactSet::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }
}

impl Learner for RandomEvict {
    fn kind(&self) -> LearnerKind {
        LearnerKind::RandomEvict
    }

    fn memory(&self) -> &FactSet {
        &self.memory
    }

    fn aux_state(&self) -> usize {
        0
    }

    fn observe(&mut self, _event: &Event, _oracle: &dyn ExpertOracle) -> Result<()> {
        Ok(())
    }

    fn absorb(&mut self, fact: Option<Fact>, _oracle: &dyn ExpertOracle) -> Result<()> {
        let Some(fact) = fact else {
            return Ok(());
        };
        if self.budget == 0 || self.memory.contains(&fact) {
            return Ok(());
        }
        if self.memory.len() >= self.budget {
            let slot = self.rng.random_range(0..self.memory.len());
            self.memory.remove_at(slot);
        }
        self.memory.insert(fact)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::{Expert, ExpertId, ExpertSuite, ScriptedExpert, ScriptedPolicy};
    use crate::model::{AnswerId, QuestionId};

    #[test]
    fn stays_within_budget_and_is_seeded() {
        let suite = ExpertSuite::new(
            vec![Expert::Scripted(ScriptedExpert::new(ExpertId(0), 1, ScriptedPolicy::Recent))],
            1,
            64,
        )
        .unwrap();
        let run = |seed| {
            let mut learner = RandomEvict::new(3, seed);
            for q in 0..50u32 {
                let fact = Fact::new(QuestionId(q % 17), AnswerId(q % 17));
                learner.absorb(Some(fact), &suite).unwrap();
                assert!(learner.memory().len() <= 3);
                assert!(learner.memory().contains(&fact));
            }
            learner.memory().clone()
        };
        assert_eq!(run(4), run(4));
    }
}
