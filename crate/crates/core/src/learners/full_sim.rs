use super::{Learner, LearnerKind};
use crate::error::Result;
use crate::experts::ExpertOracle;
use crate::model::{Event, Fact, FactSet};
use fixedbitset::FixedBitSet;

/// Stores the union of all expert memories.
#[derive(Debug, Clone)]
pub struct FullSim {
    everyone: FixedBitSet,
    memory: FactSet,
}

impl FullSim {
    pub fn new(num_experts: usize) -> Self {
        let mut everyone = FixedBitSet::with_capacity(num_experts);
        everyone.insert_range(..);
        FullSim {
            everyone,
            memory: FactSet::new(),
        }
    }
}

impl Learner for FullSim {
    fn kind(&self) -> LearnerKind {
        LearnerKind::FullSim
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

    fn absorb(&mut self, fact: Option<Fact>, oracle: &dyn ExpertOracle) -> Result<()> {
        // expert memories only ever gain the fact offered this step
        if let Some(fact) = fact {
            if oracle.count_holders(fact.question, &self.everyone)? > 0 {
                self.memory.insert(fact)?;
            }
        }
        let mut verdicts = Vec::with_capacity(self.memory.len());
        for q in self.memory.questions() {
            verdicts.push(oracle.count_holders(q, &self.everyone)? > 0);
        }
        let mut verdicts = verdicts.into_iter();
        self.memory.retain(|_| verdicts.next().unwrap_or(false));
        Ok(())
    }
}
