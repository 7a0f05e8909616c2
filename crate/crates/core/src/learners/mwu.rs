use super::{weighted_keep, Learner, LearnerKind};
use crate::error::{Error, Result};
use crate::experts::{ExpertId, ExpertOracle};
use crate::model::{Event, Fact, FactSet};

pub const DEFAULT_GAMMA: f64 = 0.5;

/// Multiplicative weights with weight `(1 - gamma)^errors` per expert.
///
/// Weights are evaluated relative to the smallest error count, which leaves
/// every ratio unchanged and keeps the largest weight at 1.
#[derive(Debug, Clone)]
pub struct Mwu {
    gamma: f64,
    errors: Vec<u64>,
    memory: FactSet,
}

impl Mwu {
    pub fn new(num_experts: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::config(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        Ok(Mwu {
            gamma,
            errors: vec![0; num_experts],
            memory: FactSet::new(),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn errors(&self) -> &[u64] {
        &self.errors
    }

    /// Current weight of every expert, scaled so the best expert weighs 1.
    pub fn weights(&self) -> Vec<f64> {
        let floor = self.errors.iter().copied().min().unwrap_or(0);
        let base = 1.0 - self.gamma;
        self.errors
            .iter()
            .map(|&e| base.powi((e - floor).min(i32::MAX as u64) as i32))
            .collect()
    }
}

impl Learner for Mwu {
    fn kind(&self) -> LearnerKind {
        LearnerKind::Mwu
    }

    fn memory(&self) -> &FactSet {
        &self.memory
    }

    fn aux_state(&self) -> usize {
        self.errors.len()
    }

    fn error_counts(&self) -> Option<&[u64]> {
        Some(&self.errors)
    }

    fn observe(&mut self, event: &Event, oracle: &dyn ExpertOracle) -> Result<()> {
        if let Event::Evaluate(q) = *event {
            for (e, count) in self.errors.iter_mut().enumerate() {
                if !oracle.query(ExpertId(e), q)? {
                    *count += 1;
                }
            }
        }
        Ok(())
    }

    fn absorb(&mut self, fact: Option<Fact>, oracle: &dyn ExpertOracle) -> Result<()> {
        if let Some(fact) = fact {
            self.memory.insert(fact)?;
        }
        let weights = self.weights();
        let total: f64 = weights.iter().sum();
        let mut keep = Vec::with_capacity(self.memory.len());
        for f in self.memory.iter() {
            let mut save = 0.0;
            for (e, w) in weights.iter().enumerate() {
                if oracle.query(ExpertId(e), f.question)? {
                    save += w;
                }
            }
            keep.push(weighted_keep(save, total));
        }
        let mut verdicts = keep.into_iter();
        self.memory.retain(|_| verdicts.next().unwrap_or(false));
        Ok(())
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

    fn first_suite(n: usize, m: usize) -> ExpertSuite {
        let experts = (0..n)
            .map(|i| Expert::Scripted(ScriptedExpert::new(ExpertId(i), m, ScriptedPolicy::First)))
            .collect();
        ExpertSuite::new(experts, m, 16).unwrap()
    }

    // expert 0 stores odd questions, expert 1 even ones
    fn parity_suite() -> ExpertSuite {
        let experts = (0..2)
            .map(|i| {
                let policy = ScriptedPolicy::Residue { modulus: 2, residue: 1 - i as u32 };
                Expert::Scripted(ScriptedExpert::new(ExpertId(i), 1, policy))
            })
            .collect();
        ExpertSuite::new(experts, 1, 4).unwrap()
    }

    #[test]
    fn weight_halves_per_error() {
        let mut suite = parity_suite();
        suite.offer_all(fact(1), EventKind::Teach).unwrap();
        let mut mwu = Mwu::new(2, 0.5).unwrap();
        assert_eq!(mwu.weights(), vec![1.0, 1.0]);
        mwu.observe(&Event::Evaluate(QuestionId(1)), &suite).unwrap();
        assert_eq!(mwu.errors(), &[0, 1]);
        assert_eq!(mwu.weights(), vec![1.0, 0.5]);
    }

    #[test]
    fn teach_leaves_errors_alone() {
        let suite = parity_suite();
        let mut mwu = Mwu::new(2, 0.5).unwrap();
        mwu.observe(&Event::Teach(fact(2)), &suite).unwrap();
        assert_eq!(mwu.errors(), &[0, 0]);
    }

    #[test]
    fn half_mass_is_kept() {
        let mut suite = parity_suite();
        let mut mwu = Mwu::new(2, DEFAULT_GAMMA).unwrap();
        suite.offer_all(fact(1), EventKind::Teach).unwrap();
        mwu.absorb(Some(fact(1)), &suite).unwrap();
        assert!(mwu.memory().contains(&fact(1)));
    }

    #[test]
    fn below_half_mass_is_dropped() {
        let mut suite = parity_suite();
        let mut mwu = Mwu::new(2, DEFAULT_GAMMA).unwrap();
        suite.offer_all(fact(1), EventKind::Teach).unwrap();
        suite.offer_all(fact(2), EventKind::Teach).unwrap();
        // expert 0 errs on q2, leaving expert 1 the heavier one
        mwu.observe(&Event::Evaluate(QuestionId(2)), &suite).unwrap();
        mwu.absorb(Some(fact(1)), &suite).unwrap();
        assert!(!mwu.memory().contains(&fact(1)));
    }

    #[test]
    fn unanimous_memory_is_untouched() {
        let mut suite = first_suite(3, 2);
        let mut mwu = Mwu::new(3, DEFAULT_GAMMA).unwrap();
        for q in [1, 2] {
            suite.offer_all(fact(q), EventKind::Teach).unwrap();
            mwu.absorb(Some(fact(q)), &suite).unwrap();
        }
        assert_eq!(mwu.memory().len(), 2);
        suite.offer_all(fact(3), EventKind::Teach).unwrap();
        mwu.absorb(Some(fact(3)), &suite).unwrap();
        let held: Vec<u32> = mwu.memory().questions().map(|q| q.0).collect();
        assert_eq!(held, vec![1, 2]);
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(Mwu::new(2, 0.0).is_err());
        assert!(Mwu::new(2, 1.0).is_err());
    }
}
