use std::io::Write;

use super::{Event, EventKind, QuestionId, Vocabulary};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "t",
    "kind",
    "qid",
    "cost",
    "L",
    "opt",
    "fact_mem",
    "question_mem",
    "aux_state",
    "active_experts",
];

/// Learner-side sizes sampled at the end of a step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MemoryCounts {
    pub fact_mem: usize,
    pub question_mem: usize,
    pub aux_state: usize,
    pub active_experts: usize,
}

/// One row of the ledger. `learner_mistakes` and `opt` are running totals
/// after this step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub kind: EventKind,
    pub question: QuestionId,
    pub cost: u8,
    pub learner_mistakes: u64,
    pub opt: u64,
    pub memory: MemoryCounts,
}

/// Per-step costs and running aggregates of one game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameLedger {
    steps: Vec<StepRecord>,
    expert_mistakes: Vec<u64>,
    learner_mistakes: u64,
    opt: u64,
}

impl GameLedger {
    pub fn new(num_experts: usize) -> Self {
        GameLedger {
            steps: Vec::new(),
            expert_mistakes: vec![0; num_experts],
            learner_mistakes: 0,
            opt: 0,
        }
    }

    /// Appends step `t = len + 1`. `expert_costs` must have one 0/1 entry per
    /// expert; Teach steps pass all zeros.
    pub fn record_step(
        &mut self,
        event: &Event,
        cost: u8,
        expert_costs: &[u8],
        memory: MemoryCounts,
    ) -> Result<()> {
        if cost > 1 {
            return Err(Error::InvalidCost(cost));
        }
        if expert_costs.len() != self.expert_mistakes.len() {
            return Err(Error::CostArity {
                got: expert_costs.len(),
                expected: self.expert_mistakes.len(),
            });
        }
        if let Some(&bad) = expert_costs.iter().find(|&&c| c > 1) {
            return Err(Error::InvalidCost(bad));
        }
        for (total, &c) in self.expert_mistakes.iter_mut().zip(expert_costs) {
            *total += u64::from(c);
        }
        self.learner_mistakes += u64::from(cost);
        self.opt = self.expert_mistakes.iter().copied().min().unwrap_or(0);
        self.steps.push(StepRecord {
            kind: event.kind(),
            question: event.question(),
            cost,
            learner_mistakes: self.learner_mistakes,
            opt: self.opt,
            memory,
        });
        Ok(())
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn learner_mistakes(&self) -> u64 {
        self.learner_mistakes
    }

    pub fn opt(&self) -> u64 {
        self.opt
    }

    pub fn expert_mistakes(&self) -> &[u64] {
        &self.expert_mistakes
    }

    pub fn num_experts(&self) -> usize {
        self.expert_mistakes.len()
    }

    pub fn max_fact_mem(&self) -> usize {
        self.steps.iter().map(|s| s.memory.fact_mem).max().unwrap_or(0)
    }

    pub fn max_question_mem(&self) -> usize {
        self.steps.iter().map(|s| s.memory.question_mem).max().unwrap_or(0)
    }

    pub fn max_aux_state(&self) -> usize {
        self.steps.iter().map(|s| s.memory.aux_state).max().unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, writer: W, vocab: &Vocabulary) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(CSV_HEADER)?;
        for (i, s) in self.steps.iter().enumerate() {
            out.write_record([
                (i + 1).to_string(),
                s.kind.tag().to_owned(),
                vocab.question_name(s.question).to_owned(),
                s.cost.to_string(),
                s.learner_mistakes.to_string(),
                s.opt.to_string(),
                s.memory.fact_mem.to_string(),
                s.memory.question_mem.to_string(),
                s.memory.aux_state.to_string(),
                s.memory.active_experts.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnswerId, Fact};

    fn eval(q: u32) -> Event {
        Event::Evaluate(QuestionId(q))
    }

    #[test]
    fn running_totals() {
        let mut ledger = GameLedger::new(2);
        ledger.record_step(&eval(0), 1, &[0, 0], MemoryCounts::default()).unwrap();
        assert_eq!(ledger.learner_mistakes(), 1);

        let mut ledger = GameLedger::new(1);
        for _ in 0..5 {
            ledger.record_step(&eval(0), 1, &[0], MemoryCounts::default()).unwrap();
        }
        ledger.record_step(&eval(0), 0, &[0], MemoryCounts::default()).unwrap();
        assert_eq!(ledger.learner_mistakes(), 5);
    }

    #[test]
    fn opt_is_min_over_experts() {
        let mut ledger = GameLedger::new(2);
        ledger.record_step(&eval(0), 0, &[1, 0], MemoryCounts::default()).unwrap();
        assert_eq!(ledger.opt(), 0);
        assert_eq!(ledger.expert_mistakes(), &[1, 0]);
    }

    #[test]
    fn rejects_non_binary_costs() {
        let mut ledger = GameLedger::new(1);
        assert!(matches!(
            ledger.record_step(&eval(0), 2, &[0], MemoryCounts::default()),
            Err(Error::InvalidCost(2))
        ));
        assert!(matches!(
            ledger.record_step(&eval(0), 0, &[3], MemoryCounts::default()),
            Err(Error::InvalidCost(3))
        ));
        assert!(matches!(
            ledger.record_step(&eval(0), 0, &[0, 0], MemoryCounts::default()),
            Err(Error::CostArity { .. })
        ));
        assert!(ledger.is_empty());
    }

    #[test]
    fn csv_has_header_and_one_row_per_step() {
        let vocab = Vocabulary::numbered(2);
        let mut ledger = GameLedger::new(1);
        let teach = Event::Teach(Fact::new(QuestionId(1), AnswerId(1)));
        ledger.record_step(&teach, 0, &[0], MemoryCounts { fact_mem: 1, ..Default::default() }).unwrap();
        ledger.record_step(&eval(1), 0, &[1], MemoryCounts { fact_mem: 1, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        ledger.write_csv(&mut buf, &vocab).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "t,kind,qid,cost,L,opt,fact_mem,question_mem,aux_state,active_experts");
        assert_eq!(lines[1], "1,T,q1,0,0,0,1,0,0,0");
        assert_eq!(lines[2], "2,E,q1,0,0,1,1,0,0,0");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn aggregates_are_monotone_and_consistent(
                rows in prop::collection::vec((0u8..2, prop::collection::vec(0u8..2, 3)), 0..200)
            ) {
                let mut ledger = GameLedger::new(3);
                for (cost, experts) in &rows {
                    ledger.record_step(&eval(0), *cost, experts, MemoryCounts::default()).unwrap();
                }
                let total: u64 = ledger.steps().iter().map(|s| u64::from(s.cost)).sum();
                prop_assert_eq!(total, ledger.learner_mistakes());
                for w in ledger.steps().windows(2) {
                    prop_assert!(w[0].learner_mistakes <= w[1].learner_mistakes);
                    prop_assert!(w[0].opt <= w[1].opt);
                }
                for &e in ledger.expert_mistakes() {
                    prop_assert!(ledger.opt() <= e);
                }
            }
        }
    }
}
