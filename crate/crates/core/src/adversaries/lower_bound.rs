//! Adaptive adversary that forces about `M/2` mistakes per level of a
//! `2c`-ary expert tree on any learner holding at most `cM` facts, while one
//! leaf group of experts makes none, followed by rounds that cost the
//! learner one mistake each and the experts at most one.
//!
//! Phase one teaches `D = floor(log_{2c} N)` collections of `2cM` fresh
//! facts. Collection `k` is cut into `2c` blocks of `M` facts, and the
//! experts whose `k`-th tree digit is `i` rank block `i` of collection `k`
//! above everything taught before. After each collection the adversary
//! looks at the learner's memory, picks a block the learner mostly forgot,
//! and evaluates all of it. Phase two repeats `opt` times: teach `cM + 1`
//! fresh facts, then evaluate one the learner does not hold.
//!
//! Value functions are injective. Block values are the largest and grow
//! with the collection index; other collection facts sit below them and
//! phase-two facts lowest of all, so experts keep exactly their latest
//! block.

use std::collections::VecDeque;

use super::{Adversary, AdversaryView};
use crate::error::{Error, Result};
use crate::experts::{ExpertId, ExpertSuite, ValueFunction};
use crate::model::{AnswerId, Event, Fact, QuestionId, Vocabulary};

#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    c: usize,
    n: usize,
    m: usize,
    opt: usize,
    depth: usize,
    leaf_size: usize,
    functions: Vec<ValueFunction>,
}

impl LowerBoundInstance {
    pub fn build(c: usize, n: usize, m: usize, opt: usize) -> Result<Self> {
        if c == 0 || m == 0 {
            return Err(Error::config("lower-bound instance needs c >= 1 and M >= 1"));
        }
        let branching = 2 * c;
        if n < branching {
            return Err(Error::config(format!(
                "lower-bound instance needs N >= 2c, got N = {n} with c = {c}"
            )));
        }
        let mut depth = 0;
        let mut leaves = 1usize;
        while leaves.checked_mul(branching).is_some_and(|l| l <= n) {
            leaves *= branching;
            depth += 1;
        }
        let mut inst = LowerBoundInstance {
            c,
            n,
            m,
            opt,
            depth,
            leaf_size: n / leaves,
            functions: Vec::new(),
        };
        inst.functions = (0..n).map(|e| inst.value_function(e)).collect::<Result<_>>()?;
        Ok(inst)
    }

    fn value_function(&self, e: usize) -> Result<ValueFunction> {
        let collection_facts = self.collection_facts();
        let phase_two = self.universe() - collection_facts;
        let mut values = vec![0u64; self.universe()];
        for (g, v) in values.iter_mut().enumerate() {
            *v = if g < collection_facts {
                (phase_two + 1 + g) as u64
            } else {
                (1 + g - collection_facts) as u64
            };
        }
        if self.leaf_of(e).is_some() {
            for k in 0..self.depth {
                let block = self.block_of(e, k).expect("leaf experts have a block per level");
                for offset in 0..self.m {
                    let q = self.collection_question(k, block * self.m + offset);
                    values[q.index()] = (phase_two + collection_facts + 1 + k * self.m + offset) as u64;
                }
            }
        }
        ValueFunction::new(ExpertId(e), values)
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn num_experts(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> usize {
        self.m
    }

    pub fn opt(&self) -> usize {
        self.opt
    }

    /// Number of collections, `floor(log_{2c} N)`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> usize {
        2 * self.c
    }

    pub fn collection_size(&self) -> usize {
        2 * self.c * self.m
    }

    fn collection_facts(&self) -> usize {
        self.depth * self.collection_size()
    }

    /// Fresh facts taught per phase-two round.
    pub fn round_size(&self) -> usize {
        self.c * self.m + 1
    }

    pub fn universe(&self) -> usize {
        self.collection_facts() + self.opt * self.round_size()
    }

    /// Memory the construction assumes of the learner.
    pub fn learner_budget(&self) -> usize {
        self.c * self.m
    }

    /// Experts per leaf group.
    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn collection_question(&self, k: usize, j: usize) -> QuestionId {
        QuestionId((k * self.collection_size() + j) as u32)
    }

    pub fn round_question(&self, r: usize, i: usize) -> QuestionId {
        QuestionId((self.collection_facts() + r * self.round_size() + i) as u32)
    }

    /// Leaf group of expert `e`, or `None` if the expert was left over.
    pub fn leaf_of(&self, e: usize) -> Option<usize> {
        let leaves = self.branching().pow(self.depth as u32);
        let leaf = e / self.leaf_size;
        (leaf < leaves).then_some(leaf)
    }

    /// Block of collection `k` that expert `e` ranks highest.
    pub fn block_of(&self, e: usize, k: usize) -> Option<usize> {
        let leaf = self.leaf_of(e)?;
        if k >= self.depth {
            return None;
        }
        let below = self.branching().pow((self.depth - 1 - k) as u32);
        Some(leaf / below % self.branching())
    }

    pub fn value_functions(&self) -> &[ValueFunction] {
        &self.functions
    }

    pub fn suite(&self) -> Result<ExpertSuite> {
        ExpertSuite::value_based(self.functions.clone(), self.m, self.universe())
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::numbered(self.universe())
    }

    /// Mistakes every learner within budget makes on the full stream.
    pub fn guaranteed_mistakes(&self) -> usize {
        self.depth * (self.m / 2) + self.opt
    }

    pub fn phase_one_len(&self) -> usize {
        self.depth * (self.collection_size() + self.m)
    }

    pub fn stream_len(&self) -> usize {
        self.phase_one_len() + self.opt * (self.round_size() + 1)
    }
}

fn fact(q: QuestionId) -> Fact {
    Fact::new(q, AnswerId(q.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    TeachCollection(usize),
    ProbeCollection(usize),
    TeachRound(usize),
    ProbeRound(usize),
    Done,
}

#[derive(Debug, Clone)]
pub struct LowerBoundAdversary {
    instance: LowerBoundInstance,
    phase: Phase,
    queue: VecDeque<Event>,
    chosen: Vec<usize>,
    stored_in_chosen: Vec<usize>,
}

impl LowerBoundAdversary {
    pub fn new(instance: LowerBoundInstance) -> Self {
        let phase = if instance.depth > 0 {
            Phase::TeachCollection(0)
        } else if instance.opt > 0 {
            Phase::TeachRound(0)
        } else {
            Phase::Done
        };
        LowerBoundAdversary {
            instance,
            phase,
            queue: VecDeque::new(),
            chosen: Vec::new(),
            stored_in_chosen: Vec::new(),
        }
    }

    pub fn instance(&self) -> &LowerBoundInstance {
        &self.instance
    }

    /// Blocks picked so far, one per collection.
    pub fn chosen_blocks(&self) -> &[usize] {
        &self.chosen
    }

    /// How many facts of each chosen block the learner held when it was
    /// picked.
    pub fn stored_in_chosen(&self) -> &[usize] {
        &self.stored_in_chosen
    }

    /// Experts whose blocks match every choice made so far.
    pub fn survivors(&self) -> Vec<ExpertId> {
        (0..self.instance.n)
            .filter(|&e| {
                self.instance.leaf_of(e).is_some()
                    && self
                        .chosen
                        .iter()
                        .enumerate()
                        .all(|(k, &b)| self.instance.block_of(e, k) == Some(b))
            })
            .map(ExpertId)
            .collect()
    }

    /// Lowest block with fewer than `floor(M/2)` facts held, else the lowest
    /// with at most `floor(M/2)`.
    pub fn select_block(&self, k: usize, view: &AdversaryView<'_>) -> Result<(usize, usize)> {
        let inst = &self.instance;
        let counts: Vec<usize> = (0..inst.branching())
            .map(|b| {
                (0..inst.m)
                    .filter(|&o| view.learner_memory.contains(&fact(inst.collection_question(k, b * inst.m + o))))
                    .count()
            })
            .collect();
        let half = inst.m / 2;
        counts
            .iter()
            .position(|&s| s < half)
            .or_else(|| counts.iter().position(|&s| s <= half))
            .map(|b| (b, counts[b]))
            .ok_or_else(|| Error::Invariant {
                step: view.history.len() + 1,
                message: format!(
                    "no block of collection {k} has at most {half} facts held (held per block: {counts:?}); \
                     the learner exceeds its budget of {}",
                    inst.learner_budget()
                ),
            })
    }

    fn advance(&mut self, view: &AdversaryView<'_>) -> Result<()> {
        let inst = &self.instance;
        let next_round = |r: usize| {
            if r < inst.opt {
                Phase::TeachRound(r)
            } else {
                Phase::Done
            }
        };
        self.phase = match self.phase {
            Phase::TeachCollection(k) => {
                self.queue.extend(
                    (0..inst.collection_size()).map(|j| Event::Teach(fact(inst.collection_question(k, j)))),
                );
                Phase::ProbeCollection(k)
            }
            Phase::ProbeCollection(k) => {
                let (block, stored) = self.select_block(k, view)?;
                let inst = &self.instance;
                self.queue
                    .extend((0..inst.m).map(|o| Event::Evaluate(inst.collection_question(k, block * inst.m + o))));
                self.chosen.push(block);
                self.stored_in_chosen.push(stored);
                if k + 1 < inst.depth {
                    Phase::TeachCollection(k + 1)
                } else {
                    next_round(0)
                }
            }
            Phase::TeachRound(r) => {
                self.queue
                    .extend((0..inst.round_size()).map(|i| Event::Teach(fact(inst.round_question(r, i)))));
                Phase::ProbeRound(r)
            }
            Phase::ProbeRound(r) => {
                let missing = (0..inst.round_size())
                    .map(|i| inst.round_question(r, i))
                    .find(|&q| !view.learner_memory.contains(&fact(q)))
                    .ok_or_else(|| Error::Invariant {
                        step: view.history.len() + 1,
                        message: format!(
                            "learner holds all {} facts of round {r}; it exceeds its budget of {}",
                            inst.round_size(),
                            inst.learner_budget()
                        ),
                    })?;
                self.queue.push_back(Event::Evaluate(missing));
                next_round(r + 1)
            }
            Phase::Done => Phase::Done,
        };
        Ok(())
    }
}

impl Adversary for LowerBoundAdversary {
    fn next_event(&mut self, view: &AdversaryView<'_>) -> Result<Option<Event>> {
        while self.queue.is_empty() && self.phase != Phase::Done {
            self.advance(view)?;
        }
        Ok(self.queue.pop_front())
    }

    fn declares_sequential(&self) -> bool {
        true
    }
}
