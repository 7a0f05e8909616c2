//! Shared vocabulary of the question-answering game: facts, events, streams
//! and the per-step cost and ledger accounting.
//!
//! Question and answer tokens are interned into dense integer ids by a
//! [`Vocabulary`]. Answers are opaque: two facts are the same fact exactly
//! when both ids match, and nothing ever compares answers otherwise.

mod io;
mod ledger;

use std::fmt;

use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Result};

pub use io::{format_stream, parse_stream, read_stream, write_stream};
pub use ledger::{GameLedger, MemoryCounts, StepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuestionId(pub u32);

impl QuestionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnswerId(pub u32);

/// A question together with its ground-truth answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fact {
    pub question: QuestionId,
    pub answer: AnswerId,
}

impl Fact {
    pub fn new(question: QuestionId, answer: AnswerId) -> Self {
        Fact { question, answer }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Teach,
    Evaluate,
}

impl EventKind {
    pub fn tag(self) -> &'static str {
        match self {
            EventKind::Teach => "T",
            EventKind::Evaluate => "E",
        }
    }
}

/// One adversary move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Teach(Fact),
    Evaluate(QuestionId),
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::Teach(_) => EventKind::Teach,
            Event::Evaluate(_) => EventKind::Evaluate,
        }
    }

    pub fn question(&self) -> QuestionId {
        match *self {
            Event::Teach(fact) => fact.question,
            Event::Evaluate(q) => q,
        }
    }
}

/// A finite event sequence plus the adversary's claim that it only evaluates
/// previously taught questions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stream {
    pub events: Vec<Event>,
    pub sequential: bool,
}

impl Stream {
    pub fn new(events: Vec<Event>, sequential: bool) -> Self {
        Stream { events, sequential }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Interns question and answer tokens.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    questions: IndexSet<String>,
    answers: IndexSet<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Vocabulary with questions `q0..q{n-1}` and matching answers `a0..`.
    pub fn numbered(n: usize) -> Self {
        let mut vocab = Self::new();
        for i in 0..n {
            vocab.question(&format!("q{i}"));
            vocab.answer(&format!("a{i}"));
        }
        vocab
    }

    pub fn question(&mut self, token: &str) -> QuestionId {
        let (idx, _) = self.questions.insert_full(token.to_owned());
        QuestionId(idx as u32)
    }

    pub fn answer(&mut self, token: &str) -> AnswerId {
        let (idx, _) = self.answers.insert_full(token.to_owned());
        AnswerId(idx as u32)
    }

    pub fn lookup_question(&self, token: &str) -> Option<QuestionId> {
        self.questions.get_index_of(token).map(|i| QuestionId(i as u32))
    }

    pub fn question_name(&self, q: QuestionId) -> &str {
        self.questions
            .get_index(q.index())
            .map(String::as_str)
            .unwrap_or("?")
    }

    pub fn answer_name(&self, a: AnswerId) -> &str {
        self.answers
            .get_index(a.0 as usize)
            .map(String::as_str)
            .unwrap_or("?")
    }

    pub fn num_questions(&self) -> usize {
        self.questions.len()
    }
}

/// The ground-truth map from questions to answers, learned from Teach events.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    answers: Vec<Option<AnswerId>>,
}

impl GroundTruth {
    pub fn new(universe: usize) -> Self {
        GroundTruth {
            answers: vec![None; universe],
        }
    }

    /// Records `fact`; a second answer for the same question is rejected.
    pub fn learn(&mut self, fact: Fact) -> Result<()> {
        let idx = fact.question.index();
        if idx >= self.answers.len() {
            self.answers.resize(idx + 1, None);
        }
        match self.answers[idx] {
            Some(a) if a != fact.answer => Err(Error::ConflictingAnswer {
                question: fact.question,
            }),
            _ => {
                self.answers[idx] = Some(fact.answer);
                Ok(())
            }
        }
    }

    pub fn answer(&self, q: QuestionId) -> Option<AnswerId> {
        self.answers.get(q.index()).copied().flatten()
    }

    pub fn fact(&self, q: QuestionId) -> Option<Fact> {
        self.answer(q).map(|a| Fact::new(q, a))
    }
}

/// Anything that can say whether it currently holds a fact.
pub trait FactMemory {
    fn holds(&self, fact: &Fact) -> bool;
}

/// Insertion-ordered set of facts with at most one answer per question.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactSet {
    facts: IndexMap<QuestionId, AnswerId>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `fact`, returning whether it was newly added.
    pub fn insert(&mut self, fact: Fact) -> Result<bool> {
        match self.facts.get(&fact.question) {
            Some(&a) if a == fact.answer => Ok(false),
            Some(_) => Err(Error::ConflictingAnswer {
                question: fact.question,
            }),
            None => {
                self.facts.insert(fact.question, fact.answer);
                Ok(true)
            }
        }
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.get(&fact.question) == Some(&fact.answer)
    }

    pub fn contains_question(&self, q: QuestionId) -> bool {
        self.facts.contains_key(&q)
    }

    pub fn remove(&mut self, q: QuestionId) -> Option<Fact> {
        self.facts.shift_remove(&q).map(|a| Fact::new(q, a))
    }

    /// Removes the fact at `position` in insertion order.
    pub fn remove_at(&mut self, position: usize) -> Option<Fact> {
        self.facts
            .shift_remove_index(position)
            .map(|(q, a)| Fact::new(q, a))
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Fact) -> bool) {
        self.facts.retain(|&q, &mut a| keep(&Fact::new(q, a)));
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Fact> + '_ {
        self.facts.iter().map(|(&q, &a)| Fact::new(q, a))
    }

    pub fn questions(&self) -> impl Iterator<Item = QuestionId> + '_ {
        self.facts.keys().copied()
    }

    /// The first `position`-th fact in insertion order.
    pub fn get_index(&self, position: usize) -> Option<Fact> {
        self.facts
            .get_index(position)
            .map(|(&q, &a)| Fact::new(q, a))
    }
}

impl FactMemory for FactSet {
    fn holds(&self, fact: &Fact) -> bool {
        self.contains(fact)
    }
}

impl FromIterator<Fact> for FactSet {
    /// Later conflicting answers are ignored.
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Self {
        let mut set = FactSet::new();
        for fact in iter {
            set.facts.entry(fact.question).or_insert(fact.answer);
        }
        set
    }
}

/// Cost charged on an evaluation of `question`: 1 unless `memory` holds the
/// ground-truth fact. A question with no known answer always costs 1.
pub fn step_cost(memory: &impl FactMemory, question: QuestionId, truth: &GroundTruth) -> u8 {
    match truth.fact(question) {
        Some(fact) if memory.holds(&fact) => 0,
        _ => 1,
    }
}

/// Result of scanning a stream for evaluations of untaught questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequentialCheck {
    pub sequential: bool,
    pub first_violation: Option<usize>,
}

/// Single pass: every Evaluate must name a question taught at an earlier
/// index.
pub fn validate_sequential(stream: &Stream) -> SequentialCheck {
    let mut taught = std::collections::HashSet::new();
    for (i, event) in stream.events.iter().enumerate() {
        match *event {
            Event::Teach(fact) => {
                taught.insert(fact.question);
            }
            Event::Evaluate(q) if !taught.contains(&q) => {
                return SequentialCheck {
                    sequential: false,
                    first_violation: Some(i),
                };
            }
            Event::Evaluate(_) => {}
        }
    }
    SequentialCheck {
        sequential: true,
        first_violation: None,
    }
}
