use std::collections::HashSet;

use super::{ExpertId, OfferOutcome};
use crate::error::{Error, Result};
use crate::model::{Fact, QuestionId};

/// Injective map from questions to positive naturals. Value 0 marks an
/// unlisted question and doubles as the under-full threshold sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueFunction {
    values: Vec<u64>,
}

impl ValueFunction {
    /// `values[q]` is the value of question `q`; zero entries are unlisted.
    pub fn new(expert: ExpertId, values: Vec<u64>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(values.len());
        for &v in values.iter().filter(|&&v| v != 0) {
            if !seen.insert(v) {
                return Err(Error::NonInjective { expert, value: v });
            }
        }
        Ok(ValueFunction { values })
    }

    /// Builds from explicit pairs. Listing a question twice or using value 0
    /// is an error.
    pub fn from_pairs(
        expert: ExpertId,
        pairs: impl IntoIterator<Item = (QuestionId, u64)>,
    ) -> Result<Self> {
        let mut values = Vec::new();
        for (q, v) in pairs {
            if v == 0 {
                return Err(Error::ZeroValue { expert });
            }
            if q.index() >= values.len() {
                values.resize(q.index() + 1, 0);
            }
            if values[q.index()] != 0 {
                return Err(Error::config(format!(
                    "expert {expert} lists question {q} twice"
                )));
            }
            values[q.index()] = v;
        }
        Self::new(expert, values)
    }

    pub fn value(&self, q: QuestionId) -> Option<u64> {
        match self.values.get(q.index()) {
            Some(&v) if v != 0 => Some(v),
            _ => None,
        }
    }

    /// Listed `(question, value)` pairs in question order.
    pub fn pairs(&self) -> impl Iterator<Item = (QuestionId, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(q, &v)| (QuestionId(q as u32), v))
    }
}

/// The `m`-th largest entry of `values`, or the sentinel 0 when there are
/// fewer than `m` entries. Reorders `values`.
pub fn max_m(values: &mut [u64], m: usize) -> u64 {
    if m == 0 || values.len() < m {
        return 0;
    }
    let idx = m - 1;
    *values.select_nth_unstable_by(idx, |a, b| b.cmp(a)).1
}

/// Values of every expert laid out question-major, so that scanning all
/// experts for one question touches contiguous memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    num_experts: usize,
    universe: usize,
    data: Vec<u64>,
}

impl ValueTable {
    pub fn from_functions(functions: &[ValueFunction], universe: usize) -> Self {
        let n = functions.len();
        let mut data = vec![0; universe * n];
        for (e, f) in functions.iter().enumerate() {
            for (q, v) in f.pairs() {
                if q.index() < universe {
                    data[q.index() * n + e] = v;
                }
            }
        }
        ValueTable {
            num_experts: n,
            universe,
            data,
        }
    }

    pub fn num_experts(&self) -> usize {
        self.num_experts
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn value(&self, expert: ExpertId, q: QuestionId) -> Result<u64> {
        if expert.0 >= self.num_experts {
            return Err(Error::UnknownExpert(expert));
        }
        match self.row(q).map(|row| row[expert.0]) {
            Some(v) if v != 0 => Ok(v),
            _ => Err(Error::ValueUndefined { expert, question: q }),
        }
    }

    /// All experts' values for `q`; 0 marks an unlisted pair.
    #[inline]
    pub fn row(&self, q: QuestionId) -> Option<&[u64]> {
        let start = q.index().checked_mul(self.num_experts)?;
        self.data.get(start..start + self.num_experts)
    }

    /// Like [`row`](Self::row) but rejects unlisted pairs.
    pub fn defined_row(&self, q: QuestionId) -> Result<&[u64]> {
        let row = self.row(q).ok_or(Error::OutsideUniverse {
            question: q,
            universe: self.universe,
        })?;
        if let Some(e) = row.iter().position(|&v| v == 0) {
            return Err(Error::ValueUndefined {
                expert: ExpertId(e),
                question: q,
            });
        }
        Ok(row)
    }
}

/// Expert that keeps the `capacity` facts of largest value among everything
/// it has been offered.
#[derive(Debug, Clone)]
pub struct ValueBasedExpert {
    id: ExpertId,
    capacity: usize,
    values: ValueFunction,
    // (value, fact), unordered; at most `capacity` entries
    stored: Vec<(u64, Fact)>,
    // smallest stored value once full, else 0
    floor: u64,
}

impl ValueBasedExpert {
    pub fn new(id: ExpertId, capacity: usize, values: ValueFunction) -> Self {
        ValueBasedExpert {
            id,
            capacity,
            values,
            stored: Vec::with_capacity(capacity),
            floor: 0,
        }
    }

    pub fn id(&self) -> ExpertId {
        self.id
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn values(&self) -> &ValueFunction {
        &self.values
    }

    fn min_slot(&self) -> Option<usize> {
        self.stored
            .iter()
            .enumerate()
            .min_by_key(|(_, (v, _))| *v)
            .map(|(i, _)| i)
    }

    pub fn offer(&mut self, fact: Fact) -> Result<OfferOutcome> {
        let v = self.values.value(fact.question).ok_or(Error::ValueUndefined {
            expert: self.id,
            question: fact.question,
        })?;
        if self.capacity == 0 {
            return Ok(OfferOutcome::default());
        }
        // values are injective, so anything below the minimum is not stored
        if v < self.floor {
            return Ok(OfferOutcome::default());
        }
        let full = self.stored.len() >= self.capacity;
        let min_slot = if full { self.min_slot() } else { None };
        if let Some((_, held)) = self.stored.iter().find(|(_, f)| f.question == fact.question) {
            if held.answer != fact.answer {
                return Err(Error::ConflictingAnswer {
                    question: fact.question,
                });
            }
            return Ok(OfferOutcome::default());
        }
        match min_slot {
            None => {
                self.stored.push((v, fact));
                if self.stored.len() == self.capacity {
                    self.floor = self.stored.iter().map(|(v, _)| *v).min().unwrap_or(0);
                }
                Ok(OfferOutcome {
                    stored: true,
                    evicted: None,
                })
            }
            Some(slot) => {
                let (_, evicted) = std::mem::replace(&mut self.stored[slot], (v, fact));
                self.floor = self.stored.iter().map(|(v, _)| *v).min().unwrap_or(0);
                Ok(OfferOutcome {
                    stored: true,
                    evicted: Some(evicted),
                })
            }
        }
    }

    /// The `capacity`-th largest value offered so far, or 0 while fewer than
    /// `capacity` distinct questions have been offered.
    pub fn true_threshold(&self) -> u64 {
        self.floor
    }

    pub fn holds_question(&self, q: QuestionId) -> bool {
        self.stored.iter().any(|(_, f)| f.question == q)
    }

    pub fn facts(&self) -> impl Iterator<Item = Fact> + '_ {
        self.stored.iter().map(|(_, f)| *f)
    }

    pub fn len(&self) -> usize {
        self.stored.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stored.is_empty()
    }
}
