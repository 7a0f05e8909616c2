//! Event sources: fixed streams, seeded random streams, and the adaptive
//! construction that forces mistakes on any learner with bounded memory.

mod lower_bound;
mod random;

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Event, FactSet, Stream};

pub use lower_bound::{LowerBoundAdversary, LowerBoundInstance, Phase};
pub use random::random_stream;

/// What an adversary may look at before choosing the next event.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryView<'a> {
    pub history: &'a [Event],
    pub learner_memory: &'a FactSet,
}

pub trait Adversary {
    /// The next event, or `None` once the stream is over.
    fn next_event(&mut self, view: &AdversaryView<'_>) -> Result<Option<Event>>;

    /// Whether the adversary promises to evaluate only taught questions.
    fn declares_sequential(&self) -> bool;
}

/// A precomputed stream; ignores the learner.
#[derive(Debug, Clone)]
pub struct FixedStream {
    stream: Stream,
    cursor: usize,
}

impl FixedStream {
    pub fn new(stream: Stream) -> Self {
        FixedStream { stream, cursor: 0 }
    }

    pub fn stream(&self) -> &Stream {
        &self.stream
    }
}

impl Adversary for FixedStream {
    fn next_event(&mut self, _view: &AdversaryView<'_>) -> Result<Option<Event>> {
        let event = self.stream.events.get(self.cursor).copied();
        self.cursor += usize::from(event.is_some());
        Ok(event)
    }

    fn declares_sequential(&self) -> bool {
        self.stream.sequential
    }
}

/// Parsed `--adversary` argument.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversarySpec {
    Random {
        universe: usize,
        steps: usize,
        teach_fraction: f64,
        seed: u64,
    },
    LowerBound {
        c: usize,
        n: usize,
        m: usize,
        opt: usize,
    },
    File(PathBuf),
}

/// Splits `k1=v1,k2=v2` into pairs, rejecting unknown or repeated keys and
/// reporting missing ones.
fn key_values<'a>(body: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut found: Vec<Option<&str>> = vec![None; keys.len()];
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected key=value, got `{part}`")))?;
        let slot = keys
            .iter()
            .position(|&key| key == k.trim())
            .ok_or_else(|| Error::config(format!("unknown key `{k}` (expected {})", keys.join(", "))))?;
        if found[slot].replace(v.trim()).is_some() {
            return Err(Error::config(format!("key `{k}` given twice")));
        }
    }
    found
        .into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| Error::config(format!("missing key `{k}`"))))
        .collect()
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("`{key}` must be a number, got `{value}`")))
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "random" => {
                let v = key_values(body, &["universe", "T", "teach", "seed"])?;
                let teach_fraction: f64 = number("teach", v[2])?;
                if !(0.0..=1.0).contains(&teach_fraction) {
                    return Err(Error::config(format!("teach fraction must lie in [0, 1], got {teach_fraction}")));
                }
                Ok(AdversarySpec::Random {
                    universe: number("universe", v[0])?,
                    steps: number("T", v[1])?,
                    teach_fraction,
                    seed: number("seed", v[3])?,
                })
            }
            "lowerbound" => {
                let v = key_values(body, &["c", "N", "M", "opt"])?;
                Ok(AdversarySpec::LowerBound {
                    c: number("c", v[0])?,
                    n: number("N", v[1])?,
                    m: number("M", v[2])?,
                    opt: number("opt", v[3])?,
                })
            }
            "file" if !body.is_empty() => Ok(AdversarySpec::File(PathBuf::from(body))),
            _ => Err(Error::config(format!(
                "unknown adversary `{s}` (expected random:..., lowerbound:... or file:PATH)"
            ))),
        }
    }
}
