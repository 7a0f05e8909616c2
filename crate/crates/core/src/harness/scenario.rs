use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::adversaries::{
    random_stream, Adversary, AdversarySpec, AdversaryView, FixedStream, LowerBoundAdversary, LowerBoundInstance,
};
use crate::error::{Error, Result};
use crate::experts::{read_suite, ExpertSuite, SuiteKind};
use crate::model::{read_stream, Event, Vocabulary};

/// Parsed `--experts` argument: `<suite>:N=<n>` for a built-in suite, or a
/// path (optionally prefixed with `file:`) to a value-based suite file.
#[derive(Debug, Clone, PartialEq)]
pub enum ExpertSpec {
    Builtin { kind: SuiteKind, n: usize },
    File(PathBuf),
}

impl FromStr for ExpertSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ExpertSpec::File(PathBuf::from(path)));
        }
        if let Some((kind, rest)) = s.split_once(':') {
            if let Ok(kind) = kind.parse::<SuiteKind>() {
                let n = rest
                    .strip_prefix("N=")
                    .and_then(|n| n.parse().ok())
                    .filter(|&n: &usize| n > 0)
                    .ok_or_else(|| Error::config(format!("expected `{kind}:N=<experts>`, got `{s}`")))?;
                return Ok(ExpertSpec::Builtin { kind, n });
            }
        }
        if s.is_empty() {
            return Err(Error::config("empty expert suite spec"));
        }
        Ok(ExpertSpec::File(PathBuf::from(s)))
    }
}

/// Event source of a [`Scenario`].
#[derive(Debug, Clone)]
pub enum ScenarioAdversary {
    Fixed(FixedStream),
    LowerBound(LowerBoundAdversary),
}

impl Adversary for ScenarioAdversary {
    fn next_event(&mut self, view: &AdversaryView<'_>) -> Result<Option<Event>> {
        match self {
            ScenarioAdversary::Fixed(a) => a.next_event(view),
            ScenarioAdversary::LowerBound(a) => a.next_event(view),
        }
    }

    fn declares_sequential(&self) -> bool {
        match self {
            ScenarioAdversary::Fixed(a) => a.declares_sequential(),
            ScenarioAdversary::LowerBound(a) => a.declares_sequential(),
        }
    }
}

/// Everything a game needs besides the learner.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub suite: ExpertSuite,
    pub adversary: ScenarioAdversary,
    pub vocab: Vocabulary,
    pub m: usize,
    /// Fact budget the adversary construction assumes of the learner.
    pub fact_budget: Option<usize>,
}

impl Scenario {
    /// Resolves CLI-style specs. `m` may be omitted when the adversary fixes
    /// it; `seed` drives built-in suites.
    pub fn build(adversary: &AdversarySpec, experts: Option<&ExpertSpec>, m: Option<usize>, seed: u64) -> Result<Self> {
        if let AdversarySpec::LowerBound { c, n, m: lb_m, opt } = *adversary {
            if experts.is_some() {
                return Err(Error::config("the lowerbound adversary builds its own experts; drop --experts"));
            }
            if m.is_some_and(|m| m != lb_m) {
                return Err(Error::config(format!("--M {} disagrees with the adversary's M = {lb_m}", m.unwrap_or(0))));
            }
            return Scenario::lower_bound(c, n, lb_m, opt);
        }
        let m = m.ok_or_else(|| Error::config("--M is required"))?;
        if m == 0 {
            return Err(Error::config("M must be at least 1"));
        }
        let experts = experts.ok_or_else(|| Error::config("--experts is required for this adversary"))?;
        let (stream, mut vocab, universe_hint) = match adversary {
            AdversarySpec::Random {
                universe,
                steps,
                teach_fraction,
                seed,
            } => (
                random_stream(*universe, *steps, *teach_fraction, *seed)?,
                Vocabulary::numbered(*universe),
                *universe,
            ),
            AdversarySpec::File(path) => {
                let mut vocab = Vocabulary::new();
                let stream = read_stream(path, &mut vocab)?;
                (stream, vocab, 0)
            }
            AdversarySpec::LowerBound { .. } => unreachable!(),
        };
        let suite = match experts {
            ExpertSpec::Builtin { kind, n } => {
                let universe = universe_hint.max(vocab.num_questions());
                kind.build(*n, m, universe, seed)?
            }
            ExpertSpec::File(path) => load_suite_file(path, m, &mut vocab)?,
        };
        Ok(Scenario {
            suite,
            adversary: ScenarioAdversary::Fixed(FixedStream::new(stream)),
            vocab,
            m,
            fact_budget: None,
        })
    }

    pub fn lower_bound(c: usize, n: usize, m: usize, opt: usize) -> Result<Self> {
        let instance = LowerBoundInstance::build(c, n, m, opt)?;
        Ok(Scenario {
            suite: instance.suite()?,
            vocab: instance.vocabulary(),
            m,
            fact_budget: Some(instance.learner_budget()),
            adversary: ScenarioAdversary::LowerBound(LowerBoundAdversary::new(instance)),
        })
    }

    /// A built-in suite against a seeded random stream; the suite and the
    /// stream share `seed`.
    pub fn random(kind: SuiteKind, n: usize, m: usize, universe: usize, steps: usize, teach: f64, seed: u64) -> Result<Self> {
        Ok(Scenario {
            suite: kind.build(n, m, universe, seed)?,
            adversary: ScenarioAdversary::Fixed(FixedStream::new(random_stream(universe, steps, teach, seed)?)),
            vocab: Vocabulary::numbered(universe),
            m,
            fact_budget: None,
        })
    }

    pub fn lower_bound_adversary(&self) -> Option<&LowerBoundAdversary> {
        match &self.adversary {
            ScenarioAdversary::LowerBound(a) => Some(a),
            ScenarioAdversary::Fixed(_) => None,
        }
    }
}

/// Reads a value-based suite. The file's question names join `vocab`, so
/// the universe covers every question named by the stream or the suite.
fn load_suite_file(path: &Path, m: usize, vocab: &mut Vocabulary) -> Result<ExpertSuite> {
    let file = read_suite(path, vocab)?;
    ExpertSuite::value_based(file.functions, m, vocab.num_questions())
}
