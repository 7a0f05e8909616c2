//! Code-registered expert suites, addressable by name.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Expert, ExpertId, ExpertSuite, ScriptedExpert, ScriptedPolicy, ValueBasedExpert, ValueFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteKind {
    /// Value-based experts with independent random value permutations.
    Values,
    Recent,
    First,
    Random,
    Residue,
    Evaluated,
    /// Cycles through all of the above, expert by expert.
    Mixed,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 7] = [
        SuiteKind::Values,
        SuiteKind::Recent,
        SuiteKind::First,
        SuiteKind::Random,
        SuiteKind::Residue,
        SuiteKind::Evaluated,
        SuiteKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Values => "values",
            SuiteKind::Recent => "recent",
            SuiteKind::First => "first",
            SuiteKind::Random => "random",
            SuiteKind::Residue => "residue",
            SuiteKind::Evaluated => "evaluated",
            SuiteKind::Mixed => "mixed",
        }
    }

    pub fn is_value_based(self) -> bool {
        self == SuiteKind::Values
    }

    pub fn build(self, n: usize, m: usize, universe: usize, seed: u64) -> Result<ExpertSuite> {
        if n == 0 {
            return Err(Error::config("expert suite needs at least one expert"));
        }
        if self == SuiteKind::Values {
            return ExpertSuite::value_based(random_value_functions(n, universe, seed), m, universe);
        }
        scripted_suite(self, n, m, universe, seed)
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown expert suite `{s}`")))
    }
}

/// `n` value functions, each a uniformly random permutation of
/// `1..=universe` over questions `0..universe`.
pub fn random_value_functions(n: usize, universe: usize, seed: u64) -> Vec<ValueFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|e| {
            let mut values: Vec<u64> = (1..=universe as u64).collect();
            values.shuffle(&mut rng);
            ValueFunction::new(ExpertId(e), values).expect("a permutation is injective")
        })
        .collect()
}

fn scripted_policy(kind: SuiteKind, e: usize, seed: u64) -> ScriptedPolicy {
    match kind {
        SuiteKind::Recent => ScriptedPolicy::Recent,
        SuiteKind::First => ScriptedPolicy::First,
        SuiteKind::Random => ScriptedPolicy::RandomEvict {
            seed: seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(e as u64),
        },
        SuiteKind::Residue => {
            let modulus = 2 + (e % 3) as u32;
            ScriptedPolicy::Residue {
                modulus,
                residue: (e as u32 / 3) % modulus,
            }
        }
        SuiteKind::Evaluated => ScriptedPolicy::EvaluatedOnly,
        SuiteKind::Values | SuiteKind::Mixed => unreachable!("not a scripted policy"),
    }
}

/// Suite of scripted experts (or a [`SuiteKind::Mixed`] suite, whose
/// value-based members draw random permutations).
pub fn scripted_suite(kind: SuiteKind, n: usize, m: usize, universe: usize, seed: u64) -> Result<ExpertSuite> {
    if kind == SuiteKind::Values {
        return Err(Error::config("`values` is not a scripted suite"));
    }
    let values = random_value_functions(n, universe, seed);
    let experts = values
        .into_iter()
        .enumerate()
        .map(|(e, vf)| {
            let member = if kind == SuiteKind::Mixed {
                SuiteKind::ALL[e % (SuiteKind::ALL.len() - 1)]
            } else {
                kind
            };
            match member {
                SuiteKind::Values => Expert::ValueBased(ValueBasedExpert::new(ExpertId(e), m, vf)),
                other => Expert::Scripted(ScriptedExpert::new(ExpertId(e), m, scripted_policy(other, e, seed))),
            }
        })
        .collect();
    ExpertSuite::new(experts, m, universe)
}
