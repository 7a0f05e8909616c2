//! Fixtures shared by the benchmarks.

use recollect_core::harness::{run_scenario, GameOutcome, RunConfig, Scenario};
use recollect_core::{LearnerKind, OracleBacking, Result, SuiteKind};

/// A game shape: suite, experts, memory, universe and stream length.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub suite: SuiteKind,
    pub n: usize,
    pub m: usize,
    pub universe: usize,
    pub steps: usize,
}

impl Shape {
    pub const fn values(n: usize, m: usize, steps: usize) -> Self {
        Shape {
            suite: SuiteKind::Values,
            n,
            m,
            universe: 8 * m,
            steps,
        }
    }

    pub fn scenario(&self, seed: u64) -> Result<Scenario> {
        Scenario::random(self.suite, self.n, self.m, self.universe, self.steps, 0.5, seed)
    }
}

pub fn play(learner: LearnerKind, oracle: OracleBacking, scenario: &Scenario) -> Result<GameOutcome> {
    let mut scenario = scenario.clone();
    let config = RunConfig {
        oracle,
        // measure the algorithms, not the checks
        monitor: false,
        ..RunConfig::new(learner)
    };
    run_scenario(&config, &mut scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_play() {
        let s = Shape::values(4, 2, 200).scenario(1).unwrap();
        for learner in LearnerKind::ALL {
            let out = play(learner, OracleBacking::Threshold, &s).unwrap();
            assert_eq!(out.ledger.len(), 200);
        }
    }
}
