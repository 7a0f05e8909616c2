//! The game loop: wires an adversary, an expert suite and a learner, charges
//! costs, enforces memory budgets, and checks the bounds afterwards.
//!
//! Each step runs in this order:
//! 1. the adversary emits an event, seeing the learner's stored facts;
//! 2. an evaluation is charged against the memories as they were before the
//!    step;
//! 3. the learner updates its weights, querying experts' pre-step memories;
//! 4. every expert is offered the step's fact;
//! 5. the learner updates its own memory, querying the updated experts;
//! 6. the step is recorded and the runtime monitors run.

mod bounds;
mod output;
mod scenario;
mod sweep;

use crate::adversaries::{Adversary, AdversaryView};
use crate::error::{Error, Result};
use crate::experts::{ExpertId, ExpertSuite, OracleBacking, OracleHandle, ThresholdOracle};
use crate::learners::{FullSim, Lazy, Learner, LearnerKind, Mwu, RandomEvict, ThresholdRefresh, ValueLazy, DEFAULT_GAMMA};
use crate::model::{step_cost, Event, GameLedger, GroundTruth, MemoryCounts};

pub use bounds::{
    ceil_log2, ceil_log_three_halves, check_bounds, derived_mistake_bound, literal_mistake_bound, BoundCheck,
    BoundParams, BoundReport, AUX_PER_EXPERT,
};
pub use output::{emit_outputs, ledger_csv, summary_json, OutputPaths, Summary};
pub use scenario::{ExpertSpec, Scenario, ScenarioAdversary};
pub use sweep::{run_case, run_sweep, SweepCase, SweepGrid, SweepResult};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub learner: LearnerKind,
    pub oracle: OracleBacking,
    pub gamma: f64,
    pub refresh: ThresholdRefresh,
    /// Seed of the random-eviction learner.
    pub seed: u64,
    /// Overrides the learner's own fact cap as the enforced budget.
    pub fact_budget: Option<usize>,
    /// Check threshold estimates and error counters against the true
    /// expert states after every step.
    pub monitor: bool,
}

impl RunConfig {
    pub fn new(learner: LearnerKind) -> Self {
        RunConfig {
            learner,
            oracle: OracleBacking::Simulation,
            gamma: DEFAULT_GAMMA,
            refresh: ThresholdRefresh::default(),
            seed: 0,
            fact_budget: None,
            monitor: true,
        }
    }

    /// Enforced fact budget for a suite of `n` experts with memory `m`.
    pub fn budget(&self, n: usize, m: usize) -> usize {
        self.fact_budget.unwrap_or_else(|| self.learner.fact_cap(n, m))
    }

    pub fn bound_params(&self, n: usize, m: usize) -> BoundParams {
        BoundParams {
            fact_cap: self.budget(n, m),
            ..BoundParams::for_learner(self.learner, n, m)
        }
    }
}

pub fn build_learner(config: &RunConfig, suite: &ExpertSuite) -> Result<Box<dyn Learner>> {
    let n = suite.len();
    let m = suite.capacity();
    Ok(match config.learner {
        LearnerKind::Mwu => Box::new(Mwu::new(n, config.gamma)?),
        LearnerKind::Lazy => Box::new(Lazy::new(n, m)),
        LearnerKind::ValueLazy => {
            let table = suite
                .value_table()
                .ok_or_else(|| Error::config("value-lazy needs an all value-based expert suite"))?;
            Box::new(ValueLazy::with_refresh(table, m, config.refresh))
        }
        LearnerKind::FullSim => Box::new(FullSim::new(n)),
        LearnerKind::RandomEvict => Box::new(RandomEvict::new(config.budget(n, m), config.seed)),
    })
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    pub ledger: GameLedger,
    pub report: BoundReport,
    /// First step (1-based) evaluating a question never taught before it.
    pub first_unsequential: Option<usize>,
    pub warnings: Vec<String>,
    pub active_updates: u64,
    pub hard_resets: u64,
    pub monitor: MonitorStats,
}

/// How much work the runtime monitors did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MonitorStats {
    /// Threshold and pre-threshold comparisons made.
    pub threshold_checks: u64,
    /// Pre-threshold comparisons where the estimate had left the sentinel.
    pub live_pre_checks: u64,
    /// Error-counter comparisons made.
    pub counter_checks: u64,
}

/// Plays `adversary` against a fresh learner until the stream ends.
///
/// Fails on a budget violation, a monitor violation, or any error raised
/// by the experts, the oracle or the adversary.
pub fn run_game(config: &RunConfig, suite: &mut ExpertSuite, adversary: &mut dyn Adversary) -> Result<GameOutcome> {
    let n = suite.len();
    let m = suite.capacity();
    let budget = config.budget(n, m);
    let question_cap = (config.learner == LearnerKind::ValueLazy).then_some(2 * m);
    let mut learner = build_learner(config, suite)?;
    let mut threshold_oracle = match config.oracle {
        OracleBacking::Simulation => None,
        OracleBacking::Threshold => Some(ThresholdOracle::new(
            suite
                .value_table()
                .ok_or_else(|| Error::config("the threshold oracle needs an all value-based expert suite"))?,
            m,
        )),
    };
    let mut warnings = Vec::new();
    if config.learner == LearnerKind::ValueLazy && !adversary.declares_sequential() {
        warnings.push("adversary does not declare sequential streams; value-lazy guarantees may not hold".into());
    }

    let mut truth = GroundTruth::new(suite.universe());
    let mut ledger = GameLedger::new(n);
    let mut history: Vec<Event> = Vec::new();
    let mut costs = vec![0u8; n];
    let mut first_unsequential = None;
    let mut monitor = config.monitor.then(|| Monitor::new(n));

    loop {
        let view = AdversaryView {
            history: &history,
            learner_memory: learner.memory(),
        };
        let Some(event) = adversary.next_event(&view)? else {
            break;
        };
        let step = history.len() + 1;
        let q = event.question();
        if q.index() >= suite.universe() {
            return Err(Error::OutsideUniverse {
                question: q,
                universe: suite.universe(),
            });
        }

        let cost = match event {
            Event::Teach(fact) => {
                truth.learn(fact)?;
                costs.fill(0);
                0
            }
            Event::Evaluate(q) => {
                if truth.answer(q).is_none() && first_unsequential.is_none() {
                    first_unsequential = Some(step);
                    warnings.push(format!("step {step}: evaluation of a question never taught"));
                }
                suite.fill_costs(q, &truth, &mut costs);
                step_cost(learner.memory(), q, &truth)
            }
        };

        learner.observe(&event, &oracle(suite, threshold_oracle.as_ref()))?;
        if let Some(mon) = monitor.as_mut() {
            mon.after_observe(step, learner.as_ref(), suite)?;
        }

        let fact = truth.fact(q);
        if let Some(fact) = fact {
            suite.offer_all(fact, event.kind())?;
            if let Some(t) = threshold_oracle.as_mut() {
                t.observe(q)?;
            }
        }
        learner.absorb(fact, &oracle(suite, threshold_oracle.as_ref()))?;

        let counts = MemoryCounts {
            fact_mem: learner.memory().len(),
            question_mem: learner.question_memory(),
            aux_state: learner.aux_state(),
            active_experts: learner.active_count(),
        };
        let over = |what, held, budget| Error::BudgetViolation {
            step,
            learner: config.learner.name().into(),
            what,
            held,
            budget,
        };
        if counts.fact_mem > budget {
            return Err(over("facts", counts.fact_mem, budget));
        }
        if let Some(cap) = question_cap.filter(|&cap| counts.question_mem > cap) {
            return Err(over("questions", counts.question_mem, cap));
        }
        ledger.record_step(&event, cost, &costs, counts)?;
        if let Some(mon) = monitor.as_mut() {
            mon.after_absorb(step, learner.as_ref(), suite, &ledger)?;
        }
        history.push(event);
    }

    let report = check_bounds(&ledger, &config.bound_params(n, m));
    Ok(GameOutcome {
        ledger,
        report,
        first_unsequential,
        warnings,
        active_updates: learner.active_updates(),
        hard_resets: learner.hard_resets(),
        monitor: monitor.map(|m| m.stats).unwrap_or_default(),
    })
}

/// Runs `scenario` and, for the lower-bound construction, adds the
/// guaranteed-mistake and surviving-expert checks to the report.
pub fn run_scenario(config: &RunConfig, scenario: &mut Scenario) -> Result<GameOutcome> {
    let mut config = config.clone();
    if config.fact_budget.is_none() {
        config.fact_budget = scenario.fact_budget;
    }
    let mut outcome = run_game(&config, &mut scenario.suite, &mut scenario.adversary)?;
    if let Some(adv) = scenario.lower_bound_adversary() {
        let inst = adv.instance();
        let steps = outcome.ledger.steps();
        let phase_one = steps
            .get(inst.phase_one_len().min(steps.len()).wrapping_sub(1))
            .map_or(0, |s| s.learner_mistakes);
        let survivor_worst = adv
            .survivors()
            .iter()
            .map(|e| outcome.ledger.expert_mistakes()[e.0])
            .max();
        let checks = &mut outcome.report.checks;
        checks.push(BoundCheck::at_least(
            "lower_bound_phase_one",
            phase_one,
            (inst.depth() * (inst.capacity() / 2)) as u64,
        ));
        checks.push(BoundCheck::at_least(
            "lower_bound_total",
            outcome.ledger.learner_mistakes(),
            inst.guaranteed_mistakes() as u64,
        ));
        checks.push(match survivor_worst {
            Some(worst) => BoundCheck::at_least("lower_bound_survivor", inst.opt() as u64, worst),
            None => BoundCheck::at_least("lower_bound_survivor", 0, 1),
        });
    }
    Ok(outcome)
}

fn oracle<'a>(suite: &'a ExpertSuite, threshold: Option<&'a ThresholdOracle>) -> OracleHandle<'a> {
    match threshold {
        Some(t) => OracleHandle::Threshold(t),
        None => OracleHandle::Simulation(suite),
    }
}

/// Compares learner estimates with the true expert states.
///
/// Threshold estimates must stay below the true thresholds; pre-threshold
/// estimates below the true thresholds as of the last change to the active
/// set; and every error counter below the expert's true mistake count.
#[derive(Debug)]
struct Monitor {
    // true thresholds at the last active-set change
    snapshot: Vec<u64>,
    seen_updates: u64,
    stats: MonitorStats,
}

impl Monitor {
    fn new(n: usize) -> Self {
        Monitor {
            snapshot: vec![0; n],
            seen_updates: 0,
            stats: MonitorStats::default(),
        }
    }

    fn true_threshold(suite: &ExpertSuite, e: usize) -> u64 {
        suite.true_threshold(ExpertId(e)).unwrap_or(0)
    }

    fn after_observe(&mut self, step: usize, learner: &dyn Learner, suite: &ExpertSuite) -> Result<()> {
        let Some(vl) = learner.as_value_lazy() else {
            return Ok(());
        };
        for (e, &limit) in self.snapshot.iter().enumerate() {
            let pre = vl.pre_threshold(e);
            self.stats.threshold_checks += 1;
            self.stats.live_pre_checks += u64::from(pre > 0);
            if pre > limit {
                return Err(Error::Invariant {
                    step,
                    message: format!(
                        "pre-threshold estimate {pre} of {} exceeds its true threshold {limit} at the last active-set change",
                        ExpertId(e)
                    ),
                });
            }
        }
        if learner.active_updates() != self.seen_updates {
            self.seen_updates = learner.active_updates();
            for (e, slot) in self.snapshot.iter_mut().enumerate() {
                *slot = Self::true_threshold(suite, e);
            }
        }
        Ok(())
    }

    fn after_absorb(&mut self, step: usize, learner: &dyn Learner, suite: &ExpertSuite, ledger: &GameLedger) -> Result<()> {
        if let Some(vl) = learner.as_value_lazy() {
            for e in 0..suite.len() {
                let (estimate, truth) = (vl.threshold(e), Self::true_threshold(suite, e));
                self.stats.threshold_checks += 1;
                if estimate > truth {
                    return Err(Error::Invariant {
                        step,
                        message: format!(
                            "threshold estimate {estimate} of {} exceeds its true threshold {truth}",
                            ExpertId(e)
                        ),
                    });
                }
            }
        }
        if let Some(errors) = learner.error_counts() {
            self.stats.counter_checks += errors.len() as u64;
            for (e, (&perceived, &truth)) in errors.iter().zip(ledger.expert_mistakes()).enumerate() {
                if perceived > truth {
                    return Err(Error::Invariant {
                        step,
                        message: format!(
                            "error counter {perceived} of {} exceeds its {truth} true mistakes",
                            ExpertId(e)
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::FixedStream;
    use crate::experts::SuiteKind;
    use crate::model::{AnswerId, Fact, QuestionId, Stream};

    fn fact(q: u32) -> Fact {
        Fact::new(QuestionId(q), AnswerId(q))
    }

    fn play(kind: LearnerKind, suite_kind: SuiteKind, events: Vec<Event>) -> Result<GameOutcome> {
        let mut suite = suite_kind.build(3, 2, 8, 1)?;
        let mut adv = FixedStream::new(Stream::new(events, true));
        run_game(&RunConfig::new(kind), &mut suite, &mut adv)
    }

    #[test]
    fn empty_stream_passes() {
        for kind in LearnerKind::ALL {
            let out = play(kind, SuiteKind::Values, vec![]).unwrap();
            assert_eq!(out.ledger.learner_mistakes(), 0);
            assert!(out.report.passed());
        }
    }

    #[test]
    fn costs_use_pre_step_memory() {
        // evaluated at the teach step's successor: stored, cost 0; a
        // question evaluated before it was ever taught costs 1 even though
        // the step reveals it
        let events = vec![Event::Teach(fact(1)), Event::Evaluate(QuestionId(1))];
        for kind in LearnerKind::ALL {
            let out = play(kind, SuiteKind::Values, events.clone()).unwrap();
            assert_eq!(out.ledger.steps()[1].cost, 0, "{kind}");
        }
        let out = play(LearnerKind::FullSim, SuiteKind::Recent, vec![Event::Evaluate(QuestionId(2))]).unwrap();
        assert_eq!(out.ledger.steps()[0].cost, 1);
        assert_eq!(out.first_unsequential, Some(1));
        assert_eq!(out.ledger.opt(), 1);
    }

    #[test]
    fn value_lazy_needs_values() {
        let err = play(LearnerKind::ValueLazy, SuiteKind::Recent, vec![]).unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn budget_violation_is_loud() {
        let mut suite = SuiteKind::Values.build(4, 2, 8, 0).unwrap();
        let events: Vec<Event> = (0..8).map(|q| Event::Teach(fact(q))).collect();
        let mut adv = FixedStream::new(Stream::new(events, true));
        let config = RunConfig {
            fact_budget: Some(1),
            ..RunConfig::new(LearnerKind::FullSim)
        };
        match run_game(&config, &mut suite, &mut adv) {
            Err(Error::BudgetViolation { step, held, budget, .. }) => {
                assert_eq!((step, held, budget), (2, 2, 1));
            }
            other => panic!("expected a budget violation, got {other:?}"),
        }
    }

    #[test]
    fn outside_universe_is_an_error() {
        let err = play(LearnerKind::Lazy, SuiteKind::Recent, vec![Event::Teach(fact(99))]).unwrap_err();
        assert!(matches!(err, Error::OutsideUniverse { .. }));
    }

    #[test]
    fn lazy_on_small_lower_bound_hits_budget() {
        // a 2M learner against a construction that assumes M facts
        let mut scenario = Scenario::lower_bound(1, 4, 2, 1).unwrap();
        let err = run_scenario(&RunConfig::new(LearnerKind::Lazy), &mut scenario).unwrap_err();
        assert!(matches!(err, Error::BudgetViolation { budget: 2, .. }), "{err}");
    }

    #[test]
    fn lower_bound_checks_are_reported() {
        let mut scenario = Scenario::lower_bound(2, 16, 2, 1).unwrap();
        let out = run_scenario(&RunConfig::new(LearnerKind::Lazy), &mut scenario).unwrap();
        for name in ["lower_bound_phase_one", "lower_bound_total", "lower_bound_survivor"] {
            assert!(out.report.check(name).unwrap().passed, "{name}");
        }
        assert!(out.ledger.learner_mistakes() >= 2);
    }
}
