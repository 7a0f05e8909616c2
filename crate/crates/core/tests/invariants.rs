//! Properties that hold for every learner and suite, checked against
//! independent replays of the stream.

use std::collections::HashSet;

use proptest::prelude::*;
use recollect_core::harness::{ledger_csv, run_scenario, RunConfig, Scenario, ScenarioAdversary};
use recollect_core::{Event, EventKind, ExpertId, LearnerKind, OracleBacking, QuestionId, Stream, SuiteKind};

fn stream_of(s: &Scenario) -> Stream {
    match &s.adversary {
        ScenarioAdversary::Fixed(f) => f.stream().clone(),
        ScenarioAdversary::LowerBound(_) => panic!("fixed stream expected"),
    }
}

/// Expert mistakes by brute force: each value-based expert keeps the top M
/// of the questions it has been offered, recomputed from scratch.
fn replay_value_mistakes(s: &Scenario) -> Vec<u64> {
    let functions = s.suite.value_functions().expect("value based");
    let m = s.m;
    let mut taught: HashSet<QuestionId> = HashSet::new();
    let mut offered: Vec<QuestionId> = Vec::new();
    let mut mistakes = vec![0u64; functions.len()];
    for event in &stream_of(s).events {
        let q = event.question();
        if event.kind() == EventKind::Evaluate {
            for (e, f) in functions.iter().enumerate() {
                let mut ranked: Vec<(u64, QuestionId)> = offered.iter().map(|&p| (f.value(p).unwrap(), p)).collect();
                ranked.sort_unstable_by(|a, b| b.cmp(a));
                let held = ranked.iter().take(m).any(|&(_, p)| p == q);
                if !(held && taught.contains(&q)) {
                    mistakes[e] += 1;
                }
            }
        }
        if let Event::Teach(_) = event {
            taught.insert(q);
        }
        if taught.contains(&q) && !offered.contains(&q) {
            offered.push(q);
        }
    }
    mistakes
}

fn learner() -> impl Strategy<Value = LearnerKind> {
    prop::sample::select(LearnerKind::ALL.to_vec())
}

fn suite() -> impl Strategy<Value = SuiteKind> {
    prop::sample::select(SuiteKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ledger_totals_are_consistent(
        learner in learner(), kind in suite(), n in 1usize..9, m in 1usize..5,
        universe in 2usize..30, steps in 0usize..300, teach in 0.1f64..0.9, seed in any::<u64>(),
    ) {
        prop_assume!(learner != LearnerKind::ValueLazy || kind.is_value_based());
        let mut s = Scenario::random(kind, n, m, universe, steps, teach, seed).unwrap();
        let out = run_scenario(&RunConfig { seed, ..RunConfig::new(learner) }, &mut s).unwrap();
        let ledger = &out.ledger;
        prop_assert_eq!(ledger.len(), steps);
        let mut total = 0u64;
        for step in ledger.steps() {
            if step.kind == EventKind::Teach {
                prop_assert_eq!(step.cost, 0);
            }
            total += u64::from(step.cost);
            prop_assert_eq!(step.learner_mistakes, total);
            prop_assert!(step.memory.fact_mem <= learner.fact_cap(n, m));
        }
        prop_assert_eq!(ledger.learner_mistakes(), total);
        prop_assert_eq!(ledger.opt(), ledger.expert_mistakes().iter().copied().min().unwrap());
        prop_assert!(out.report.passed(), "{:?}", out.report.failures().collect::<Vec<_>>());
        if learner == LearnerKind::FullSim {
            prop_assert!(ledger.learner_mistakes() <= ledger.opt());
        }
    }

    #[test]
    fn expert_mistakes_match_a_top_m_replay(
        n in 1usize..7, m in 1usize..5, universe in 2usize..25, steps in 0usize..200,
        teach in 0.1f64..0.9, seed in any::<u64>(),
    ) {
        let mut s = Scenario::random(SuiteKind::Values, n, m, universe, steps, teach, seed).unwrap();
        let expected = replay_value_mistakes(&s);
        let out = run_scenario(&RunConfig::new(LearnerKind::Lazy), &mut s).unwrap();
        prop_assert_eq!(out.ledger.expert_mistakes(), &expected[..]);
    }

    #[test]
    fn opt_does_not_depend_on_the_learner(
        kind in suite(), n in 1usize..7, m in 1usize..4, universe in 2usize..20,
        steps in 1usize..200, seed in any::<u64>(),
    ) {
        let mut opts = Vec::new();
        for learner in LearnerKind::ALL {
            if learner == LearnerKind::ValueLazy && !kind.is_value_based() {
                continue;
            }
            let mut s = Scenario::random(kind, n, m, universe, steps, 0.5, seed).unwrap();
            let out = run_scenario(&RunConfig::new(learner), &mut s).unwrap();
            opts.push(out.ledger.expert_mistakes().to_vec());
        }
        prop_assert!(opts.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn threshold_backing_shadows_simulation(
        learner in prop::sample::select(vec![LearnerKind::Mwu, LearnerKind::Lazy, LearnerKind::FullSim]),
        n in 1usize..9, m in 1usize..5, universe in 2usize..30, steps in 0usize..300, seed in any::<u64>(),
    ) {
        let run = |oracle| {
            let mut s = Scenario::random(SuiteKind::Values, n, m, universe, steps, 0.5, seed).unwrap();
            let out = run_scenario(&RunConfig { oracle, ..RunConfig::new(learner) }, &mut s).unwrap();
            ledger_csv(&out.ledger, &s.vocab).unwrap()
        };
        prop_assert_eq!(run(OracleBacking::Simulation), run(OracleBacking::Threshold));
    }

    #[test]
    fn experts_stay_within_capacity(
        kind in suite(), n in 1usize..7, m in 1usize..5, universe in 2usize..30,
        steps in 0usize..300, seed in any::<u64>(),
    ) {
        let s = Scenario::random(kind, n, m, universe, steps, 0.5, seed).unwrap();
        let mut suite = s.suite.clone();
        let mut truth = recollect_core::GroundTruth::new(universe);
        let mut thresholds = vec![0u64; n];
        for event in &stream_of(&s).events {
            if let Event::Teach(f) = event {
                truth.learn(*f).unwrap();
            }
            if let Some(f) = truth.fact(event.question()) {
                suite.offer_all(f, event.kind()).unwrap();
            }
            for (e, floor) in thresholds.iter_mut().enumerate() {
                let expert = suite.expert(ExpertId(e)).unwrap();
                prop_assert!(expert.memory_len() <= m);
                for f in expert.facts() {
                    prop_assert_eq!(truth.answer(f.question), Some(f.answer));
                }
                if let Some(t) = suite.true_threshold(ExpertId(e)) {
                    prop_assert!(t >= *floor);
                    *floor = t;
                }
            }
        }
    }
}

#[test]
fn lower_bound_games_are_reproducible() {
    let play = || {
        let mut s = Scenario::lower_bound(2, 16, 4, 1).unwrap();
        let out = run_scenario(&RunConfig::new(LearnerKind::ValueLazy), &mut s).unwrap();
        ledger_csv(&out.ledger, &s.vocab).unwrap()
    };
    assert_eq!(play(), play());
}
