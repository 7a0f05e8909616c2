use serde::Serialize;

use crate::learners::LearnerKind;
use crate::model::GameLedger;

/// Auxiliary entries allowed per expert.
pub const AUX_PER_EXPERT: usize = 4;

/// Smallest `k` with `base_num^k >= n * base_den^k`, i.e. the ceiling of
/// `log_{num/den} n`; 0 for `n <= 1`.
pub fn ceil_log_ratio(n: usize, num: u32, den: u32) -> u32 {
    assert!(num > den && den > 0);
    let n = n as u128;
    let (mut lhs, mut rhs, mut k) = (1u128, n, 0u32);
    while lhs < rhs {
        lhs *= u128::from(num);
        rhs *= u128::from(den);
        k += 1;
    }
    k
}

pub fn ceil_log2(n: usize) -> u32 {
    ceil_log_ratio(n, 2, 1)
}

/// `ceil(log_{3/2} n)`: how many times a third of the active experts can
/// be dropped before at most one remains.
pub fn ceil_log_three_halves(n: usize) -> u32 {
    ceil_log_ratio(n, 3, 2)
}

/// `6 (opt + M) (ceil(log_{3/2} N) + 1)`.
pub fn derived_mistake_bound(opt: u64, m: usize, n: usize) -> u64 {
    6 * (opt + m as u64) * (u64::from(ceil_log_three_halves(n)) + 1)
}

/// `6 opt ceil(log2 N) + 6 M ceil(log2 N)`.
pub fn literal_mistake_bound(opt: u64, m: usize, n: usize) -> u64 {
    let lg = u64::from(ceil_log2(n));
    6 * opt * lg + 6 * m as u64 * lg
}

/// Caps a learner is checked against.
#[derive(Debug, Clone, Serialize)]
pub struct BoundParams {
    pub learner: LearnerKind,
    pub n: usize,
    pub m: usize,
    pub fact_cap: usize,
    pub question_cap: Option<usize>,
    pub aux_cap: usize,
}

impl BoundParams {
    pub fn for_learner(learner: LearnerKind, n: usize, m: usize) -> Self {
        BoundParams {
            learner,
            n,
            m,
            fact_cap: learner.fact_cap(n, m),
            question_cap: (learner == LearnerKind::ValueLazy).then_some(2 * m),
            aux_cap: AUX_PER_EXPERT * n,
        }
    }
}

/// One inequality checked at every prefix of a game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    /// Whether failing this check fails the run.
    pub required: bool,
    pub passed: bool,
    /// First step (1-based) where the inequality broke.
    pub first_violation: Option<usize>,
    /// Smallest `limit - observed` over all prefixes; negative on failure.
    pub worst_slack: i64,
}

impl BoundCheck {
    /// Checks `observed(t) <= limit(t)` over `(observed, limit)` pairs
    /// indexed from step 1.
    pub fn over_prefixes(name: &'static str, required: bool, pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut first_violation = None;
        let mut worst_slack = i64::MAX;
        for (i, (observed, limit)) in pairs.into_iter().enumerate() {
            let slack = limit as i64 - observed as i64;
            worst_slack = worst_slack.min(slack);
            if slack < 0 && first_violation.is_none() {
                first_violation = Some(i + 1);
            }
        }
        BoundCheck {
            name,
            required,
            passed: first_violation.is_none(),
            first_violation,
            worst_slack: if worst_slack == i64::MAX { 0 } else { worst_slack },
        }
    }

    /// A single end-of-game comparison `observed >= floor`.
    pub fn at_least(name: &'static str, observed: u64, floor: u64) -> Self {
        let slack = observed as i64 - floor as i64;
        BoundCheck {
            name,
            required: true,
            passed: slack >= 0,
            first_violation: None,
            worst_slack: slack,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub params: BoundParams,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    /// True when every required check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.required)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.required && !c.passed)
    }
}

/// Evaluates every cap that applies to `params.learner` at every prefix of
/// `ledger`.
pub fn check_bounds(ledger: &GameLedger, params: &BoundParams) -> BoundReport {
    let steps = ledger.steps();
    let mut checks = vec![BoundCheck::over_prefixes(
        "fact_memory",
        true,
        steps.iter().map(|s| (s.memory.fact_mem as u64, params.fact_cap as u64)),
    )];
    if let Some(cap) = params.question_cap {
        checks.push(BoundCheck::over_prefixes(
            "question_memory",
            true,
            steps.iter().map(|s| (s.memory.question_mem as u64, cap as u64)),
        ));
    }
    checks.push(BoundCheck::over_prefixes(
        "aux_state",
        true,
        steps.iter().map(|s| (s.memory.aux_state as u64, params.aux_cap as u64)),
    ));
    let bounded = params.learner.has_mistake_bound();
    checks.push(BoundCheck::over_prefixes(
        "mistakes_derived",
        bounded,
        steps
            .iter()
            .map(|s| (s.learner_mistakes, derived_mistake_bound(s.opt, params.m, params.n))),
    ));
    checks.push(BoundCheck::over_prefixes(
        "mistakes_literal",
        false,
        steps
            .iter()
            .map(|s| (s.learner_mistakes, literal_mistake_bound(s.opt, params.m, params.n))),
    ));
    if params.learner == LearnerKind::FullSim {
        checks.push(BoundCheck::over_prefixes(
            "full_sim_within_opt",
            true,
            steps.iter().map(|s| (s.learner_mistakes, s.opt)),
        ));
    }
    BoundReport {
        params: params.clone(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Event, MemoryCounts, QuestionId};

    #[test]
    fn logs_match_float_reference() {
        for n in 1..5000usize {
            let lg2 = (n as f64).log2().ceil() as u32;
            assert_eq!(ceil_log2(n), lg2, "n = {n}");
            // exact powers of 3/2 are never integers past 1, so the float
            // ceiling is safe away from rounding noise
            let lg = (n as f64).ln() / 1.5f64.ln();
            if (lg - lg.round()).abs() > 1e-9 {
                assert_eq!(ceil_log_three_halves(n), lg.ceil() as u32, "n = {n}");
            }
        }
        assert_eq!(ceil_log_three_halves(1), 0);
        assert_eq!(ceil_log_three_halves(2), 2);
        assert_eq!(ceil_log_three_halves(64), 11);
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(derived_mistake_bound(0, 1, 2), 18);
        assert_eq!(derived_mistake_bound(3, 4, 8), 6 * 7 * 7);
        assert_eq!(literal_mistake_bound(2, 3, 8), 6 * 2 * 3 + 6 * 3 * 3);
    }

    fn ledger_with_fact_mem(mem: &[usize]) -> GameLedger {
        let mut ledger = GameLedger::new(1);
        for &m in mem {
            let counts = MemoryCounts {
                fact_mem: m,
                ..MemoryCounts::default()
            };
            ledger.record_step(&Event::Evaluate(QuestionId(0)), 0, &[0], counts).unwrap();
        }
        ledger
    }

    #[test]
    fn injected_violation_reports_first_step() {
        let m = 2;
        let mem = [1, 2, 2, 4, 4, 4, 2 * m + 1, 0, 2 * m + 1];
        let report = check_bounds(&ledger_with_fact_mem(&mem), &BoundParams::for_learner(LearnerKind::Lazy, 1, m));
        let fact = report.check("fact_memory").unwrap();
        assert!(!fact.passed);
        assert_eq!(fact.first_violation, Some(7));
        assert_eq!(fact.worst_slack, -1);
        assert!(!report.passed());
    }

    #[test]
    fn empty_ledger_passes_vacuously() {
        for kind in LearnerKind::ALL {
            let report = check_bounds(&GameLedger::new(3), &BoundParams::for_learner(kind, 3, 2));
            assert!(report.passed());
            assert!(report.checks.iter().all(|c| c.passed));
        }
    }

    #[test]
    fn literal_check_is_informational() {
        // N = 1: the literal form allows no mistakes at all
        let mut ledger = GameLedger::new(1);
        ledger
            .record_step(&Event::Evaluate(QuestionId(0)), 1, &[0], MemoryCounts::default())
            .unwrap();
        let report = check_bounds(&ledger, &BoundParams::for_learner(LearnerKind::Lazy, 1, 1));
        assert!(!report.check("mistakes_literal").unwrap().passed);
        assert!(report.check("mistakes_derived").unwrap().passed);
        assert!(report.passed());
    }

    #[test]
    fn full_sim_beyond_opt_fails() {
        let mut ledger = GameLedger::new(1);
        ledger
            .record_step(&Event::Evaluate(QuestionId(0)), 1, &[0], MemoryCounts::default())
            .unwrap();
        let report = check_bounds(&ledger, &BoundParams::for_learner(LearnerKind::FullSim, 1, 1));
        assert_eq!(report.check("full_sim_within_opt").unwrap().first_violation, Some(1));
    }
}
