//! The acceptance checks, runnable from the CLI and from the test suite.
//!
//! Each check returns a [`CriterionOutcome`] instead of panicking so that a
//! failing check still reports what it measured.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experts::{
    ExpertId, ExpertOracle, ExpertSuite, OracleBacking, SuiteKind, ThresholdOracle,
    ValueFunction,
};
use crate::harness::{
    ledger_csv, run_scenario, run_sweep, summary_json, RunConfig, Scenario, Summary, SweepCase, SweepResult,
};
use crate::learners::{majority_kept, weighted_keep, LearnerKind};
use crate::model::{AnswerId, EventKind, Fact, GroundTruth, QuestionId};

/// How much work each check does. `Full` is the acceptance scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} criterion {} ({}): {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: &'static str, title: &'static str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
    }
}

/// Random-stream sweep results shared by criteria 1 to 4.
#[derive(Debug, Clone)]
pub struct SweepEvidence {
    pub lazy: Vec<SweepResult>,
    pub value_lazy: Vec<SweepResult>,
    pub lazy_elapsed: Duration,
    pub value_lazy_elapsed: Duration,
}

pub const SWEEP_N: [usize; 3] = [2, 8, 64];
pub const SWEEP_M: [usize; 3] = [1, 4, 16];
const UNIVERSE_FACTORS: [usize; 3] = [2, 8, 32];
const TEACH_FRACTIONS: [f64; 3] = [0.2, 0.5, 0.8];
pub const SWEEP_BUDGET: Duration = Duration::from_secs(120);

/// Seeds per (N, M) cell, stream length.
fn sweep_size(scale: Scale) -> (u64, usize) {
    match scale {
        Scale::Quick => (4, 5_000),
        Scale::Full => (12, 100_000),
    }
}

/// Cases for `learner`: every (N, M) cell with a run of seeds, each seed
/// taking its own universe size, teach fraction and (for `lazy`) suite.
pub fn sweep_cases(learner: LearnerKind, scale: Scale) -> Vec<SweepCase> {
    let (seeds, steps) = sweep_size(scale);
    let mut cases = Vec::new();
    for n in SWEEP_N {
        for m in SWEEP_M {
            for seed in 0..seeds {
                let s = seed as usize;
                let suite = if learner == LearnerKind::ValueLazy {
                    SuiteKind::Values
                } else {
                    SuiteKind::ALL[s % SuiteKind::ALL.len()]
                };
                cases.push(SweepCase {
                    learner,
                    suite,
                    n,
                    m,
                    universe: (UNIVERSE_FACTORS[s % 3] * m).max(4),
                    steps,
                    teach: TEACH_FRACTIONS[(s / 3) % 3],
                    seed,
                    oracle: OracleBacking::Simulation,
                });
            }
        }
    }
    cases
}

pub fn run_acceptance_sweep(scale: Scale) -> SweepEvidence {
    let start = Instant::now();
    let lazy = run_sweep(&sweep_cases(LearnerKind::Lazy, scale));
    let lazy_elapsed = start.elapsed();
    let start = Instant::now();
    let value_lazy = run_sweep(&sweep_cases(LearnerKind::ValueLazy, scale));
    SweepEvidence {
        lazy,
        value_lazy,
        lazy_elapsed,
        value_lazy_elapsed: start.elapsed(),
    }
}

fn describe(r: &SweepResult) -> String {
    let c = &r.case;
    format!(
        "{} suite={} N={} M={} U={} teach={} seed={}",
        c.learner, c.suite, c.n, c.m, c.universe, c.teach, c.seed
    )
}

/// First run that errored, failed `named`, or broke `extra`.
fn first_bad<'a>(
    results: &'a [SweepResult],
    named: &[&str],
    extra: impl Fn(&SweepResult) -> Option<String>,
) -> Option<(&'a SweepResult, String)> {
    results.iter().find_map(|r| {
        if let Some(e) = &r.error {
            return Some((r, e.clone()));
        }
        if let Some(f) = r.failures.iter().find(|f| named.contains(&f.as_str())) {
            return Some((r, format!("bound `{f}` failed")));
        }
        extra(r).map(|why| (r, why))
    })
}

fn max_of(results: &[SweepResult], f: impl Fn(&Summary) -> usize) -> usize {
    results.iter().filter_map(|r| r.summary.as_ref()).map(f).max().unwrap_or(0)
}

pub fn criterion_1(ev: &SweepEvidence) -> CriterionOutcome {
    let title = "lazy fact memory <= 2M";
    let suites: BTreeSet<&str> = ev.lazy.iter().map(|r| r.case.suite.name()).collect();
    let bad = first_bad(&ev.lazy, &["fact_memory"], |r| {
        let s = r.summary.as_ref()?;
        (s.max_fact_mem > 2 * s.m).then(|| format!("held {} facts", s.max_fact_mem))
    });
    let fast = ev.lazy_elapsed < SWEEP_BUDGET;
    let detail = format!(
        "{} streams over {} suites, worst fact memory/2M = {:.3}, {:.1}s{}",
        ev.lazy.len(),
        suites.len(),
        ev.lazy
            .iter()
            .filter_map(|r| r.summary.as_ref())
            .map(|s| s.max_fact_mem as f64 / (2 * s.m) as f64)
            .fold(0.0, f64::max),
        ev.lazy_elapsed.as_secs_f64(),
        match &bad {
            Some((r, why)) => format!("; {}: {why}", describe(r)),
            None if !fast => format!("; exceeded the {}s budget", SWEEP_BUDGET.as_secs()),
            None => String::new(),
        }
    );
    outcome("1", title, bad.is_none() && fast && ev.lazy.len() >= 100, detail)
}

pub fn criterion_2(ev: &SweepEvidence) -> CriterionOutcome {
    let title = "value-lazy fact and question memory <= 2M each";
    let bad = first_bad(&ev.value_lazy, &["fact_memory", "question_memory"], |r| {
        let s = r.summary.as_ref()?;
        (s.max_fact_mem > 2 * s.m || s.max_question_mem > 2 * s.m)
            .then(|| format!("held {} facts, {} questions", s.max_fact_mem, s.max_question_mem))
    });
    let detail = format!(
        "{} streams, max facts {} / max questions {} (largest M = 16), {:.1}s{}",
        ev.value_lazy.len(),
        max_of(&ev.value_lazy, |s| s.max_fact_mem),
        max_of(&ev.value_lazy, |s| s.max_question_mem),
        ev.value_lazy_elapsed.as_secs_f64(),
        bad.as_ref().map(|(r, why)| format!("; {}: {why}", describe(r))).unwrap_or_default()
    );
    outcome("2", title, bad.is_none() && ev.value_lazy.len() >= 100, detail)
}

pub fn criterion_3(ev: &SweepEvidence) -> CriterionOutcome {
    let title = "mistakes <= 6(OPT+M)(ceil(log_1.5 N)+1) at every prefix";
    let all: Vec<&SweepResult> = ev.lazy.iter().chain(&ev.value_lazy).collect();
    let bad = all.iter().find_map(|r| {
        if let Some(e) = &r.error {
            return Some(format!("{}: {e}", describe(r)));
        }
        r.failures
            .iter()
            .any(|f| f == "mistakes_derived")
            .then(|| format!("{}: derived bound failed", describe(r)))
    });
    let literal = all.iter().filter(|r| r.literal_passed).count();
    let failed = bad.is_some();
    let detail = format!(
        "{} streams; derived form {}; literal 6*OPT*ceil(log2 N)+6M*ceil(log2 N) held on {}/{}",
        all.len(),
        if bad.is_none() { "held on all" } else { "failed" },
        literal,
        all.len()
    ) + &bad.map(|b| format!("; {b}")).unwrap_or_default();
    outcome("3", title, !failed, detail)
}

pub fn criterion_4(ev: &SweepEvidence) -> CriterionOutcome {
    let title = "threshold estimates and error counters never exceed the truth";
    let all: Vec<&SweepResult> = ev.lazy.iter().chain(&ev.value_lazy).collect();
    let bad = all.iter().find_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", describe(r))));
    let threshold_checks: u64 = ev.value_lazy.iter().map(|r| r.monitor.threshold_checks).sum();
    let live_pre: u64 = ev.value_lazy.iter().map(|r| r.monitor.live_pre_checks).sum();
    let counter_checks: u64 = all.iter().map(|r| r.monitor.counter_checks).sum();
    let exercised = threshold_checks > 0 && live_pre > 0 && counter_checks > 0;
    let detail = format!(
        "{threshold_checks} threshold comparisons ({live_pre} with a live pre-threshold), {counter_checks} counter comparisons{}",
        bad.as_ref().map(|b| format!("; {b}")).unwrap_or_default()
    );
    outcome("4", title, bad.is_none() && exercised, detail)
}

/// The `N = 6` value functions over a 3-question universe: every ranking.
fn all_rankings() -> Vec<ValueFunction> {
    let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    perms
        .iter()
        .enumerate()
        .map(|(e, p)| ValueFunction::new(ExpertId(e), p.to_vec()).expect("a ranking is injective"))
        .collect()
}

fn fact(q: QuestionId) -> Fact {
    Fact::new(q, AnswerId(q.0))
}

/// Expert states after a prefix, advanced by both backings and a replay
/// record of every question offered.
#[derive(Clone)]
struct Probe {
    suite: ExpertSuite,
    oracle: ThresholdOracle,
    truth: GroundTruth,
    offered: Vec<QuestionId>,
    thresholds: Vec<u64>,
}

impl Probe {
    fn new(functions: &[ValueFunction], m: usize, universe: usize) -> Result<Self> {
        let suite = ExpertSuite::value_based(functions.to_vec(), m, universe)?;
        let oracle = ThresholdOracle::new(suite.value_table().expect("value based"), m);
        Ok(Probe {
            suite,
            oracle,
            truth: GroundTruth::new(universe),
            offered: Vec::new(),
            thresholds: vec![0; functions.len()],
        })
    }

    /// Applies one event. Evaluations of untaught questions offer nothing.
    fn apply(&mut self, teach: bool, q: QuestionId) -> Result<()> {
        if teach {
            self.truth.learn(fact(q))?;
        }
        if self.truth.answer(q).is_some() {
            let kind = if teach { EventKind::Teach } else { EventKind::Evaluate };
            self.suite.offer_all(fact(q), kind)?;
            self.oracle.observe(q)?;
            if !self.offered.contains(&q) {
                self.offered.push(q);
            }
        }
        Ok(())
    }

    /// Disagreements between the two oracle backings.
    fn oracle_mismatch(&self) -> Result<Option<String>> {
        for e in 0..self.suite.len() {
            for q in 0..self.suite.universe() as u32 {
                let q = QuestionId(q);
                let (sim, thr) = (self.suite.query(ExpertId(e), q)?, self.oracle.query(ExpertId(e), q)?);
                if sim != thr {
                    return Ok(Some(format!("e{e} q{}: simulation {sim}, threshold {thr}", q.0)));
                }
            }
        }
        Ok(None)
    }

    /// Differences between each expert and a top-M replay of what it was
    /// offered; also checks the true threshold and its monotonicity.
    fn semantics_mismatch(&mut self, functions: &[ValueFunction], m: usize) -> Option<String> {
        for (e, f) in functions.iter().enumerate() {
            let mut ranked: Vec<(u64, QuestionId)> = self
                .offered
                .iter()
                .map(|&q| (f.value(q).expect("total on the universe"), q))
                .collect();
            ranked.sort_unstable_by(|a, b| b.cmp(a));
            let expected: BTreeSet<QuestionId> = ranked.iter().take(m).map(|&(_, q)| q).collect();
            let held: BTreeSet<QuestionId> = self
                .suite
                .expert(ExpertId(e))
                .expect("expert exists")
                .facts()
                .iter()
                .map(|f| f.question)
                .collect();
            if held != expected {
                return Some(format!("e{e} holds {held:?}, top-{m} replay is {expected:?}"));
            }
            let want = if ranked.len() >= m { ranked[m - 1].0 } else { 0 };
            let got = self.suite.true_threshold(ExpertId(e)).unwrap_or(0);
            if got != want {
                return Some(format!("e{e} threshold {got}, replay {want}"));
            }
            if got < self.thresholds[e] {
                return Some(format!("e{e} threshold fell from {} to {got}", self.thresholds[e]));
            }
            self.thresholds[e] = got;
        }
        None
    }
}

/// Results of walking every short stream over three questions.
#[derive(Debug, Clone, Default)]
pub struct ExhaustiveEvidence {
    pub prefixes: u64,
    pub oracle_mismatch: Option<String>,
    pub semantics_mismatch: Option<String>,
    pub error: Option<String>,
}

pub fn exhaustive_depth(scale: Scale) -> usize {
    match scale {
        Scale::Quick => 5,
        Scale::Full => 8,
    }
}

/// Walks every stream of up to `exhaustive_depth` events over 3 questions
/// (teach or evaluate each), for the 6 rankings and M = 1..=5, checking
/// oracle agreement and top-M semantics at every prefix.
pub fn exhaustive_small_streams(scale: Scale) -> ExhaustiveEvidence {
    let functions = all_rankings();
    let depth = exhaustive_depth(scale);
    let mut ev = ExhaustiveEvidence::default();
    for m in 1..=5 {
        let result = Probe::new(&functions, m, 3).and_then(|root| walk(root, &functions, m, depth, &mut ev));
        if let Err(e) = result {
            ev.error = Some(format!("M={m}: {e}"));
            break;
        }
    }
    ev
}

fn walk(mut probe: Probe, functions: &[ValueFunction], m: usize, left: usize, ev: &mut ExhaustiveEvidence) -> Result<()> {
    ev.prefixes += 1;
    if ev.oracle_mismatch.is_none() {
        ev.oracle_mismatch = probe.oracle_mismatch()?.map(|s| format!("M={m}: {s}"));
    }
    if ev.semantics_mismatch.is_none() {
        ev.semantics_mismatch = probe.semantics_mismatch(functions, m).map(|s| format!("M={m}: {s}"));
    }
    if left == 0 {
        return Ok(());
    }
    for teach in [true, false] {
        for q in 0..3 {
            let mut child = probe.clone();
            child.apply(teach, QuestionId(q))?;
            walk(child, functions, m, left - 1, ev)?;
        }
    }
    Ok(())
}

/// Results of longer random streams on universes of up to 20 questions.
#[derive(Debug, Clone, Default)]
pub struct RandomStreamEvidence {
    pub streams: u64,
    pub prefixes: u64,
    pub oracle_mismatch: Option<String>,
    pub semantics_mismatch: Option<String>,
    pub error: Option<String>,
}

pub fn random_stream_count(scale: Scale) -> u64 {
    match scale {
        Scale::Quick => 1_000,
        Scale::Full => 10_000,
    }
}

/// Random instances with N <= 6, M <= 5, universes <= 20, sparse injective
/// values, and streams of 9 to 60 events that may evaluate untaught
/// questions.
pub fn random_small_streams(scale: Scale, seed: u64) -> RandomStreamEvidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ev = RandomStreamEvidence::default();
    for i in 0..random_stream_count(scale) {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=5);
        let universe = rng.random_range(1..=20usize);
        let functions: Vec<ValueFunction> = (0..n)
            .map(|e| {
                let mut pool: Vec<u64> = (1..=200).collect();
                pool.shuffle(&mut rng);
                pool.truncate(universe);
                ValueFunction::new(ExpertId(e), pool).expect("distinct values")
            })
            .collect();
        let len = rng.random_range(9..=60);
        let teach_p: f64 = rng.random_range(0.1..0.9);
        let mut run = || -> Result<()> {
            let mut probe = Probe::new(&functions, m, universe)?;
            for _ in 0..len {
                let teach = rng.random_bool(teach_p);
                probe.apply(teach, QuestionId(rng.random_range(0..universe as u32)))?;
                ev.prefixes += 1;
                if ev.oracle_mismatch.is_none() {
                    ev.oracle_mismatch = probe.oracle_mismatch()?.map(|s| format!("stream {i}: {s}"));
                }
                if ev.semantics_mismatch.is_none() {
                    ev.semantics_mismatch = probe.semantics_mismatch(&functions, m).map(|s| format!("stream {i}: {s}"));
                }
            }
            Ok(())
        };
        if let Err(e) = run() {
            ev.error = Some(format!("stream {i}: {e}"));
            break;
        }
        ev.streams += 1;
    }
    ev
}

pub fn criterion_5(ex: &ExhaustiveEvidence, rs: &RandomStreamEvidence) -> CriterionOutcome {
    let problem = ex
        .error
        .clone()
        .or_else(|| ex.oracle_mismatch.clone())
        .or_else(|| rs.error.clone())
        .or_else(|| rs.oracle_mismatch.clone());
    let detail = format!(
        "{} exhaustive prefixes, {} random streams ({} prefixes), all (expert, question) pairs{}",
        ex.prefixes,
        rs.streams,
        rs.prefixes,
        problem.as_ref().map(|p| format!("; {p}")).unwrap_or_default()
    );
    outcome("5", "threshold and simulation oracles agree", problem.is_none() && ex.prefixes > 0, detail)
}

pub fn criterion_8(ex: &ExhaustiveEvidence, rs: &RandomStreamEvidence) -> CriterionOutcome {
    let problem = ex
        .error
        .clone()
        .or_else(|| ex.semantics_mismatch.clone())
        .or_else(|| rs.error.clone())
        .or_else(|| rs.semantics_mismatch.clone());
    let detail = format!(
        "{} exhaustive prefixes, {} random prefixes; memory = top-M replay, threshold = M-th largest, monotone{}",
        ex.prefixes,
        rs.prefixes,
        problem.as_ref().map(|p| format!("; {p}")).unwrap_or_default()
    );
    outcome("8", "value-based experts keep the top M by value", problem.is_none() && ex.prefixes > 0, detail)
}

/// Learners the lower-bound construction is played against.
pub const LOWER_BOUND_LEARNERS: [LearnerKind; 4] =
    [LearnerKind::Mwu, LearnerKind::Lazy, LearnerKind::ValueLazy, LearnerKind::RandomEvict];

/// One lower-bound game: the learner's mistakes, the guarantee, and the
/// worst surviving expert, or the error that stopped the game.
#[derive(Debug, Clone)]
pub struct LowerBoundRun {
    pub learner: LearnerKind,
    pub c: usize,
    pub n: usize,
    pub m: usize,
    pub opt: usize,
    pub guaranteed: u64,
    pub result: std::result::Result<(u64, u64), String>,
}

impl LowerBoundRun {
    pub fn passed(&self) -> bool {
        matches!(self.result, Ok((l, survivor)) if l >= self.guaranteed && survivor <= self.opt as u64)
    }
}

pub fn lower_bound_runs(c: usize, ns: &[usize], ms: &[usize], opts: &[usize]) -> Vec<LowerBoundRun> {
    let mut runs = Vec::new();
    for &n in ns {
        for &m in ms {
            for &opt in opts {
                for learner in LOWER_BOUND_LEARNERS {
                    let played = Scenario::lower_bound(c, n, m, opt).and_then(|mut s| {
                        let out = run_scenario(&RunConfig::new(learner), &mut s)?;
                        let adv = s.lower_bound_adversary().expect("lower-bound scenario");
                        let survivor = adv
                            .survivors()
                            .iter()
                            .map(|e| out.ledger.expert_mistakes()[e.0])
                            .max()
                            .unwrap_or(u64::MAX);
                        Ok((out.ledger.learner_mistakes(), survivor, adv.instance().guaranteed_mistakes()))
                    });
                    let guaranteed = crate::adversaries::LowerBoundInstance::build(c, n, m, opt)
                        .map_or(0, |i| i.guaranteed_mistakes() as u64);
                    runs.push(LowerBoundRun {
                        learner,
                        c,
                        n,
                        m,
                        opt,
                        guaranteed,
                        result: played.map(|(l, s, _)| (l, s)).map_err(|e| e.to_string()),
                    });
                }
            }
        }
    }
    runs
}

fn lower_bound_outcome(id: &'static str, title: &'static str, runs: &[LowerBoundRun], elapsed: Duration) -> CriterionOutcome {
    let failed: Vec<String> = runs
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            let why = match &r.result {
                Ok((l, s)) => format!("L={l} < {} or survivor {s} > {}", r.guaranteed, r.opt),
                Err(e) => e.clone(),
            };
            format!("{} N={} M={} OPT={}: {why}", r.learner, r.n, r.m, r.opt)
        })
        .collect();
    let detail = format!(
        "{}/{} games met the guarantee, {:.2}s{}",
        runs.len() - failed.len(),
        runs.len(),
        elapsed.as_secs_f64(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; first failures: {}", failed.iter().take(4).cloned().collect::<Vec<_>>().join(" | "))
        }
    );
    outcome(id, title, failed.is_empty() && elapsed < Duration::from_secs(60), detail)
}

/// Lower bound at learner budget `M` (c = 1).
pub fn criterion_6() -> CriterionOutcome {
    let start = Instant::now();
    let runs = lower_bound_runs(1, &[4, 8, 16], &[2, 4], &[0, 2]);
    lower_bound_outcome(
        "6",
        "c=1 lower bound: L >= floor(log2 N)*floor(M/2) + OPT, survivor <= OPT",
        &runs,
        start.elapsed(),
    )
}

/// Lower bound at learner budget `2M` (c = 2), the memory the learners
/// actually use.
pub fn criterion_6b() -> CriterionOutcome {
    let start = Instant::now();
    let runs = lower_bound_runs(2, &[4, 8, 16, 64], &[2, 4], &[0, 2]);
    lower_bound_outcome(
        "6b",
        "c=2 lower bound: L >= floor(log4 N)*floor(M/2) + OPT, survivor <= OPT",
        &runs,
        start.elapsed(),
    )
}

pub fn helper_lemma_count(scale: Scale) -> u64 {
    match scale {
        Scale::Quick => 1_000,
        Scale::Full => 10_000,
    }
}

/// Random majority instances: `N <= 16` experts, `D <= 48` facts, each
/// expert storing at most `M <= 6` of them, and a 0/1 weighting with at
/// least one 1. Real-valued weights are checked on the same memberships.
pub fn criterion_7(scale: Scale, seed: u64) -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = helper_lemma_count(scale);
    let mut worst = 0.0f64;
    let mut failure = None;
    for i in 0..count {
        let n = rng.random_range(1..=16usize);
        let d = rng.random_range(1..=48usize);
        let m = rng.random_range(1..=6usize);
        let mut holders = vec![FixedBitSet::with_capacity(n); d];
        let mut facts: Vec<usize> = (0..d).collect();
        for e in 0..n {
            facts.shuffle(&mut rng);
            for &f in facts.iter().take(rng.random_range(0..=m.min(d))) {
                holders[f].insert(e);
            }
        }
        let mut weights = FixedBitSet::with_capacity(n);
        while weights.is_clear() {
            for e in 0..n {
                weights.set(e, rng.random_bool(0.5));
            }
        }
        let kept = majority_kept(&weights, &holders).len();
        let real: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + f64::MIN_POSITIVE).collect();
        let total: f64 = real.iter().sum();
        let kept_real = holders
            .iter()
            .filter(|h| weighted_keep(h.ones().map(|e| real[e]).sum(), total))
            .count();
        worst = worst.max(kept.max(kept_real) as f64 / (2 * m) as f64);
        if (kept > 2 * m || kept_real > 2 * m) && failure.is_none() {
            failure = Some(format!("instance {i}: N={n} D={d} M={m} kept {kept} (0/1) / {kept_real} (real)"));
        }
    }
    let detail = format!(
        "{count} instances, worst kept/2M = {worst:.3}{}",
        failure.as_ref().map(|f| format!("; {f}")).unwrap_or_default()
    );
    outcome("7", "majority-kept set has at most 2M facts", failure.is_none(), detail)
}

/// Configurations replayed for the determinism check.
fn determinism_scenarios() -> Vec<(LearnerKind, &'static str)> {
    vec![
        (LearnerKind::Lazy, "random"),
        (LearnerKind::ValueLazy, "random"),
        (LearnerKind::Mwu, "random"),
        (LearnerKind::RandomEvict, "random"),
        (LearnerKind::Lazy, "lowerbound"),
    ]
}

/// CSV and summary bytes of one run.
pub fn run_bytes(learner: LearnerKind, adversary: &str, seed: u64) -> Result<(String, String)> {
    let mut scenario = match adversary {
        "lowerbound" => Scenario::lower_bound(2, 16, 4, 2)?,
        _ => Scenario::random(SuiteKind::Values, 8, 4, 40, 3_000, 0.5, seed)?,
    };
    let config = RunConfig {
        seed,
        ..RunConfig::new(learner)
    };
    let out = run_scenario(&config, &mut scenario)?;
    let summary = Summary::new(learner, scenario.m, &out);
    Ok((ledger_csv(&out.ledger, &scenario.vocab)?, summary_json(&summary)?))
}

pub fn criterion_9() -> CriterionOutcome {
    let mut problems = Vec::new();
    let mut compared = 0;
    for (learner, adversary) in determinism_scenarios() {
        match (run_bytes(learner, adversary, 7), run_bytes(learner, adversary, 7)) {
            (Ok(a), Ok(b)) => {
                compared += 1;
                if a != b {
                    problems.push(format!("{learner}/{adversary}: outputs differ"));
                }
            }
            (Err(e), _) | (_, Err(e)) => problems.push(format!("{learner}/{adversary}: {e}")),
        }
    }
    // the comparison must be able to fail
    let sensitive = matches!(
        (run_bytes(LearnerKind::Lazy, "random", 7), run_bytes(LearnerKind::Lazy, "random", 8)),
        (Ok(a), Ok(b)) if a != b
    );
    if !sensitive {
        problems.push("different seeds gave identical outputs".into());
    }
    let detail = format!(
        "{compared} configurations replayed, CSV and summary bytes identical{}",
        if problems.is_empty() {
            String::new()
        } else {
            format!("; {}", problems.join(" | "))
        }
    );
    outcome("9", "identical seeds give byte-identical outputs", problems.is_empty(), detail)
}

/// Every check, in order.
pub fn run_all(scale: Scale) -> Vec<CriterionOutcome> {
    let sweep = run_acceptance_sweep(scale);
    let ex = exhaustive_small_streams(scale);
    let rs = random_small_streams(scale, 0x5eed);
    vec![
        criterion_1(&sweep),
        criterion_2(&sweep),
        criterion_3(&sweep),
        criterion_4(&sweep),
        criterion_5(&ex, &rs),
        criterion_6(),
        criterion_6b(),
        criterion_7(scale, 0x1e33a),
        criterion_8(&ex, &rs),
        criterion_9(),
    ]
}
