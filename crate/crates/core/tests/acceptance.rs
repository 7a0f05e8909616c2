//! Acceptance checks at full scale. Each test prints one PASS/FAIL line.
//!
//! The tests hold a shared lock so the timed sweeps are not competing with
//! the other checks for the CPU.

use std::io::Write;
use std::sync::{Mutex, MutexGuard, OnceLock};

use recollect_core::harness::{emit_outputs, run_scenario, OutputPaths, RunConfig, Scenario, Summary};
use recollect_core::verify::{self, CriterionOutcome, ExhaustiveEvidence, RandomStreamEvidence, Scale, SweepEvidence};
use recollect_core::{LearnerKind, SuiteKind};

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn sweep() -> &'static SweepEvidence {
    static SWEEP: OnceLock<SweepEvidence> = OnceLock::new();
    SWEEP.get_or_init(|| verify::run_acceptance_sweep(Scale::Full))
}

fn small_streams() -> &'static (ExhaustiveEvidence, RandomStreamEvidence) {
    static SMALL: OnceLock<(ExhaustiveEvidence, RandomStreamEvidence)> = OnceLock::new();
    SMALL.get_or_init(|| {
        (
            verify::exhaustive_small_streams(Scale::Full),
            verify::random_small_streams(Scale::Full, 0x5eed),
        )
    })
}

// written to the raw handle so the verdict shows without --nocapture
fn report(outcome: CriterionOutcome) {
    let _ = writeln!(std::io::stderr(), "{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_lazy_fact_memory() {
    let _g = serial();
    report(verify::criterion_1(sweep()));
}

#[test]
fn criterion_2_value_lazy_memory() {
    let _g = serial();
    report(verify::criterion_2(sweep()));
}

#[test]
fn criterion_3_mistake_bound() {
    let _g = serial();
    report(verify::criterion_3(sweep()));
}

#[test]
fn criterion_4_threshold_and_counter_monitors() {
    let _g = serial();
    report(verify::criterion_4(sweep()));
}

#[test]
fn criterion_5_oracle_backings_agree() {
    let _g = serial();
    let (ex, rs) = small_streams();
    report(verify::criterion_5(ex, rs));
}

#[test]
fn criterion_6_lower_bound_at_budget_m() {
    let _g = serial();
    report(verify::criterion_6());
}

#[test]
fn criterion_6b_lower_bound_at_budget_2m() {
    let _g = serial();
    report(verify::criterion_6b());
}

#[test]
fn criterion_7_majority_keeps_at_most_2m() {
    let _g = serial();
    report(verify::criterion_7(Scale::Full, 0x1e33a));
}

#[test]
fn criterion_8_value_expert_semantics() {
    let _g = serial();
    let (ex, rs) = small_streams();
    report(verify::criterion_8(ex, rs));
}

#[test]
fn criterion_9_deterministic_outputs() {
    let _g = serial();
    let outcome = verify::criterion_9();

    // the files written by the CLI path match too
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let mut s = Scenario::random(SuiteKind::Recent, 6, 3, 30, 2_000, 0.4, 11).unwrap();
        let out = run_scenario(&RunConfig::new(LearnerKind::Lazy), &mut s).unwrap();
        let paths = OutputPaths {
            csv: Some(dir.path().join(format!("{run}.csv"))),
            summary: Some(dir.path().join(format!("{run}.json"))),
        };
        emit_outputs(&out, &Summary::new(LearnerKind::Lazy, 3, &out), &s.vocab, &paths).unwrap();
        let read = |p: &Option<std::path::PathBuf>| std::fs::read(p.as_ref().unwrap()).unwrap();
        files.push((read(&paths.csv), read(&paths.summary)));
    }
    let same_files = files[0] == files[1];
    report(CriterionOutcome {
        passed: outcome.passed && same_files,
        detail: format!(
            "{}; written files {}",
            outcome.detail,
            if same_files { "identical" } else { "differ" }
        ),
        ..outcome
    });
}
