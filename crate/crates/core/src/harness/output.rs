use std::path::PathBuf;

use serde::Serialize;

use super::GameOutcome;
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::model::{GameLedger, Vocabulary};

/// End-of-game figures written as the JSON summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub learner: LearnerKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "OPT")]
    pub opt: u64,
    pub max_fact_mem: usize,
    pub max_question_mem: usize,
    pub max_aux: usize,
    pub bounds_passed: bool,
}

impl Summary {
    pub fn new(learner: LearnerKind, m: usize, outcome: &GameOutcome) -> Self {
        let ledger = &outcome.ledger;
        Summary {
            learner,
            n: ledger.num_experts(),
            m,
            t: ledger.len(),
            l: ledger.learner_mistakes(),
            opt: ledger.opt(),
            max_fact_mem: ledger.max_fact_mem(),
            max_question_mem: ledger.max_question_mem(),
            max_aux: ledger.max_aux_state(),
            bounds_passed: outcome.report.passed(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

pub fn ledger_csv(ledger: &GameLedger, vocab: &Vocabulary) -> Result<String> {
    let mut buf = Vec::new();
    ledger.write_csv(&mut buf, vocab)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn summary_json(summary: &Summary) -> Result<String> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    Ok(text)
}

/// Writes whichever of the ledger CSV and the JSON summary were requested.
pub fn emit_outputs(outcome: &GameOutcome, summary: &Summary, vocab: &Vocabulary, paths: &OutputPaths) -> Result<()> {
    if let Some(path) = &paths.csv {
        let text = ledger_csv(&outcome.ledger, vocab)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    if let Some(path) = &paths.summary {
        std::fs::write(path, summary_json(summary)?).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
