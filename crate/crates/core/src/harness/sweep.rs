use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_scenario, MonitorStats, RunConfig, Scenario, Summary};
use crate::error::{Error, Result};
use crate::experts::{OracleBacking, SuiteKind};
use crate::learners::LearnerKind;

/// One game of a sweep: a built-in suite against a seeded random stream.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCase {
    pub learner: LearnerKind,
    pub suite: SuiteKind,
    pub n: usize,
    pub m: usize,
    pub universe: usize,
    pub steps: usize,
    pub teach: f64,
    pub seed: u64,
    pub oracle: OracleBacking,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub case: SweepCase,
    pub summary: Option<Summary>,
    /// Names of required bounds that failed.
    pub failures: Vec<String>,
    pub literal_passed: bool,
    pub monitor: MonitorStats,
    pub error: Option<String>,
}

impl SweepResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.failures.is_empty()
    }
}

/// Parameter grid read from TOML. Every combination is played, except
/// `value-lazy` against suites that are not value based.
///
/// ```toml
/// learners = ["lazy", "value-lazy"]
/// suites = ["values", "recent"]
/// N = [2, 8, 64]
/// M = [1, 4, 16]
/// universe_factor = [2, 8, 32]   # universe = max(4, factor * M)
/// teach = [0.2, 0.5, 0.8]
/// T = 100000
/// seeds = 12                     # seeds 0..12
/// oracle = "simulation"          # or "threshold"
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub learners: Vec<String>,
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    #[serde(default = "default_factors")]
    pub universe_factor: Vec<usize>,
    #[serde(default = "default_teach")]
    pub teach: Vec<f64>,
    #[serde(rename = "T")]
    pub steps: usize,
    pub seeds: u64,
    #[serde(default)]
    pub oracle: Option<String>,
}

fn default_suites() -> Vec<String> {
    vec!["values".into()]
}

fn default_factors() -> Vec<usize> {
    vec![8]
}

fn default_teach() -> Vec<f64> {
    vec![0.5]
}

impl SweepGrid {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("sweep grid: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn cases(&self) -> Result<Vec<SweepCase>> {
        let learners = self
            .learners
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<LearnerKind>>>()?;
        let suites = self
            .suites
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<SuiteKind>>>()?;
        let oracle = match self.oracle.as_deref() {
            None | Some("simulation") => OracleBacking::Simulation,
            Some("threshold") => OracleBacking::Threshold,
            Some(other) => return Err(Error::config(format!("unknown oracle `{other}`"))),
        };
        if self.n.contains(&0) || self.m.contains(&0) {
            return Err(Error::config("N and M must be at least 1"));
        }
        if let Some(t) = self.teach.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::config(format!("teach fraction must lie in [0, 1], got {t}")));
        }
        let mut cases = Vec::new();
        for &learner in &learners {
            for &suite in &suites {
                if learner == LearnerKind::ValueLazy && !suite.is_value_based() {
                    continue;
                }
                if oracle == OracleBacking::Threshold && !suite.is_value_based() {
                    continue;
                }
                for &n in &self.n {
                    for &m in &self.m {
                        for &factor in &self.universe_factor {
                            for &teach in &self.teach {
                                for seed in 0..self.seeds {
                                    cases.push(SweepCase {
                                        learner,
                                        suite,
                                        n,
                                        m,
                                        universe: (factor * m).max(4),
                                        steps: self.steps,
                                        teach,
                                        seed,
                                        oracle,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(cases)
    }
}

/// Plays one case with the runtime monitors on. Errors are captured in the
/// result rather than returned.
pub fn run_case(case: &SweepCase) -> SweepResult {
    let played = Scenario::random(case.suite, case.n, case.m, case.universe, case.steps, case.teach, case.seed).and_then(
        |mut scenario| {
            let config = RunConfig {
                oracle: case.oracle,
                seed: case.seed,
                ..RunConfig::new(case.learner)
            };
            run_scenario(&config, &mut scenario)
        },
    );
    match played {
        Ok(outcome) => SweepResult {
            case: case.clone(),
            summary: Some(Summary::new(case.learner, case.m, &outcome)),
            failures: outcome.report.failures().map(|c| c.name.to_owned()).collect(),
            literal_passed: outcome.report.check("mistakes_literal").is_some_and(|c| c.passed),
            monitor: outcome.monitor,
            error: None,
        },
        Err(e) => SweepResult {
            case: case.clone(),
            summary: None,
            failures: Vec::new(),
            literal_passed: false,
            monitor: MonitorStats::default(),
            error: Some(e.to_string()),
        },
    }
}

/// Plays every case in parallel; results come back in case order.
pub fn run_sweep(cases: &[SweepCase]) -> Vec<SweepResult> {
    cases.par_iter().map(run_case).collect()
}

#[derive(Serialize)]
struct Row<'a> {
    learner: &'a str,
    suite: &'a str,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    universe: usize,
    #[serde(rename = "T")]
    t: usize,
    teach: f64,
    seed: u64,
    #[serde(rename = "L")]
    l: Option<u64>,
    #[serde(rename = "OPT")]
    opt: Option<u64>,
    max_fact_mem: Option<usize>,
    max_question_mem: Option<usize>,
    max_aux: Option<usize>,
    passed: bool,
    literal_passed: bool,
    failures: String,
    error: &'a str,
}

impl SweepResult {
    /// One CSV row per result, with a header.
    pub fn write_csv<W: Write>(results: &[SweepResult], writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for r in results {
            let s = r.summary.as_ref();
            out.serialize(Row {
                learner: r.case.learner.name(),
                suite: r.case.suite.name(),
                n: r.case.n,
                m: r.case.m,
                universe: r.case.universe,
                t: r.case.steps,
                teach: r.case.teach,
                seed: r.case.seed,
                l: s.map(|s| s.l),
                opt: s.map(|s| s.opt),
                max_fact_mem: s.map(|s| s.max_fact_mem),
                max_question_mem: s.map(|s| s.max_question_mem),
                max_aux: s.map(|s| s.max_aux),
                passed: r.passed(),
                literal_passed: r.literal_passed,
                failures: r.failures.join(";"),
                error: r.error.as_deref().unwrap_or(""),
            })?;
        }
        out.flush().map_err(|e| Error::io("<sweep output>", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = r#"
learners = ["lazy", "value-lazy", "full-sim"]
suites = ["values", "recent"]
N = [2, 5]
M = [1, 3]
T = 300
seeds = 2
"#;

    #[test]
    fn grid_expands_and_skips_value_lazy_on_scripted() {
        let cases = SweepGrid::parse(GRID).unwrap().cases().unwrap();
        // lazy and full-sim: 2 suites; value-lazy: values only
        assert_eq!(cases.len(), (2 + 1 + 2) * 2 * 2 * 2);
        assert!(cases
            .iter()
            .all(|c| c.learner != LearnerKind::ValueLazy || c.suite == SuiteKind::Values));
        assert!(cases.iter().all(|c| c.universe == (8 * c.m).max(4)));
    }

    #[test]
    fn grid_errors_are_config_errors() {
        for bad in [
            "learners = [\"nope\"]\nN=[2]\nM=[1]\nT=1\nseeds=1",
            "learners = [\"lazy\"]\nN=[0]\nM=[1]\nT=1\nseeds=1",
            "learners = [\"lazy\"]\nN=[2]\nM=[1]\nT=1\nseeds=1\nbogus=3",
            "learners = [\"lazy\"]\nN=[2]\nM=[1]\nT=1\nseeds=1\nteach=[1.5]",
        ] {
            let err = SweepGrid::parse(bad).and_then(|g| g.cases()).unwrap_err();
            assert!(err.is_config_error(), "{bad}: {err}");
        }
    }

    #[test]
    fn small_sweep_passes_and_is_ordered() {
        let cases = SweepGrid::parse(GRID).unwrap().cases().unwrap();
        let results = run_sweep(&cases);
        for (r, c) in results.iter().zip(&cases) {
            assert_eq!(&r.case, c);
            assert!(r.passed(), "{c:?}: {:?} {:?}", r.error, r.failures);
        }
        let mut buf = Vec::new();
        SweepResult::write_csv(&results, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), cases.len() + 1);
    }
}
