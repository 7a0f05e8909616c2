use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use recollect_core::adversaries::AdversarySpec;
use recollect_core::harness::{
    emit_outputs, run_scenario, run_sweep, ExpertSpec, OutputPaths, RunConfig, Scenario, Summary, SweepGrid,
    SweepResult,
};
use recollect_core::learners::ThresholdRefresh;
use recollect_core::verify::{self, Scale};
use recollect_core::{Error, LearnerKind, OracleBacking};

/// Memory-bounded online question answering with expert advice.
#[derive(Parser)]
#[command(name = "recollect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and report its bounds.
    Run(RunArgs),
    /// Run the acceptance checks; exits 1 if any fails.
    Verify {
        /// Smaller sweeps and fewer random instances.
        #[arg(long)]
        quick: bool,
    },
    /// Play every case of a TOML parameter grid.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        /// CSV of per-case results; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// mwu, lazy, value-lazy, full-sim or random-evict.
    #[arg(long)]
    learner: LearnerKind,
    /// random:universe=U,T=T,teach=F,seed=S | lowerbound:c=C,N=N,M=M,opt=K | file:PATH
    #[arg(long)]
    adversary: AdversarySpec,
    /// <suite>:N=<n> for a built-in suite, or a value-based suite file.
    #[arg(long)]
    experts: Option<ExpertSpec>,
    /// Expert memory size.
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Exit 1 when a required bound fails, and print every check.
    #[arg(long)]
    check_bounds: bool,
    #[arg(long, value_enum, default_value_t = Oracle::Simulation)]
    oracle: Oracle,
    #[arg(long, value_enum, default_value_t = Refresh::AfterInsert)]
    refresh: Refresh,
    /// Multiplicative-weights discount.
    #[arg(long, default_value_t = recollect_core::learners::DEFAULT_GAMMA)]
    gamma: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Simulation,
    Threshold,
}

#[derive(Clone, Copy, ValueEnum)]
enum Refresh {
    AfterInsert,
    BeforeInsert,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify { quick } => run_verify(if quick { Scale::Quick } else { Scale::Full }),
        Command::Sweep { grid, out } => sweep(grid, out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let config = err.downcast_ref::<Error>().is_some_and(Error::is_config_error);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

fn run(args: RunArgs) -> anyhow::Result<bool> {
    let mut scenario = Scenario::build(&args.adversary, args.experts.as_ref(), args.m, args.seed)?;
    let config = RunConfig {
        oracle: match args.oracle {
            Oracle::Simulation => OracleBacking::Simulation,
            Oracle::Threshold => OracleBacking::Threshold,
        },
        refresh: match args.refresh {
            Refresh::AfterInsert => ThresholdRefresh::AfterInsert,
            Refresh::BeforeInsert => ThresholdRefresh::BeforeInsert,
        },
        gamma: args.gamma,
        seed: args.seed,
        ..RunConfig::new(args.learner)
    };
    let outcome = run_scenario(&config, &mut scenario)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let summary = Summary::new(args.learner, scenario.m, &outcome);
    let paths = OutputPaths {
        csv: args.csv,
        summary: args.summary,
    };
    emit_outputs(&outcome, &summary, &scenario.vocab, &paths)?;

    println!(
        "{} N={} M={} T={} L={} OPT={} max_fact_mem={} max_question_mem={} max_aux={}",
        summary.learner, summary.n, summary.m, summary.t, summary.l, summary.opt, summary.max_fact_mem,
        summary.max_question_mem, summary.max_aux
    );
    if !args.check_bounds {
        return Ok(true);
    }
    for check in &outcome.report.checks {
        let verdict = match (check.passed, check.required) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "fail (informational)",
        };
        let first = check
            .first_violation
            .map(|t| format!(", first violation at t={t}"))
            .unwrap_or_default();
        println!("  {:<24} {verdict} (worst slack {}{first})", check.name, check.worst_slack);
    }
    println!("bounds {}", if outcome.report.passed() { "passed" } else { "FAILED" });
    Ok(outcome.report.passed())
}

fn run_verify(scale: Scale) -> anyhow::Result<bool> {
    let outcomes = verify::run_all(scale);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    Ok(failed == 0)
}

fn sweep(grid: PathBuf, out: Option<PathBuf>) -> anyhow::Result<bool> {
    let cases = SweepGrid::read(&grid)?.cases()?;
    let results = run_sweep(&cases);
    match &out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            SweepResult::write_csv(&results, BufWriter::new(file))?;
        }
        None => SweepResult::write_csv(&results, io::stdout().lock())?,
    }
    let failed: Vec<&SweepResult> = results.iter().filter(|r| !r.passed()).collect();
    for r in failed.iter().take(10) {
        let why = r.error.clone().unwrap_or_else(|| r.failures.join(", "));
        eprintln!(
            "failed: {} suite={} N={} M={} seed={}: {why}",
            r.case.learner, r.case.suite, r.case.n, r.case.m, r.case.seed
        );
    }
    eprintln!("{} of {} cases passed", results.len() - failed.len(), results.len());
    Ok(failed.is_empty())
}
