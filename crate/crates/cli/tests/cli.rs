use std::fs;
use std::process::{Command, Output};

fn recollect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recollect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const RANDOM: &str = "random:universe=30,T=1500,teach=0.5,seed=9";

#[test]
fn run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("game.csv");
    let summary = dir.path().join("game.json");
    let out = recollect(&[
        "run", "--learner", "value-lazy", "--adversary", RANDOM, "--experts", "values:N=6", "--M", "3",
        "--seed", "9", "--csv", csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(), "--check-bounds",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("question_memory"), "{stdout}");
    assert!(stdout.ends_with("bounds passed\n"));

    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1501);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["T"], 1500);
    assert_eq!(json["learner"], "value-lazy");
    let last_l: u64 = rows.lines().last().unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert_eq!(json["L"], last_l);
}

#[test]
fn identical_seeds_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("{i}.csv"));
        let out = recollect(&[
            "run", "--learner", "random-evict", "--adversary", RANDOM, "--experts", "random:N=5", "--M", "2",
            "--seed", "4", "--csv", csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        texts.push(fs::read(csv).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn stream_and_suite_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("s.txt");
    let suite = dir.path().join("e.txt");
    fs::write(&stream, "T capital paris\nT river seine\nE capital\nE river\n").unwrap();
    fs::write(&suite, "expert a value capital 2\nexpert a value river 1\nexpert b value capital 1\nexpert b value river 2\n").unwrap();
    let out = recollect(&[
        "run", "--learner", "lazy", "--adversary", &format!("file:{}", stream.display()), "--experts",
        suite.to_str().unwrap(), "--M", "1", "--oracle", "threshold", "--check-bounds",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("T=4"));
}

#[test]
fn budget_violation_exits_1() {
    let out = recollect(&["run", "--learner", "lazy", "--adversary", "lowerbound:c=1,N=4,M=2,opt=1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget is 2"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["run", "--learner", "lazy", "--adversary", "random:universe=5"],
        vec!["run", "--learner", "value-lazy", "--adversary", RANDOM, "--experts", "recent:N=3", "--M", "2"],
        vec!["run", "--learner", "lazy", "--adversary", RANDOM, "--experts", "/no/such/file", "--M", "2"],
        vec!["run", "--learner", "lazy", "--adversary", "lowerbound:c=1,N=4,M=2,opt=1", "--M", "3"],
        vec!["sweep", "--grid", "/no/such/grid.toml"],
        vec!["bogus"],
    ] {
        let out = recollect(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn sweep_writes_one_row_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.toml");
    let out_csv = dir.path().join("out.csv");
    fs::write(
        &grid,
        "learners = [\"lazy\", \"value-lazy\"]\nsuites = [\"values\", \"first\"]\nN = [2, 4]\nM = [2]\nT = 500\nseeds = 2\n",
    )
    .unwrap();
    let out = recollect(&["sweep", "--grid", grid.to_str().unwrap(), "--out", out_csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // lazy: 2 suites x 2 N x 2 seeds; value-lazy: values only
    assert_eq!(fs::read_to_string(out_csv).unwrap().lines().count(), 1 + 8 + 4);
}

#[test]
fn quick_verify_reports_every_criterion() {
    let out = recollect(&["verify", "--quick"]);
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = stdout.lines().filter(|l| l.contains("criterion")).collect();
    assert_eq!(lines.len(), 10, "{stdout}");
    assert!(lines.iter().all(|l| l.starts_with("PASS") || l.starts_with("FAIL")));
    let all_passed = lines.iter().all(|l| l.starts_with("PASS"));
    assert_eq!(code(&out), if all_passed { 0 } else { 1 });
}
