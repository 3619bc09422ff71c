use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigmacheck"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn columns(line: &str) -> Vec<f64> {
    line.split(',').skip(3).map(|v| v.parse().unwrap()).collect()
}

#[test]
fn far_apart_prints_zero() {
    let path = fixture("far_apart");
    let o = run(&["check", "--scenario", path.to_str().unwrap(), "--scheme", "adaptive"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "agent_a,agent_b,p_collision\nego,truck,0.000000\n");
}

#[test]
fn monte_carlo_is_reproducible() {
    let path = fixture("grazing");
    let args = ["check", "--scenario", path.to_str().unwrap(), "--scheme", "monte_carlo", "--mc-n", "2000", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn curve_file_is_cumulative() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let path = fixture("crossing");
    let o = run(&["check", "--scenario", path.to_str().unwrap(), "--curve", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pair,step,time_s,p_collision"));
    let p: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(p.len(), 60);
    assert!(p.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn three_agents_report_every_pair() {
    let path = fixture("three_agents");
    let o = run(&["check", "--scenario", path.to_str().unwrap()]);
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(names, ["crosser", "oncoming"]);
}

#[test]
fn curve_compare_columns() {
    for name in ["grazing", "overlap"] {
        let path = fixture(name);
        let o = run(&["curve", "--scenario", path.to_str().unwrap(), "--mc-n", "5000"]);
        assert!(o.status.success());
        let text = stdout(&o);
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("pair,step,time_s,adaptive,unscented,gauss_hermite,monte_carlo")
        );
        let rows: Vec<Vec<f64>> = lines.map(columns).collect();
        for col in 0..4 {
            let c: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            assert!(c.iter().all(|p| (0.0..=1.0).contains(p)));
            assert!(c.windows(2).all(|w| w[1] >= w[0]));
        }
        if name == "overlap" {
            // The squares first touch at step 4.
            assert_eq!(rows[3], vec![0.0; 4]);
            assert_eq!(rows[4], vec![1.0; 4]);
        }
    }
}

#[test]
fn invalid_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("far_apart"))
        .unwrap()
        .replacen("0.05,", "-0.05,", 1);
    std::fs::write(&bad, text).unwrap();
    let o = run(&["check", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("agents[0].trajectory[0].cov"), "{err}");

    let o = run(&["check", "--scenario", "/does/not/exist.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_flag_exits_one() {
    let o = run(&["check", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn bench_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["bench", "--scenarios", dir.path().to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("no scenarios"));
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["bench", "--generate", "5", "--gt-n", "2000", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout(&o);
    let stats: Vec<&str> = summary.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(stats, ["statistic", "mean", "median", "p95", "p99"]);
    let records = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 6);
    assert!(out.join("dense.csv").exists());
}

#[test]
fn grid_contains_chosen_cell() {
    let o = run(&[
        "grid", "--generate", "3", "--gt-n", "1000", "--sigma-max", "3.4,3.8", "--w-min", "0.01", "--d-max",
        "1.625", "--repetitions", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().any(|l| l.starts_with("3.8,0.01,1.625,")));
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--template", "merging", "--seed", "5", "--k", "12"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen", "--suite", "6", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
}
