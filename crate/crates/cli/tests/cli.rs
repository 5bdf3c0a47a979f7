use std::path::Path;
use std::process::{Command, Output};

fn ewlr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewlr"))
        .args(args)
        .env("EWLR_NUM_THREADS", "1")
        .output()
        .expect("spawn ewlr")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn gen_data_then_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("g.svm");
    let out = ewlr(&["gen-data", "--spec", "gaussian:n=60,d=2,b=2,seed=3", "--out", path(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&data).lines().count(), 60);

    let run_dir = dir.path().join("run");
    let out = ewlr(&[
        "run", "--data", path(&data), "--predictor", "ogd", "--B", "2", "--n", "40", "--seed", "5", "--repeats", "3", "--out",
        path(&run_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["rounds.csv", "summary.csv", "curve.csv", "config.json", "curve.svg"] {
        assert!(run_dir.join(f).is_file(), "missing {f}");
    }
    let rounds = read(&run_dir.join("rounds.csv"));
    assert_eq!(rounds.lines().next().unwrap(), "repeat,t,p_plus,loss,cum_loss,avg_loss,acceptance,h,transitions");
    assert_eq!(rounds.lines().count(), 1 + 3 * 40);
    assert!(!rounds.contains('\r'));
    let curve = read(&run_dir.join("curve.csv"));
    assert_eq!(curve.lines().next().unwrap(), "t,median,q25,q75");
    assert_eq!(curve.lines().count(), 41);
}

#[test]
fn run_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let go = |name: &str| {
        let d = dir.path().join(name);
        let out = ewlr(&[
            "run", "--data", "gen:gaussian:n=30,d=2,b=1,seed=9", "--predictor", "ew-practical", "--B", "2", "--seed", "4",
            "--repeats", "2", "--no-svg", "--out", path(&d),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        read(&d.join("rounds.csv"))
    };
    assert_eq!(go("a"), go("b"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "data = gen:gaussian:n=50,d=2,b=1,seed=2\npredictor = ons\nB = 3\nrepeats = 2\nn = 20\n").unwrap();
    let run_dir = dir.path().join("run");
    let out = ewlr(&["run", "--config", path(&cfg), "--predictor", "ogd", "--n", "10", "--no-svg", "--out", path(&run_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let resolved: serde_json::Value = serde_json::from_str(&read(&run_dir.join("config.json"))).unwrap();
    assert_eq!(resolved["predictor"], "ogd");
    assert_eq!(resolved["n"], 10);
    assert_eq!(resolved["repeats"], 2);
    assert_eq!(resolved["B"], 3.0);
    assert_eq!(read(&run_dir.join("rounds.csv")).lines().count(), 1 + 2 * 10);
}

#[test]
fn sweep_b_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = ewlr(&[
        "sweep-b", "--data", "gen:gaussian:n=40,d=2,b=1,seed=1", "--predictor", "ogd", "--repeats", "2", "--grid", "0.5,2,8",
        "--out", path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = read(&dir.path().join("sweep.csv"));
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "B,median,q25,q75,values");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.5,"));
    assert!(dir.path().join("sweep.svg").is_file());
}

#[test]
fn comparator_prints_json_and_fills_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = ewlr(&["comparator", "--data", "gen:gaussian:n=40,d=2,b=1,seed=1", "--B", "2", "--cache", path(&cache)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sol["converged"], true);
    let theta: Vec<f64> = serde_json::from_value(sol["theta"].clone()).unwrap();
    assert!(theta.iter().map(|v| v * v).sum::<f64>().sqrt() <= 2.0 + 1e-9);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
}

#[test]
fn verify_plateau_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = ewlr(&["verify", "--suite", "plateau", "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("B plateau: PASS"));
    let rep: serde_json::Value = serde_json::from_str(&read(&report)).unwrap();
    assert_eq!(rep["passed"], true);
}

#[test]
fn errors_exit_with_code_two() {
    let out = ewlr(&["run", "--data", "/no/such/file.svm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
    let out = ewlr(&["run", "--data", "gen:gaussian:n=10,d=2,b=1,seed=1", "--B", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = ewlr(&["run", "--data", "gen:gaussian:n=10,d=2,b=1,seed=1", "--target-acceptance", "0.99", "--target-width", "0.05"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_thread_count_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ewlr"))
        .args(["gen-data", "--spec", "gaussian:n=5,d=1,b=1,seed=1", "--out", "/dev/null"])
        .env("EWLR_NUM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
