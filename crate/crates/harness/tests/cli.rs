use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use simrev_harness::config::ScenarioConfig;
use simrev_harness::run::{sweep, verification};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

fn simrev(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_simrev"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().expect("exit code"), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn config_with(name: &str, edit: impl Fn(String) -> String, dir: &Path) -> PathBuf {
    let text = edit(fs::read_to_string(scenario(name)).unwrap());
    let path = dir.join(format!("{name}_edited.toml"));
    fs::write(&path, text).unwrap();
    path
}

fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml(&fs::read_to_string(scenario(name)).unwrap()).unwrap()
}

#[test]
fn default_suite_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["verify", "--config", scenario("default").to_str().unwrap(), "--seed", "0"], dir.path());
    assert_eq!(code, 0, "{err}");
    let got = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let want = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/default_seed0.csv")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn identical_config_gives_identical_reports() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = scenario("single_bidder");
    for d in [&a, &b] {
        assert_eq!(simrev(&["verify", "--config", cfg.to_str().unwrap()], d.path()).0, 0);
    }
    for f in ["report.json", "report.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn counterexample_fails_c_efficiency_as_expected() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["verify", "--config", scenario("s2a").to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{err}");
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let rows: Vec<&Value> = checks
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("counterexample_s2a["))
        .collect();
    assert_eq!(rows.len(), 9);
    for c in rows {
        assert_eq!(c["passed"], false);
        assert_eq!(c["expected_fail"], true);
        assert_eq!(c["rhs"].as_f64(), Some(0.0));
        assert!(c["lhs"].as_f64().unwrap() > 0.0);
        assert!(!c["witness"].as_str().unwrap().is_empty());
    }
    let eq = checks.iter().find(|c| c["name"] == "counterexample_s2a_equilibrium").unwrap();
    assert_eq!(eq["lhs"].as_f64(), Some(0.0));
    assert!(eq["notes"][0].as_str().unwrap().contains("revenue 0, welfare 3"));
}

#[test]
fn counterexample_solve_certifies_pure_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["solve", "--config", scenario("s2a").to_str().unwrap(), "--mc-samples", "100"], dir.path());
    assert_eq!(code, 0, "{err}");
    let rec: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solve_seed0.json")).unwrap()).unwrap();
    assert_eq!(rec["epsilon"].as_f64(), Some(0.0));
    assert_eq!(rec["revenue"].as_f64(), Some(0.0));
    assert_eq!(rec["welfare"].as_f64(), Some(3.0));
    assert_eq!(rec["mc_check"].as_array().unwrap().len(), 3);
}

#[test]
fn single_bidder_solve_has_zero_regret() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["solve", "--config", scenario("single_bidder").to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{err}");
    let rec: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solve_seed0.json")).unwrap()).unwrap();
    assert_eq!(rec["epsilon"].as_f64(), Some(0.0));
}

#[test]
fn zero_value_instance_passes_every_check() {
    let (report, _) = verification(&load("zero"), None).unwrap();
    assert!(!report.checks.is_empty());
    for c in &report.checks {
        assert!(c.passed, "{}", c.name);
    }
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with(
        "default",
        |t| t.replace("seeds = [0]", "seeds = [0]\nmax_iters = 1\neps_target = 1e-9"),
        dir.path(),
    );
    let (code, _) = simrev(&["verify", "--config", cfg.to_str().unwrap(), "--check", "c_efficiency"], dir.path());
    assert_eq!(code, 1);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let default = scenario("default");
    let (code, err) = simrev(&["verify", "--config", default.to_str().unwrap(), "--check", "nope"], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("unknown check"));

    let garbage = dir.path().join("garbage.toml");
    fs::write(&garbage, "instance = 3\n").unwrap();
    assert_eq!(simrev(&["verify", "--config", garbage.to_str().unwrap()], dir.path()).0, 2);

    let bad_pmf = config_with("single_bidder", |t| t.replace("[[0.5, 0.5], [1.0]]", "[[0.5, 0.4], [1.0]]"), dir.path());
    assert_eq!(simrev(&["opt", "--config", bad_pmf.to_str().unwrap()], dir.path()).0, 2);

    let missing = dir.path().join("missing.toml");
    assert_eq!(simrev(&["solve", "--config", missing.to_str().unwrap()], dir.path()).0, 2);
}

#[test]
fn budget_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with("default", |t| t.replace("seeds = [0]", "seeds = [0]\nbudget = 10"), dir.path());
    let (code, err) = simrev(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 3);
    assert!(err.contains("budget"));
}

#[test]
fn opt_writes_program_and_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["opt", "--config", scenario("single_bidder").to_str().unwrap(), "--exact-rational"], dir.path());
    assert_eq!(code, 0, "{err}");
    let rec: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("opt.json")).unwrap()).unwrap();
    assert_eq!(rec["revenue"]["value"].as_f64(), Some(3.5));
    assert_eq!(rec["revenue"]["exact"], true);
    assert_eq!(rec["welfare"].as_f64(), Some(4.0));
    let lp = fs::read_to_string(dir.path().join("opt.lp")).unwrap();
    assert!(lp.starts_with("Maximize") && lp.trim_end().ends_with("End"));
}

#[test]
fn one_instance_sweep_agrees_with_verify() {
    let mut cfg = load("sweep_2x2");
    cfg.sweep.count = 1;
    cfg.sweep.start_seed = 3;
    let (rows, summary) = sweep(&cfg, None).unwrap();
    assert_eq!((rows.len(), summary.instances), (1, 1));
    cfg.checks.names = vec!["main_theorem".into()];
    let (report, _) = verification(&cfg, Some(3)).unwrap();
    let passed = report.checks.iter().all(|c| c.passed);
    assert_eq!(rows[0].main_theorem_passed, passed);
    let denom = 42.0 * rows[0].rev_ef + 189.0 * rows[0].rev_rp;
    assert!((rows[0].ratio - rows[0].opt / denom).abs() < 1e-12);
}

#[test]
fn decompose_writes_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = simrev(&["decompose", "--config", scenario("single_bidder").to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{err}");
    let d: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("decomposition.json")).unwrap()).unwrap();
    assert_eq!(d["opt"].as_f64(), Some(3.5));
}
