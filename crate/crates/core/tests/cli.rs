use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_formsum"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn patched(dir: &Path, name: &str, patch: impl Fn(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(scenario(name)).unwrap()).unwrap();
    patch(&mut v);
    let path = dir.join(format!("{name}-patched.json"));
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn run_prints_json_report() {
    let out = run(bin().arg("run").arg(scenario("gaussian_one")));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let per_case: f64 = v["per_case"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert_eq!(v["lhs"].as_f64().unwrap(), per_case);
    assert_eq!(v["diagnostics"]["points"].as_f64().unwrap(), v["lhs"].as_f64().unwrap());
    assert_eq!(v["w"], 11);
    assert!(v.get("runtime").is_none());
}

#[test]
fn run_is_independent_of_workers() {
    let a = run(bin().args(["run", "--workers", "1"]).arg(scenario("gaussian_tau")));
    let b = run(bin().args(["run", "--workers", "8"]).arg(scenario("gaussian_tau")));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ladder_writes_one_csv_row_per_volume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ladder.csv");
    let st = run(bin().arg("run").arg(scenario("gaussian_tau")).args(["--ladder", "1000,2000,4000"]).arg("--out").arg(&out));
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "V,lhs,main,secondary,ratio,case_I,case_II,case_III,case_IV");
    assert_eq!(lines.len(), 4);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let small_w = patched(dir.path(), "gaussian_one", |v| v["w"] = 7.into());
    let out = run(bin().arg("run").arg(&small_w));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must exceed |D|"));

    let imprimitive = patched(dir.path(), "gaussian_tau", |v| v["lattice"] = serde_json::json!([[3, 0], [0, 3]]));
    let out = run(bin().arg("lemma").arg("L21").arg(&imprimitive));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("G not primitive"));

    let out = run(bin().arg("run").arg(dir.path().join("missing.json")));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let tight = patched(dir.path(), "gaussian_tau", |v| v["lemma"] = serde_json::json!({"knut_cap": 1.0, "xs": [100, 1000]}));
    let out = run(bin().arg("lemma").arg("L22").arg(&tight));
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["passed"], false);
    assert!(!rep["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn lemma_suite_passes_on_reference_scenario() {
    let out = run(bin().args(["lemma", "L23"]).arg(scenario("cubic")));
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["suite"], "L23");
    assert_eq!(rep["exceptions"], 0);
}

#[test]
fn factor_reports_ideals() {
    // (1, 2) on x^2 + y^2: norm 5, root 1 * 2^-1 = 3 mod 5
    let out = run(bin().arg("factor").arg(scenario("gaussian_one")).args(["--point", "1,2"]));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["forms"][0]["norm"], "5");
    assert_eq!(v["forms"][0]["ideal"], serde_json::json!([[5, 1, 3, 1]]));

    let out = run(bin().arg("factor").arg(scenario("gaussian_one")).args(["--point", "2,4"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run(bin().arg("factor").arg(scenario("gaussian_one")).args(["--point", "two"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_scenarios_satisfy_run_hypotheses() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let sc = formsum::harness::Scenario::from_path(&path).unwrap();
        assert!(sc.check_theorem_hypotheses().is_ok(), "{}", path.display());
        n += 1;
    }
    assert_eq!(n, 5);
}
