//! Black-box tests of the `ttc-sim` binary.

use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ttc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttc-sim")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn ok_json(out: &Path, args: &[&str]) -> Value {
    let o = ttc(out, args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let stdout: Value = serde_json::from_slice(&o.stdout).expect("stdout is JSON");
    let file: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(stdout, file);
    stdout
}

fn f(v: &Value, key: &str) -> f64 {
    v.pointer(key).and_then(Value::as_f64).unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn budget_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(dir.path(), &["budget"]);
    assert_eq!(v["images_per_run"], 216);
    assert_eq!(f(&v, "/raw_gb"), 1.274);
    assert_eq!(f(&v, "/coded_gb"), 1.671);
    assert_eq!(f(&v, "/days_to_downlink"), 157.7);
    assert_eq!(v["raw_mission_bytes"], 1_274_019_840u64);
}

#[test]
fn budget_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let one = ok_json(dir.path(), &["budget", "--runs", "1"]);
    assert_eq!(f(&one, "/raw_gb"), 0.4247);
    let base = ok_json(dir.path(), &["budget"]);
    let raw = ok_json(dir.path(), &["budget", "--compression", "1"]);
    assert_eq!(raw["raw_mission_bytes"].as_u64().unwrap(), 2 * base["raw_mission_bytes"].as_u64().unwrap());
    // key set does not depend on the inputs
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert_eq!(keys(&one), keys(&raw));
}

#[test]
fn link_terms() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(dir.path(), &["link", "--distance-km", "500", "--freq-mhz", "2430"]);
    assert!((f(&v, "/breakdown/fspl_db") - 154.14).abs() < 0.005);
    assert_eq!(f(&v, "/breakdown/tx_gain_db"), 4.13);

    let pol = ok_json(
        dir.path(),
        &["link", "--distance-km", "1000", "--tx-preset", "turnstile-ideal", "--rx-preset", "dipole-linear"],
    );
    assert!((f(&pol, "/breakdown/polarization_loss_db") - 3.01).abs() < 0.01);

    let off = ok_json(dir.path(), &["link", "--distance-km", "500", "--tx-theta", "52"]);
    let delta = f(&off, "/breakdown/margin_db") - f(&v, "/breakdown/margin_db");
    assert!((delta + 3.0).abs() < 1e-6, "{delta}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ttc(dir.path(), &["link"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("distance_km"));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[mission]\ncadence_minutes = 19\n").unwrap();
    let o = ttc(dir.path(), &["--config", cfg.to_str().unwrap(), "budget"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cadence_minutes"));

    let o = ttc(dir.path(), &["montecarlo", "--sweep", "10:0:5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ttc(dir.path(), &["deploy", "--fault", "resistor-open:7:0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ttc(dir.path(), &["budget", "--compression", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ttc(dir.path(), &["--config", "/nonexistent/ttc.toml", "budget"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_error_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = ttc(&blocker.join("sub"), &["deploy"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn paper_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ttc(dir.path(), &["paper-check"]);
    assert_eq!(o.status.code(), Some(0));

    let cfg = dir.path().join("perturbed.toml");
    fs::write(&cfg, "[mission]\ncadence_min = 19.0\n").unwrap();
    let o = ttc(dir.path(), &["--config", cfg.to_str().unwrap(), "paper-check"]);
    assert_eq!(o.status.code(), Some(1));
    let table = String::from_utf8_lossy(&o.stderr);
    let images = table.lines().find(|l| l.contains("images_per_run")).unwrap();
    assert!(images.starts_with("FAIL"), "{images}");
    assert!(table.lines().any(|l| l.starts_with("PASS") && l.contains("patch_gain_52deg_db")));
}

#[test]
fn deploy_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let cold = ok_json(dir.path(), &["deploy", "--ambient", "-15"]);
    assert_eq!(cold["summary"]["doors_open"], 4);

    let frozen = ok_json(dir.path(), &["deploy", "--ambient", "-25.5"]);
    assert_eq!(frozen["summary"]["doors_open"], 0);
    assert!(!frozen["notes"].as_array().unwrap().is_empty());

    let fault = ok_json(dir.path(), &["deploy", "--ambient", "20", "--fault", "resistor-open:0:0"]);
    assert_eq!(fault["summary"]["attempts"], 2);
    assert_eq!(fault["summary"]["doors_open"], 4);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("time_s,phase,event,knife_set,"));
}

#[test]
fn deploy_trace_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "deploy", "--ambient", "-22", "--jitter", "0.05", "--tc", "confirm@3000"];
    ok_json(a.path(), &args);
    ok_json(b.path(), &args);
    assert_eq!(fs::read(a.path().join("trace.csv")).unwrap(), fs::read(b.path().join("trace.csv")).unwrap());
    assert_eq!(fs::read(a.path().join("report.json")).unwrap(), fs::read(b.path().join("report.json")).unwrap());
}

#[test]
fn montecarlo_sweep_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "3", "montecarlo", "--runs", "50", "--sweep=-30:0:5"];
    let v = ok_json(a.path(), &args);
    ok_json(b.path(), &args);
    assert_eq!(fs::read(a.path().join("report.json")).unwrap(), fs::read(b.path().join("report.json")).unwrap());
    assert_eq!(v["reports"].as_array().unwrap().len(), 7);

    // no jitter: a step from 0 to 1 between -25.5 and -15 °C
    let step = ok_json(a.path(), &["montecarlo", "--runs", "3", "--jitter", "0", "--sweep=-30:-10:5"]);
    let p: Vec<f64> = step["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["full_deployment_probability"].as_f64().unwrap())
        .collect();
    assert_eq!(p, vec![0.0, 0.0, 0.0, 1.0, 1.0]);
}

#[test]
fn single_run_montecarlo_matches_deploy() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2", "3", "4"] {
        let d = ok_json(dir.path(), &["--seed", seed, "deploy", "--ambient", "-24", "--jitter", "0.05"]);
        let m =
            ok_json(dir.path(), &["--seed", seed, "montecarlo", "--runs", "1", "--jitter", "0.05", "--ambient", "-24"]);
        let doors = d["summary"]["doors_open"].as_u64().unwrap() as usize;
        let hist = m["reports"][0]["door_open_histogram"].as_array().unwrap();
        assert_eq!(hist[doors], 1, "seed {seed}");
        assert_eq!(m["reports"][0]["mean_attempts"].as_f64().unwrap(), d["summary"]["attempts"].as_f64().unwrap());
    }
}

#[test]
fn shipped_config_is_valid() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/mission.toml");
    let dir = tempfile::tempdir().unwrap();
    let c = cfg.to_str().unwrap();
    let v = ok_json(dir.path(), &["--config", c, "budget"]);
    assert_eq!(v["images_per_run"], 216);
    ok_json(dir.path(), &["--config", c, "link"]);
    let d = ok_json(dir.path(), &["--config", c, "deploy"]);
    assert_eq!(d["summary"]["final_phase"], "deployed_confirmed");
    assert_eq!(ttc(dir.path(), &["--config", c, "paper-check"]).status.code(), Some(0));
}
