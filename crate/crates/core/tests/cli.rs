use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tactoid(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tactoid"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TACTOID_OUT")
        .output()
        .unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    serde_json::from_str(err.trim()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn energy_report_embeds_config_and_keeps_time_in_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = tactoid(&["energy", "--builtin", "cosine", "--grid", "129x33", "--plots"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("energy.json"));
    assert_eq!(r["config"]["grid"], serde_json::json!([129, 33]));
    assert!(r["result"]["total"].as_f64().unwrap() > 0.0);
    let meta = json(&dir.path().join("energy.meta.json"));
    assert!(meta["elapsed_s"].as_f64().is_some());
    assert!(!fs::read_to_string(dir.path().join("energy.json")).unwrap().contains("elapsed"));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["energy", "--builtin", "ellipse"],
        vec!["energy"],
        vec!["energy", "--builtin", "cosine", "--grid", "12x3"],
        vec!["optimize", "--builtin", "cosine", "--v=-2"],
        vec!["frobnicate"],
    ] {
        let o = tactoid(&args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert_eq!(error_record(&o)["exit_code"], 1);
    }
}

#[test]
fn degenerate_domain_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dip.csv");
    let mut text = String::from("x,y\n");
    for i in 0..65 {
        let x = -1.0 + 2.0 * i as f64 / 64.0;
        text += &format!("{x:.17e},{:.17e}\n", (1.0 - x * x) * (x.abs() + 1e-6));
    }
    fs::write(&csv, text).unwrap();
    let o = tactoid(&["energy", "--curve", csv.to_str().unwrap(), "--grid", "65x17"], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "degenerate_domain");
}

#[test]
fn divergent_energy_is_flagged_or_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let o = tactoid(&["energy", "--builtin", "semicircle", "--grid", "257x65"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("energy.json"))["result"]["diverged"], true);
    let o = tactoid(&["energy", "--builtin", "semicircle", "--grid", "257x65", "--divergence-error"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "diverged");
}

#[test]
fn environment_overrides_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_tactoid"))
        .args(["diagnose", "--builtin", "semicircle", "--grid", "129x33", "--out"])
        .arg(dir.path().join("from_flag"))
        .env("TACTOID_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("diagnose.json").exists());
    assert!(env_dir.join("vanishing_modulus.csv").exists());
    assert!(!dir.path().join("from_flag").exists());
}

#[test]
fn serial_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["optimize", "--builtin", "cosine", "--grid", "129x33", "--K", "4", "--max-iter", "6", "--serial", "--plots"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(tactoid(&args, &a).status.code(), Some(0));
    assert_eq!(tactoid(&args, &b).status.code(), Some(0));
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "optimize.json"));
    for n in names {
        if n.to_string_lossy().ends_with(".meta.json") {
            continue;
        }
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn baseline_report_records_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = tactoid(&["baseline", "--grid", "513x129"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("baseline.json"));
    assert_eq!(r["result"]["reference_value"], 12.65);
    let total = r["result"]["displayed_integral"]["total"].as_f64().unwrap();
    assert!((total - 7.3355496671).abs() < 1e-8, "{total}");
}

#[test]
fn asymptotics_writes_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = tactoid(
        &["asymptotics", "--sweep", "gamma", "--builtin", "profile_g", "--eps", "0.2,0.1,0.05,0.02", "--grid", "129x33", "--plots"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("param,dirichlet,perimeter,total,gap"));
    assert!(fs::read_to_string(dir.path().join("sweep.svg")).unwrap().starts_with("<svg"));
}
