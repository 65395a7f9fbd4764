use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nahm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nahm")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let out = nahm(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn expand_round_sphere() {
    let r = json_of(&["expand", "--preset", "s3-hyperbolic", "--order", "6", "--sigma", "zero"]);
    assert_eq!(r["schema"], "1");
    let c = &r["coefficients"];
    assert!(close(&matrix(&c["alpha[1][1]"]), &[0.0; 9], 0.0));
    assert!(close(&matrix(&c["alpha[1][0]"]), &[0.25, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25], 1e-15));
    assert!(c.get("alpha[6][3]").is_some());
    assert!(c.get("alpha[6][4]").is_none());
    assert!(r["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn obstruction_flat_torus() {
    let r = json_of(&["obstruction", "--preset", "t3-h2", "--h2", "1,-1,0"]);
    let expected = [-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    assert!(close(&matrix(&r["recursive"]), &expected, 1e-12));
    assert!(close(&matrix(&r["weyl"]), &expected, 1e-12));
    assert!(r["maxDiff"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn check_pe_round_sphere() {
    let out = nahm(&["check-pe", "--preset", "s3-hyperbolic", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&["check-pe", "--preset", "s3-hyperbolic", "--order", "3"]);
    assert_eq!(r["checks"], serde_json::json!([true, true, true]));
    let r = json_of(&["check-pe", "--preset", "t3-h2", "--h2", "1,-1,0"]);
    assert_eq!(r["checks"], serde_json::json!([true, false, true]));
}

#[test]
fn energy_and_cs() {
    let r = json_of(&["energy", "--preset", "s3-hyperbolic"]);
    assert!((r["laurent"]["-3"].as_f64().unwrap().abs() - 0.25).abs() <= 1e-6);
    assert!((r["laurent"]["-1"].as_f64().unwrap().abs() - 0.5625).abs() <= 1e-5);
    assert!(r["stokesResidual"].as_f64().unwrap() <= 1e-6);
    let r = json_of(&["cs", "--preset", "s3-hyperbolic"]);
    assert!((r["csValue"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
}

#[test]
fn evolve_report() {
    let r = json_of(&["evolve", "--preset", "s3-hyperbolic", "--x-from", "0.05", "--x-to", "0.2"]);
    assert!(r["maxSelfDualityResidual"].as_f64().unwrap() <= 1e-8);
    let rows = r["trajectory"].as_array().unwrap();
    assert_eq!(rows.last().unwrap()["x"].as_f64().unwrap(), 0.2);
}

#[test]
fn presets_listed() {
    let out = nahm(&["presets"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["t3-flat", "s3-hyperbolic", "t3-h2", "berger:<lambda>"] {
        assert!(text.contains(name));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nahm(&["expand", "--preset", "nowhere"]).status.code(), Some(1));
    assert_eq!(nahm(&["expand", "--preset", "t3-flat", "--sigma", "1,0,0,0,0,0,0,0,0"]).status.code(), Some(1));
    assert_eq!(nahm(&["expand", "--preset", "t3-flat", "--order", "1"]).status.code(), Some(1));
    assert_eq!(nahm(&["frobnicate"]).status.code(), Some(1));
    // the Berger jet degenerates at x = 1/sqrt(8)
    let out = nahm(&["evolve", "--preset", "berger:2", "--x-from", "0.1", "--x-to", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file() {
    let path = scratch("run.toml");
    let report = scratch("run.json");
    std::fs::write(
        &path,
        format!(
            "order = 3\n[geometry]\npreset = \"t3-h2\"\nh2 = [1, -1, 0]\n[output]\njson = \"{}\"\n",
            report.display()
        ),
    )
    .unwrap();
    let out = nahm(&["expand", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["order"], 3);
    assert!(close(
        &matrix(&r["obstruction"]),
        &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        1e-12
    ));

    std::fs::write(&path, "order = 3\n[geometry]\npreset = \"t3-flat\"\ncolour = 2\n").unwrap();
    let out = nahm(&["expand", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("colour"), "{err}");
}

#[test]
fn inline_geometry_config() {
    let path = scratch("nil.toml");
    std::fs::write(&path, "[geometry]\ne12 = [0, 0, 1]\ne23 = [0, 0, 0]\ne31 = [0, 0, 0]\n").unwrap();
    let r = json_of(&["obstruction", "--config", path.to_str().unwrap()]);
    assert_eq!(r["geometry"], "inline");
    assert!(r["maxDiff"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn json_round_trip_is_byte_identical() {
    for args in [
        vec!["expand", "--preset", "berger:2", "--order", "5", "--sigma", "0.1,0.2,0,0.2,-0.3,0.05,0,0.05,0.2"],
        vec!["obstruction", "--preset", "t3-h2", "--h2", "0.3,-0.7,0.1"],
        vec!["energy", "--preset", "s3-hyperbolic"],
    ] {
        let mut all = args.clone();
        all.extend(["--json", "-"]);
        let out = nahm(&all);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&parsed).unwrap();
        again.push('\n');
        assert_eq!(again, text);
    }
}
