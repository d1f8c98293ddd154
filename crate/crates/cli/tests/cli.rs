//! End-to-end tests of the binary: exit codes, stdout reports, and the JSON
//! result files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_condstates"))
}

fn data(name: &str) -> PathBuf {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")).join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_of(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const Z0: &str = r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#;
const Z1: &str = r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}"#;
const MIXED: &str = r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]}"#;
const PLUS: &str = r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}"#;

#[test]
fn compat_distinct_pure_states_is_a_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", Z0);
    let b = write(dir.path(), "b.json", Z1);
    let out = bin().arg("compat").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("rank: 0"));
}

#[test]
fn compat_with_subjective_witness_writes_result() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", MIXED);
    let b = write(dir.path(), "b.json", PLUS);
    let result = dir.path().join("result.json");
    let out = bin()
        .args(["compat", "--witness", "subjective", "--output"])
        .arg(&result)
        .arg(&a)
        .arg(&b)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&result);
    assert_eq!(v["verdict"], "compatible");
    assert_eq!(v["witness"]["kind"], "subjective");
}

#[test]
fn scenario_build_digest_is_stable() {
    let run = || {
        let out = bin()
            .args(["scenario", "build"])
            .arg(data("correlated_bits.json"))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        stdout(&out)
            .lines()
            .find(|l| l.starts_with("digest:"))
            .unwrap()
            .to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn multiplicative_pool_of_uninformative_reports_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let q1 = write(dir.path(), "q1.json", MIXED);
    let q2 = write(dir.path(), "q2.json", MIXED);
    let prior = write(dir.path(), "prior.json", MIXED);
    let result = dir.path().join("pooled.json");
    let out = bin()
        .args(["pool", "--rule", "multiplicative", "--prior"])
        .arg(&prior)
        .args(["--output"])
        .arg(&result)
        .arg(&q1)
        .arg(&q2)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&result);
    let m = &v["operator"]["matrix"];
    assert_eq!(m[0][0][0], 0.5);
    assert_eq!(m[1][1][0], 0.5);
}

#[test]
fn supra_pool_uses_only_what_the_reports_carry() {
    // each report alone is uninformative here, so pooling their (trivial)
    // sufficient statistics returns the prior...
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("pooled.json");
    let out = bin()
        .args(["pool", "--rule", "supra", "--first", "X1=0", "--second", "X2=1", "--output"])
        .arg(&result)
        .arg(data("correlated_bits.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let m = &json_of(&result)["operator"]["matrix"];
    assert_eq!(m[0][0][0], 0.5);
    assert_eq!(m[1][1][0], 0.5);
    // ...while conditioning on the raw value pair pins the bit down
    let cond = dir.path().join("cond.json");
    let out = bin()
        .args(["condition", "--on", "X1=0", "--on", "X2=1", "--output"])
        .arg(&cond)
        .arg(data("correlated_bits.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let m = &json_of(&cond)["operator"]["matrix"];
    assert_eq!(m[0][0][0], 0.0);
    assert_eq!(m[1][1][0], 1.0);
}

#[test]
fn condition_on_one_report_is_uninformative() {
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("cond.json");
    let out = bin()
        .args(["condition", "--on", "X1=0", "--output"])
        .arg(&result)
        .arg(data("correlated_bits.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let m = &json_of(&result)["operator"]["matrix"];
    assert_eq!(m[0][0][0], 0.5);
    assert_eq!(m[1][1][0], 0.5);
}

#[test]
fn obstruct_writes_certificate_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = bin()
        .args(["scenario", "obstruct", "--output"])
        .arg(&cert)
        .arg(data("prepare_z.json"))
        .arg(data("measure_x.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&cert);
    assert_eq!(v["verdict"], "obstructed");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 4);
}

#[test]
fn obstruct_control_case_is_unobstructed() {
    let out = bin()
        .args(["scenario", "obstruct", "--keep2", "X2"])
        .arg(data("prepare_z.json"))
        .arg(data("noisy_readout_control.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("no obstruction"));
}

#[test]
fn check_suite_passes_and_rejects_unknown_names() {
    let out = bin()
        .args(["check", "classical_reduction", "--seed", "5", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("[PASS]"));
    let out = bin().args(["check", "not_a_suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_and_cmi_report_values() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = write(dir.path(), "mixed.json", MIXED);
    let result = dir.path().join("entropy.json");
    let out = bin()
        .args(["entropy", "--output"])
        .arg(&result)
        .arg(&mixed)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bits = json_of(&result)["entropy_bits"].as_f64().unwrap();
    assert!((bits - 1.0).abs() < 1e-9);

    let result = dir.path().join("cmi.json");
    let out = bin()
        .args(["cmi", "--a", "X1", "--b", "X2", "--c", "Y", "--output"])
        .arg(&result)
        .arg(data("correlated_bits.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&result);
    // given the parity bit, either report determines the other exactly
    assert!((v["cmi_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["conditionally_independent"], false);
}

#[test]
fn malformed_input_is_invalid_not_negative() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[0.9,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#,
    );
    let out = bin().arg("entropy").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn tolerance_env_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = write(dir.path(), "mixed.json", MIXED);
    let out = bin()
        .env("CONDSTATES_EQ_TOL", "banana")
        .arg("entropy")
        .arg(&mixed)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // a loose tolerance lets a slightly non-Hermitian state through
    let near = write(
        dir.path(),
        "near.json",
        r#"{"schema":"operator/v1","regions":[{"id":"B","dim":2,"kind":"quantum"}],"matrix":[[[0.5,0.0],[0.005,0.0]],[[0.0,0.0],[0.5,0.0]]]}"#,
    );
    let strict = bin().arg("entropy").arg(&near).output().unwrap();
    assert_eq!(strict.status.code(), Some(2));
    let loose = bin()
        .env("CONDSTATES_EQ_TOL", "0.01")
        .arg("entropy")
        .arg(&near)
        .output()
        .unwrap();
    assert_eq!(loose.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&loose.stderr));
}
