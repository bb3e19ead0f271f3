use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn homlab(args: &[&str]) -> Output {
    homlab_env(args, None)
}

fn homlab_env(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_homlab"));
    cmd.args(args).env_remove("HOMLAB_THREADS");
    if let Some(t) = threads {
        cmd.env("HOMLAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = homlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn grid(v: &Value) -> Vec<Vec<f64>> {
    v["grid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn dist_fock_coherent_has_empty_diagonal() {
    let v = ok_json(&["dist", "--a", "fock:1", "--b", "coherent:beta=3", "--bs", "1/2"]);
    let g = grid(&v);
    assert!(g.len() > 10);
    for (m, row) in g.iter().enumerate() {
        assert_eq!(row[m], 0.0);
    }
    assert_eq!(v["diagnostics"]["cnl_verdict"], Value::Bool(true));
    assert_eq!(v["meta"]["bs"]["T_num"], 1);
    assert_eq!(v["meta"]["bs"]["T_den"], 2);
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn dist_six_by_six_grid() {
    let v = ok_json(&["dist", "--a", "fock:1", "--b", "coherent:beta=1", "--bs", "1/2", "--grid-max", "5"]);
    let g = grid(&v);
    assert_eq!(g.len(), 6);
    assert!(g.iter().all(|row| row.len() == 6));
    assert_eq!(v["meta"]["grid_max"], 5);
    let mass = v["total_mass"].as_f64().unwrap();
    let deficit = v["diagnostics"]["tail_deficit"].as_f64().unwrap();
    assert!(deficit > 0.0);
    assert!((mass + deficit - 1.0).abs() < 1e-12);
    let meta = v["meta"].as_object().unwrap();
    for key in ["command", "state_a", "state_b", "bs", "grid_max", "eta_a", "eta_b", "tool_version"] {
        assert!(meta.contains_key(key), "missing {key}");
    }
}

#[test]
fn dist_vacuum() {
    let v = ok_json(&["dist", "--a", "fock:0", "--b", "fock:0", "--bs", "1/2"]);
    assert_eq!(grid(&v), vec![vec![1.0]]);
}

#[test]
fn csv_and_json_agree() {
    let base = ["dist", "--a", "smss:r=0.6", "--b", "coherent:beta=0.8+0.3i", "--bs", "theta=1.0472", "--grid-max", "12"];
    let json = ok_json(&base);
    let mut args = base.to_vec();
    args.extend(["--format", "csv"]);
    let out = homlab(&args);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows = homlab::output::parse_grid_csv(&csv).unwrap();
    let g = grid(&json);
    assert_eq!(rows.len(), 13 * 13);
    for (a, b, p) in rows {
        assert_eq!(p.to_bits(), g[a][b].to_bits());
    }
}

#[test]
fn json_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let p = path.to_str().unwrap();
    let out = homlab(&["dist", "--a", "thermal:nbar=0.7", "--b", "fock:2", "--bs", "2/5", "-o", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc: homlab::output::GridDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(homlab::output::to_json(&doc), text);
}

#[test]
fn lossy_reduces_to_ideal_at_unit_efficiency() {
    let base = ["--a", "fock:2", "--b", "fock:1", "--bs", "1/3"];
    let ideal = grid(&ok_json(&[&["dist"][..], &base].concat()));
    let lossy = ok_json(&[&["lossy"][..], &base, &["--eta", "1"]].concat());
    let g = grid(&lossy);
    assert_eq!(g.len(), ideal.len());
    for (r, s) in g.iter().zip(&ideal) {
        for (x, y) in r.iter().zip(s) {
            assert!((x - y).abs() < 1e-14);
        }
    }
    let half = ok_json(&["lossy", "--a", "fock:2", "--b", "fock:1", "--bs", "1/3", "--eta-a", "0.5", "--eta-b", "0.9"]);
    assert_eq!(half["meta"]["eta_a"], 0.5);
    assert_eq!(half["meta"]["eta_b"], 0.9);
    assert!((half["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn herald_fidelity() {
    let v = ok_json(&["herald", "--t", "2", "--eta", "0.87", "--r", "1.5"]);
    let f = v["fidelity"].as_f64().unwrap();
    assert!((f - 0.71).abs() < 0.01, "{f}");
    let posterior: f64 = v["posterior"].as_array().unwrap().iter().map(|e| e["p"].as_f64().unwrap()).sum();
    assert!(posterior <= 1.0 + 1e-12 && posterior > 0.99);
}

#[test]
fn zeros_seven_pairs() {
    let v = ok_json(&["zeros", "--n", "3", "--T", "3/4", "--max", "200"]);
    let found: BTreeSet<(u64, u64)> = v["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z["m_a"].as_u64().unwrap(), z["m_b"].as_u64().unwrap()))
        .collect();
    let seven: BTreeSet<(u64, u64)> = [(1, 0), (1, 1), (1, 11), (2, 0), (3, 1), (11, 55), (70, 162)].into();
    let trivial: BTreeSet<(u64, u64)> = [(0, 0), (0, 1), (0, 2)].into();
    let main: BTreeSet<_> = found.iter().copied().filter(|z| z.0 >= 1).collect();
    assert_eq!(main, seven);
    assert_eq!(&found - &seven, trivial);
    assert_eq!(v["count"], 10);

    let physical = ok_json(&["zeros", "--n", "3", "--T", "3/4", "--max", "200", "--physical-only"]);
    assert_eq!(physical["count"], 4);
}

#[test]
fn verify_tables() {
    let out = homlab(&["verify", "--tables", "appendix-c"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_valid"], Value::Bool(true));
    let families = v["families"].as_array().unwrap();
    assert!(families.len() >= 17);
    assert!(families.iter().all(|f| f["valid"] == Value::Bool(true)));
}

#[test]
fn verify_rejects_near_miss_family() {
    let out = homlab(&["verify", "--family", "0,1,8;1,6,8", "--n", "2", "--T", "1/2"]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_valid"], Value::Bool(false));
}

#[test]
fn parametric_independent_of_workers() {
    let args = ["parametric", "--n", "2", "--T", "1/2", "--lo", "-3", "--hi", "3"];
    let one = homlab_env(&args, Some("1"));
    let four = homlab_env(&args, Some("4"));
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(v["count"].as_u64().unwrap() >= 1);
}

#[test]
fn deterministic_output() {
    let args = ["dist", "--a", "oddcat:alpha=1.5", "--b", "pasmss:r=0.4", "--bs", "3/4", "--grid-max", "20"];
    let one = homlab_env(&args, Some("1"));
    let four = homlab_env(&args, Some("4"));
    let again = homlab_env(&args, Some("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);

    let zeros = ["zeros", "--n", "2", "--T", "1/3", "--max", "150", "--format", "csv"];
    assert_eq!(homlab_env(&zeros, Some("1")).stdout, homlab_env(&zeros, Some("3")).stdout);
}

#[test]
fn dicke_sweep() {
    let v = ok_json(&["dicke", "--j-min", "1", "--j-max", "6"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!(r["p_center"].as_f64().unwrap() < 1e-14);
    }
    let tilted = ok_json(&["dicke", "--j-min", "1", "--j-max", "1", "--theta", "1.0471975511965976"]);
    let p = tilted["rows"][0]["p_center"].as_f64().unwrap();
    assert!((p - 0.25).abs() < 1e-12);
    let half = ok_json(&["dicke", "--j-min", "1", "--j-max", "2", "--half-integers"]);
    assert_eq!(half["rows"].as_array().unwrap().len(), 3);
    assert!(half["rows"][1]["p_center"].is_null());
    assert_eq!(code(&homlab(&["dicke", "--j-min", "0", "--j-max", "2"])), 2);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "dist", "a": "fock:1", "b": "coherent:beta=1", "bs": "1/2", "grid_max": 3}"#,
    );
    let from_file = ok_json(&["--config", &cfg]);
    assert_eq!(grid(&from_file).len(), 4);
    let flags = ok_json(&["dist", "--a", "fock:1", "--b", "coherent:beta=1", "--bs", "1/2", "--grid-max", "3"]);
    assert_eq!(from_file, flags);

    let overridden = ok_json(&["--config", &cfg, "dist", "--grid-max", "5"]);
    assert_eq!(grid(&overridden).len(), 6);
    assert_eq!(overridden["meta"]["state_a"], "fock:1");

    let out_path = dir.path().join("out.csv");
    let cfg2 = write(
        dir.path(),
        "zeros.json",
        &format!(
            r#"{{"command": "zeros", "n": 3, "T": "3/4", "max": 60, "format": "csv", "output": {:?}}}"#,
            out_path.to_str().unwrap()
        ),
    );
    let out = homlab(&["--config", &cfg2]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("m_a,m_b,physical\n"));
    assert!(csv.contains("11,55,true"));
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(code(&homlab(&["dist", "--a", "laser:1", "--b", "fock:0"])), 2);
    assert_eq!(code(&homlab(&["dist", "--bogus"])), 2);
    assert_eq!(code(&homlab(&["dist", "--b", "fock:0"])), 2);
    assert_eq!(code(&homlab(&[])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"command": "dist", "colour": 3}"#);
    assert_eq!(code(&homlab(&["--config", &bad])), 2);
    let missing = dir.path().join("none.json");
    assert_ne!(code(&homlab(&["--config", missing.to_str().unwrap()])), 0);
    assert_eq!(code(&homlab_env(&["zeros", "--n", "1", "--T", "1/2"], Some("zero"))), 2);

    // domain
    let out = homlab(&["dist", "--a", "fock:1", "--b", "fock:1", "--bs", "3/2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bs"));
    assert_eq!(code(&homlab(&["herald", "--t", "1", "--eta", "0", "--r", "1"])), 3);
    assert_eq!(code(&homlab(&["dist", "--a", "coherent:beta=1", "--b", "thermal:nbar=-1"])), 3);

    // io
    let nowhere = dir.path().join("missing").join("out.json");
    let out = homlab(&["dist", "--a", "fock:1", "--b", "fock:1", "-o", nowhere.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}
