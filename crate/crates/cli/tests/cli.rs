//! End-to-end tests of the compiled binary: exit codes, JSON shapes, file
//! artifacts, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("axirunge-cli-{}-{name}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axirunge")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

const ANNULUS: &str = r#"{"type":"annulus","center":0.0,"inner":1.0,"outer":2.0}"#;
const ALL: &str = r#"{"type":"all"}"#;
const PUNCTURED_PLANE: &str = r#"{"type":"difference","from":{"type":"all"},"minus":{"type":"closed_disc","center":[0.0,0.0],"radius":0.0}}"#;
const PLANE_MINUS_AXIS: &str = r#"{"type":"difference","from":{"type":"all"},"minus":{"type":"closed_strip","y":[0.0,0.0]}}"#;
const SIMPLE_POLE: &str = r#"{"terms":[{"scalar":{"poly":[],"poles":[{"location":[0.0,0.0],"order":1,"coeff":[1.0,0.0]}],"symmetric":true},"coeff":[1.0,0.0,0.0,0.0]}]}"#;

#[test]
fn annulus_topology_matches_shape() {
    let dir = scratch("topology-annulus");
    let spec = write(&dir, "annulus.json", ANNULUS);
    let args =
        ["topology", spec.to_str().unwrap(), "--resolution", "65", "--out-dir", dir.to_str().unwrap()];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let v = stdout_json(&out);
    assert_eq!(v["bounded_count"], 1);
    assert_eq!(v["component_count"], 2);
    assert_eq!(v["real_intervals"].as_array().unwrap().len(), 2);
    let svg = fs::read_to_string(dir.join("topology.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout, "summary must be byte stable");
}

#[test]
fn plane_without_axis_has_no_bounded_components() {
    let dir = scratch("topology-axis");
    let spec = write(&dir, "noaxis.json", PLANE_MINUS_AXIS);
    let out = run(&[
        "topology",
        spec.to_str().unwrap(),
        "--resolution",
        "65",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["bounded_count"], 0);
    assert_eq!(v["real_intervals"].as_array().unwrap().len(), 0);
}

#[test]
fn malformed_spec_exits_two_with_position() {
    let dir = scratch("malformed");
    let spec = write(&dir, "bad.json", "{\"type\":\"annulus\",\n  \"inner\": nope}");
    let out = run(&["topology", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn betti_triples_for_reference_domains() {
    let dir = scratch("betti");
    let cases = [
        (PUNCTURED_PLANE, "cstar.json", (0, 0, 1)),
        (PLANE_MINUS_AXIS, "noaxis.json", (0, 1, 0)),
        (ANNULUS, "annulus.json", (0, 0, 1)),
    ];
    for (spec, name, (b1, b2, b3)) in cases {
        let path = write(&dir, name, spec);
        let out = run(&["betti", path.to_str().unwrap(), "--resolution", "65"]);
        assert_eq!(code(&out), 0);
        let v = stdout_json(&out);
        assert_eq!((v["b1"].as_u64(), v["b2"].as_u64(), v["b3"].as_u64()),
            (Some(b1), Some(b2), Some(b3)), "{name}");
        // audit identities: b1 = (planar_b1 - r) / 2, b3 = (planar_b1 + r) / 2
        let pb1 = v["inputs"]["planar_b1"].as_u64().unwrap();
        let r = v["inputs"]["reduced_h0_rank"].as_u64().unwrap();
        assert_eq!(v["b1"].as_u64().unwrap(), (pb1 - r) / 2, "{name}");
        assert_eq!(v["b3"].as_u64().unwrap(), (pb1 + r) / 2, "{name}");
        assert_eq!(v["inputs"]["off_axis_components"], v["b2"], "{name}");
    }
}

#[test]
fn runge_pair_accepts_and_reports() {
    let dir = scratch("runge-yes");
    let d = write(
        &dir,
        "d.json",
        r#"{"type":"difference","from":{"type":"all"},"minus":{"type":"closed_disc","center":[0.0,0.0],"radius":1.0}}"#,
    );
    let d1 = write(
        &dir,
        "d1.json",
        r#"{"type":"union","parts":[{"type":"difference","from":{"type":"all"},"minus":{"type":"closed_disc","center":[0.0,0.0],"radius":1.0}},{"type":"strip","y":[-0.5,0.5]}]}"#,
    );
    let out = run(&["runge", d.to_str().unwrap(), d1.to_str().unwrap(), "--resolution", "65"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["runge"], true);
    assert_eq!(v["missing_components"].as_array().unwrap().len(), 0);
}

#[test]
fn punctured_plane_is_refused_with_witness() {
    let dir = scratch("runge-no");
    let d = write(&dir, "d.json", PUNCTURED_PLANE);
    let d1 = write(&dir, "d1.json", ALL);
    let out = run(&["runge", d.to_str().unwrap(), d1.to_str().unwrap(), "--resolution", "65"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["runge"], false);
    assert_eq!(v["h3_witness"], serde_json::json!([1]));
    assert_eq!(v["missing_components"].as_array().unwrap().len(), 1);
}

#[test]
fn identical_specs_are_a_runge_pair() {
    let dir = scratch("runge-same");
    let d = write(&dir, "d.json", ANNULUS);
    let out = run(&["runge", d.to_str().unwrap(), d.to_str().unwrap(), "--resolution", "65"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["runge"], true);
}

#[test]
fn unnested_pair_exits_three() {
    let dir = scratch("runge-unnested");
    let d = write(&dir, "d.json", ALL);
    let d1 = write(&dir, "d1.json", ANNULUS);
    let out = run(&["runge", d.to_str().unwrap(), d1.to_str().unwrap(), "--resolution", "65"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not contained"));
}

#[test]
fn verify_small_corpus_passes_deterministically() {
    let dir = scratch("verify");
    let args = [
        "verify",
        "--count", "4",
        "--resolutions", "65",
        "--domains", "2",
        "--samples", "200",
        "--out-dir", dir.to_str().unwrap(),
    ];
    let first = run(&args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let v = stdout_json(&first);
    assert_eq!(v["ok"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
    let csv1 = fs::read(dir.join("verify_records.csv")).unwrap();
    assert!(csv1.starts_with(b"pair,resolution,hash,"));

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "summary must be byte stable");
    let csv2 = fs::read(dir.join("verify_records.csv")).unwrap();
    assert_eq!(csv1, csv2, "records must be byte stable");
}

#[test]
fn injected_bug_makes_verify_fail() {
    let dir = scratch("verify-bug");
    let out = run(&[
        "verify",
        "--count", "2",
        "--resolutions", "65",
        "--domains", "1",
        "--samples", "40",
        "--inject-bug",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["ok"], false);
    let equivalence = &v["suites"][0];
    assert_eq!(equivalence["name"], "equivalence");
    assert_eq!(equivalence["failures"].as_array().unwrap().len(), 1);
}

fn approx_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let d = write(dir, "d.json", ANNULUS);
    let d1 = write(
        dir,
        "d1.json",
        r#"{"type":"difference","from":{"type":"disc","center":[0.0,0.0],"radius":2.3},"minus":{"type":"closed_disc","center":[0.5,0.0],"radius":0.15}}"#,
    );
    let stem = write(dir, "stem.json", SIMPLE_POLE);
    let k = write(dir, "k.json", r#"{"type":"annulus","center":0.0,"inner":1.2,"outer":1.8}"#);
    (d, d1, stem, k)
}

#[test]
fn approx_pushes_pole_and_meets_target() {
    let dir = scratch("approx");
    let (d, d1, stem, k) = approx_fixture(&dir);
    let out = run(&[
        "approx",
        d.to_str().unwrap(),
        d1.to_str().unwrap(),
        stem.to_str().unwrap(),
        k.to_str().unwrap(),
        "1e-4",
        "--resolution", "65",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["runge"], true);
    assert!(v["result"]["achieved_complex"].as_f64().unwrap() <= 1e-4);
    assert!(v["result"]["achieved_quaternionic"].as_f64().unwrap() <= 2f64.sqrt() * 1e-4);
    assert!(v["result"]["total_degree"].as_u64().unwrap() <= 200);
    let path = &v["plans"][0]["paths"][0];
    assert!(path["disposition"].as_str().unwrap().starts_with("cell("));
    assert!(path["max_ratio"].as_f64().unwrap() <= 0.5 + 1e-9);
    assert!(v["approximant"]["terms"].as_array().unwrap().len() >= 1);

    let curve = fs::read_to_string(dir.join("error_curve.csv")).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "epsilon,total_degree,achieved_complex,achieved_quaternionic");
    assert_eq!(lines.len(), 5, "header plus decades 1e-1..1e-4:\n{curve}");
    assert!(lines[1].starts_with("1e-1,"));
    assert!(lines[4].starts_with("1e-4,"));
}

#[test]
fn approx_refuses_non_runge_with_obstruction() {
    let dir = scratch("approx-refused");
    let d = write(
        &dir,
        "d.json",
        r#"{"type":"difference","from":{"type":"disc","center":[0.0,0.0],"radius":2.0},"minus":{"type":"closed_disc","center":[0.0,0.0],"radius":0.2}}"#,
    );
    let d1 = write(&dir, "d1.json", ALL);
    let stem = write(&dir, "stem.json", SIMPLE_POLE);
    let k = write(&dir, "k.json", r#"{"type":"annulus","center":0.0,"inner":0.8,"outer":1.5}"#);
    let out = run(&[
        "approx",
        d.to_str().unwrap(),
        d1.to_str().unwrap(),
        stem.to_str().unwrap(),
        k.to_str().unwrap(),
        "1e-4",
        "--resolution", "65",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    let v = stdout_json(&out);
    assert_eq!(v["runge"], false);
    let ob = &v["obstruction"][0];
    assert_eq!(ob["poles_enclosed"], 1);
    let residue = ob["residue_bound"].as_f64().unwrap();
    let quadrature = ob["quadrature_bound"].as_f64().unwrap();
    assert!(residue >= 0.99, "residue bound {residue}");
    assert!((quadrature - residue).abs() <= 1e-6 * residue, "{quadrature} vs {residue}");
}

#[test]
fn polynomial_stem_passes_through_unchanged() {
    let dir = scratch("approx-poly");
    let (d, d1, _, k) = approx_fixture(&dir);
    let stem = write(
        &dir,
        "poly.json",
        r#"{"terms":[{"scalar":{"poly":[[1.0,0.0],[2.0,0.0]],"poles":[],"symmetric":true},"coeff":[1.0,0.0,0.0,0.0]}]}"#,
    );
    let out = run(&[
        "approx",
        d.to_str().unwrap(),
        d1.to_str().unwrap(),
        stem.to_str().unwrap(),
        k.to_str().unwrap(),
        "1e-4",
        "--resolution", "65",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["achieved_complex"].as_f64().unwrap(), 0.0);
    assert_eq!(v["plans"][0]["paths"].as_array().unwrap().len(), 0);
}

#[test]
fn asymmetric_stem_exits_two() {
    let dir = scratch("approx-asym");
    let (d, d1, _, k) = approx_fixture(&dir);
    let stem = write(
        &dir,
        "asym.json",
        r#"{"terms":[{"scalar":{"poly":[],"poles":[{"location":[0.0,1.0],"order":1,"coeff":[1.0,0.0]}],"symmetric":true},"coeff":[1.0,0.0,0.0,0.0]}]}"#,
    );
    let out = run(&[
        "approx",
        d.to_str().unwrap(),
        d1.to_str().unwrap(),
        stem.to_str().unwrap(),
        k.to_str().unwrap(),
        "1e-4",
        "--resolution", "65",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetr"));
}
