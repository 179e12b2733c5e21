//! End-to-end checks of the binary: JSON shapes, exit codes, determinism,
//! and the trace CSV.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_resolvent"))
}

fn run_ok(args: &[&str]) -> Value {
    let out = bin().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn disc_exact_output() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "x2m1.json",
        r#"{"kind":"rational","coeffs":["-1/1","0/1","1/1"]}"#,
    );
    let v = run_ok(&["disc", "--in", &f]);
    assert_eq!(v["discriminant"], "4/1");
}

#[test]
fn roots_and_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "q.json",
        r#"{"kind":"rational","coeffs":["1/1","0/1","1/1"]}"#,
    );
    let v = run_ok(&["roots", "--in", &f]);
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn tschirnhaus_exact_path() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"kind":"rational","coeffs":["-2/1","0/1","1/1"]}"#,
    );
    let phi = write(
        dir.path(),
        "phi.json",
        r#"{"kind":"rational","coeffs":["0/1","0/1","1/1"]}"#,
    );
    let v = run_ok(&["tschirnhaus", "--in", &f, "--phi", &phi]);
    // x^2 mod (x^2 - 2) = 2, so the transform is (y - 2)^2
    assert_eq!(v["kind"], "rational");
    assert_eq!(
        v["coeffs"].as_array().unwrap().as_slice(),
        ["4/1", "-4/1", "1/1"]
            .map(|s| Value::String(s.into()))
            .as_slice()
    );
}

#[test]
fn bring_jerrard_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "quintic.json",
        r#"{"kind":"rational","coeffs":["1/1","1/1","0/1","0/1","0/1","1/1"]}"#,
    );
    let v = run_ok(&["bring-jerrard", "--in", &f, "--tol", "1e-9"]);
    assert!(v["residuals"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["p"][0].as_f64().unwrap(), 1.0);
    assert_eq!(v["q"][0].as_f64().unwrap(), 1.0);
    // the emitted map re-parses under the polynomial schema
    let phi = serde_json::to_string(&v["phi"]).unwrap();
    let parsed: resolvent_core::json::PolyJson = serde_json::from_str(&phi).unwrap();
    resolvent_core::json::PolyData::from_json(&parsed).unwrap();
}

#[test]
fn degenerate_quintic_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    // x^5 - 5x^3 + 5x - 2 has a repeated root
    let f = write(
        dir.path(),
        "deg.json",
        r#"{"kind":"rational","coeffs":["-2/1","5/1","0/1","-5/1","0/1","1/1"]}"#,
    );
    let out = run_raw(&["bring-jerrard", "--in", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn missing_file_is_input_error() {
    let out = run_raw(&["disc", "--in", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let out = run_raw(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "no usage text in: {err}");
}

#[test]
fn normalize_and_klein_shapes() {
    let v = run_ok(&["normalize", "--p", "0", "--q", "32"]);
    assert!((v["scale"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(v["c"][0].as_f64().unwrap().abs() < 1e-12);

    let out = run_raw(&["normalize", "--p", "1", "--q", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let v = run_ok(&["klein", "--gamma", "0"]);
    assert_eq!(v["kind"], "complex");
    let coeffs = v["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 6);
    assert_eq!(coeffs[4][0].as_f64().unwrap(), 15.0);
}

#[test]
fn chain_bound_shape() {
    let v = run_ok(&["chain-bound", "--n", "5", "--even-only"]);
    assert_eq!(v["n"], 5);
    assert_eq!(v["bound"], 2);
    let witness: Vec<&str> = v["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap())
        .collect();
    assert_eq!(witness, vec!["{1,2,3}{4}{5}", "{1,2,3,4,5}"]);
}

fn family_json(n: usize) -> String {
    // the general monic family: coefficient j is parameter j
    let m = n;
    let rows: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|j| {
            (0..=m)
                .map(|k| if k == j + 1 { (1.0, 0.0) } else { (0.0, 0.0) })
                .collect()
        })
        .collect();
    serde_json::to_string(&serde_json::json!({"n": n, "m": m, "coeffs": rows})).unwrap()
}

#[test]
fn monodromy_deterministic_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(
        dir.path(),
        "sq.json",
        r#"{"n":2,"m":1,"coeffs":[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]}"#,
    );
    let a = run_raw(&["monodromy", "--family", &fam, "--seed", "7"]);
    let b = run_raw(&["monodromy", "--family", &fam, "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["order"], 2);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["generators"][0], "(1 2)");
}

#[test]
fn inertia_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "gen3.json", &family_json(3));
    // (x^2)(x - 1) = x^3 - x^2: parameters (-1, 0, 0)
    let pt = write(dir.path(), "pt.json", "[[-1.0,0.0],[0.0,0.0],[0.0,0.0]]");
    let v = run_ok(&["inertia", "--family", &fam, "--point", &pt, "--radius", "1e-3"]);
    assert_eq!(v["order"], 2);
}

#[test]
fn phi_vanish_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(
        dir.path(),
        "s3.json",
        r#"{"n":3,"generators":["(1 2)","(1 2 3)"]}"#,
    );
    let roots = write(dir.path(), "roots.json", "[[1.0,0.0],[1.0,0.0],[2.0,0.0]]");
    let v = run_ok(&[
        "phi",
        "--group",
        &group,
        "--roots",
        &roots,
        "--partition",
        "{1,2}{3}",
        "--check-vanish",
    ]);
    assert_eq!(v["group_order"], 6);
    assert_eq!(v["vanishes"], true);
    assert_eq!(v["degenerate_subspace"], false);

    let distinct = write(dir.path(), "d.json", "[[1.0,0.0],[3.0,0.0],[2.0,0.0]]");
    let v = run_ok(&[
        "phi",
        "--group",
        &group,
        "--roots",
        &distinct,
        "--partition",
        "{1,2}{3}",
        "--check-vanish",
    ]);
    assert_eq!(v["vanishes"], false);
}

#[test]
fn bound_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "gen5.json", &family_json(5));
    let v = run_ok(&["bound", "--family", &fam, "--even-only"]);
    assert_eq!(v["q1"], 2);
    assert_eq!(v["chain_length_unconstrained"], 2);
    let chain = v["chain"].as_array().unwrap();
    assert_eq!(chain.len(), 2);
    assert_eq!(chain[0]["partition"], "{1,2,3}{4}{5}");
    assert_eq!(chain[0]["codim"], 1);
    assert_eq!(chain[1]["codim"], 2);
}

#[test]
fn track_trace_csv_swaps_roots() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(
        dir.path(),
        "sq.json",
        r#"{"n":2,"m":1,"coeffs":[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]}"#,
    );
    let lp = write(
        dir.path(),
        "loop.json",
        r#"{"basepoint":[[1.0,0.0]],"waypoints":[[[1.0,0.0]],[[0.0,1.0]],[[-1.0,0.0]],[[0.0,-1.0]],[[1.0,0.0]]]}"#,
    );
    let trace = dir.path().join("trace.csv");
    let v = run_ok(&[
        "track",
        "--family",
        &fam,
        "--loop",
        &lp,
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(v["permutation"], "(1 2)");

    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "step,param0_re,param0_im,root0_re,root0_im,root1_re,root1_im"
    );
    let rows: Vec<&str> = lines.collect();
    let first: Vec<f64> = rows[0].split(',').map(|t| t.parse().unwrap()).collect();
    let last: Vec<f64> = rows[rows.len() - 1]
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    // final row is a swap of the first: root0(end) = root1(start)
    let d_swap = ((last[3] - first[5]).powi(2) + (last[4] - first[6]).powi(2)).sqrt()
        + ((last[5] - first[3]).powi(2) + (last[6] - first[4]).powi(2)).sqrt();
    let d_id = ((last[3] - first[3]).powi(2) + (last[4] - first[4]).powi(2)).sqrt()
        + ((last[5] - first[5]).powi(2) + (last[6] - first[6]).powi(2)).sqrt();
    assert!(d_swap < 1e-6 && d_id > 1.0, "swap {d_swap:e}, id {d_id:e}");
}

#[test]
fn table_emits_cited_row_with_source() {
    let v = run_ok(&["table"]);
    let rows = v["rows"].as_array().unwrap();
    let chain: Vec<u64> = rows.iter().map(|r| r["chain_bound"].as_u64().unwrap()).collect();
    let hilbert: Vec<u64> = rows.iter().map(|r| r["hilbert"].as_u64().unwrap()).collect();
    assert_eq!(chain, vec![2, 2, 3, 3, 4]);
    assert_eq!(hilbert, vec![1, 2, 3, 4, 4]);
    assert!(v["hilbert_source"].as_str().unwrap().contains("Hilbert"));
}
