use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wedge3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wedge3"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, out: &Output) -> PathBuf {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn rotated_w_is_equivalent_to_w() {
    let dir = TempDir::new().unwrap();
    let w = write(dir.path(), "w.json", &wedge3(&["gen", "--named", "w"]));
    let rot = write(
        dir.path(),
        "w_rotated.json",
        &wedge3(&["gen", "--in", p(&w), "--seed", "5"]),
    );
    let out = wedge3(&["equiv", "--a", p(&w), "--b", p(&rot)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["equivalent"], Value::Bool(true));

    let ghz = write(dir.path(), "ghz.json", &wedge3(&["gen", "--named", "ghz"]));
    let out = wedge3(&["equiv", "--a", p(&w), "--b", p(&ghz)]);
    assert_eq!(json(&out)["equivalent"], Value::Bool(false));
}

#[test]
fn e246_is_separable() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("e246.json");
    std::fs::write(
        &path,
        r#"{"kind":"fermion20","amplitudes":[{"index":[2,4,6],"re":1.0,"im":0.0}]}"#,
    )
    .unwrap();
    let out = wedge3(&["classify", "--in", p(&path)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["type"], "separable");
}

#[test]
fn identity_suite_passes() {
    let out = wedge3(&[
        "verify",
        "--suite",
        "identities",
        "--count",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], Value::Bool(true));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = wedge3(&["invariants", "--in", p(&dir.path().join("missing.json"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(json(&missing)["error"], "Io");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"w6","a":0.1}"#).unwrap();
    let out = wedge3(&["invariants", "--in", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "Parse");

    let zero = dir.path().join("zero.json");
    std::fs::write(
        &zero,
        r#"{"kind":"w6","a":0,"b":0,"c":0,"d":0,"x":0,"y":0}"#,
    )
    .unwrap();
    let out = wedge3(&["canonicalize", "--in", p(&zero)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "ZeroState");

    let out = wedge3(&[
        "--precision",
        "extended:10",
        "verify",
        "--suite",
        "identities",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn region_sample_csv_columns() {
    let out = wedge3(&[
        "region", "sample", "--count", "5", "--format", "csv", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,b,c,d,x,y,interior_flag,case_tag"));
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 5);
}

#[test]
fn canonical_point_lies_in_delta() {
    let dir = TempDir::new().unwrap();
    let state = write(dir.path(), "s.json", &wedge3(&["gen", "--seed", "9"]));
    let out = wedge3(&["canonicalize", "--in", p(&state)]);
    let v = json(&out);
    let point = &v["point"];
    let w6 = serde_json::json!({
        "kind": "w6", "a": point["a"], "b": point["b"], "c": point["c"],
        "d": point["d"], "x": point["x"], "y": point["y"],
    });
    let path = dir.path().join("p.json");
    std::fs::write(&path, w6.to_string()).unwrap();
    let check = json(&wedge3(&["region", "check", "--in", p(&path)]));
    assert_eq!(check["in_delta"], Value::Bool(true));
}

#[test]
fn output_is_reproducible_and_ordered() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<PathBuf> = (0..4)
        .map(|k| {
            write(
                dir.path(),
                &format!("s{k}.json"),
                &wedge3(&["gen", "--seed", &k.to_string()]),
            )
        })
        .collect();
    let mut args = vec!["gme"];
    for path in &paths {
        args.extend(["--in", p(path)]);
    }
    let serial = wedge3(&args);
    let again = wedge3(&args);
    args.extend(["--jobs", "4"]);
    let parallel = wedge3(&args);
    assert!(serial.status.success());
    assert_eq!(serial.stdout, again.stdout);
    assert_eq!(serial.stdout, parallel.stdout);

    let gen_a = wedge3(&["gen", "--kind", "qubit8", "--seed", "21", "--count", "3"]);
    let gen_b = wedge3(&["gen", "--kind", "qubit8", "--seed", "21", "--count", "3"]);
    assert_eq!(gen_a.stdout, gen_b.stdout);
}

#[test]
fn qubit_witness_reaches_canonical_form() {
    let dir = TempDir::new().unwrap();
    let state = write(
        dir.path(),
        "q.json",
        &wedge3(&["gen", "--kind", "qubit8", "--seed", "4"]),
    );
    let out = wedge3(&["canonicalize", "--in", p(&state), "--witness"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    assert!(v["witness"]["residual"].as_f64().unwrap() < 1e-6, "{v}");
}
