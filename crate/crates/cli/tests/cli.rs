use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_besov-lab"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(manifest: &str, out: &Path, extra: &[&str]) -> Output {
    bin()
        .args(["run", "--manifest"])
        .arg(data(manifest))
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run("all_kinds.toml", a.path(), &[]);
    let rb = run("all_kinds.toml", b.path(), &[]);
    assert!(ra.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    assert_eq!(ra.stdout, rb.stdout);
    let fa = files(a.path());
    assert_eq!(fa.len(), 12);
    assert_eq!(fa, files(b.path()));
}

#[test]
fn seed_override_changes_random_reports_only() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run("all_kinds.toml", a.path(), &[]).status.success());
    assert!(run("all_kinds.toml", b.path(), &["--seed", "99"]).status.success());
    let read = |d: &Path, f: &str| fs::read(d.join(f)).unwrap();
    assert_ne!(read(a.path(), "kacnelson_scalar.csv"), read(b.path(), "kacnelson_scalar.csv"));
    assert_eq!(read(a.path(), "moments_unit.csv"), read(b.path(), "moments_unit.csv"));
}

#[test]
fn moments_report_matches_closed_form() {
    let d = tempfile::tempdir().unwrap();
    assert!(run("all_kinds.toml", d.path(), &[]).status.success());
    let mut r = csv::Reader::from_path(d.path().join("moments_unit.csv")).unwrap();
    let vals: Vec<f64> = r.records().map(|x| x.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(vals.len(), 5);
    for (n, v) in vals.iter().enumerate() {
        assert!((v * (n as f64 + 1.0) - 1.0).abs() < 1e-14);
    }
    let pick: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("pick_binomial_2.json")).unwrap()).unwrap();
    assert_eq!(pick["report"]["verdict"], "NEGATIVE");
    assert_eq!(pick["report"]["raw"]["first_negative"], 2);
}

#[test]
fn failing_manifest_exits_nonzero() {
    let d = tempfile::tempdir().unwrap();
    let o = run("failing.toml", d.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("pick-binomial-1.5"), "{stderr}");
    let summary = fs::read_to_string(d.path().join("summary.csv")).unwrap();
    assert!(summary.contains("moments,moments,moments.csv,PASS"));
    assert!(summary.contains("pick-binomial-1.5,pick,pick.json,FAIL"));
}

#[test]
fn invalid_field_is_named() {
    let d = tempfile::tempdir().unwrap();
    let o = run("bad_field.toml", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tasks[0].kacnelson.block"));
    let o = bin().args(["validate", "--manifest"]).arg(data("bad_field.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["validate", "--manifest"]).arg(data("all_kinds.toml")).output().unwrap();
    assert!(o.status.success());
}

#[test]
fn catalog_lists_classification() {
    let o = bin().arg("list-weights").output().unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let kinds: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()).collect();
    for k in ["power", "power_log", "exp_cusp", "tabulated"] {
        assert!(kinds.contains(&k));
    }
    let cusp = v.as_array().unwrap().iter().find(|e| e["kind"] == "exp_cusp").unwrap();
    assert_eq!(cusp["classification"]["weakly_normal"], "not weakly normal");
    let power = v.as_array().unwrap().iter().find(|e| e["kind"] == "power").unwrap();
    assert_eq!(power["classification"]["weakly_normal"], "weakly normal of order alpha");
}
