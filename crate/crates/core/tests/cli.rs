use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fpu5::io::{manifest_path, read_snapshot, RunManifest};

fn fpu5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpu5")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const COSINE: &str = "kind = fpu5\ndelta = 0.3\nmu = 1\nL = 20\nN = 64\nt_end = 0.5\nsnapshot_interval = 0.25\n";

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn painleve_reports_complex_indices() {
    let o = fpu5(&["painleve", "--mu", "1.5", "--delta", "0.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("pole order p = 1"));
    assert!(text.contains("indicial polynomial (ascending) [8, 3, -4, 1]"));
    assert!(text.contains("index 2.500000 + 1.322876i"));
    assert!(text.contains("does not pass (complex indices)"));
}

#[test]
fn unknown_subcommand_fails() {
    let o = fpu5(&["integrate"]);
    assert!(!o.status.success());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn zero_length_run_writes_one_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "still.conf", "kind = kdv\ndelta = 0.1\nmu = 0\nL = 4\nN = 16\nt_end = 0\ninitial_condition = constant\nvalue = 1\n");
    let prefix = dir.path().join("out/still");
    let o = fpu5(&["simulate", &cfg, "--out", prefix.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = RunManifest::read(manifest_path(&prefix)).unwrap();
    assert_eq!(manifest.snapshots.len(), 1);
    assert_eq!(fs::read_dir(dir.path().join("out")).unwrap().count(), 2);
    let snap = read_snapshot(dir.path().join("out").join(&manifest.snapshots[0].file)).unwrap();
    assert_eq!(snap.t, 0.0);
    assert!(snap.field.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wave.conf", COSINE);
    let mut files = Vec::new();
    for tag in ["a", "b"] {
        let prefix = dir.path().join(tag).join("wave");
        let o = fpu5(&["simulate", &cfg, "--out", prefix.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let m = RunManifest::read(manifest_path(&prefix)).unwrap();
        assert_eq!(m.snapshots.len(), 3);
        assert!(m.mass_drift.unwrap() < 1e-10);
        let loaded = m.load_snapshots(&dir.path().join(tag)).unwrap();
        assert_eq!(loaded.len(), 3);
        files.push(m.snapshots.iter().map(|e| fs::read(dir.path().join(tag).join(&e.file)).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn config_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("missing.conf", COSINE.replace("N = 64\n", ""), "N"),
        ("dup.conf", format!("{COSINE}delta = 0.4\n"), "delta"),
        ("unknown.conf", format!("{COSINE}viscosity = 1\n"), "viscosity"),
        ("bad.conf", COSINE.replace("mu = 1", "mu = one"), "mu"),
        ("kind.conf", COSINE.replace("fpu5", "burgers"), "burgers"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(dir.path(), name, &text);
        let o = fpu5(&["simulate", &cfg]);
        assert!(!o.status.success(), "{name} was accepted");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let o = fpu5(&["simulate", dir.path().join("absent.conf").to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn short_kink_validation() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = fpu5\ndelta = 0.6\nmu = 2\nL = 40\nN = 256\nt_end = 0.5\nsnapshot_interval = 0.25\ninitial_condition = kink_pair\n";
    let cfg = write_config(dir.path(), "kink.conf", text);
    let o = fpu5(&["validate", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("kink.report.json")).unwrap()).unwrap();
    assert!(report["max_err"].as_f64().unwrap() < 1e-4);
    assert!(dir.path().join("kink.err.tsv").exists());
}

#[test]
fn recurrence_reads_a_run_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wave.conf", &COSINE.replace("t_end = 0.5", "t_end = 3"));
    assert!(fpu5(&["simulate", &cfg]).status.success());
    let manifest = dir.path().join("wave.manifest.json");
    let o = fpu5(&["recurrence", manifest.to_str().unwrap(), "--t-fix", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fpu5(&["recurrence", manifest.to_str().unwrap(), "--t-fix", "0.1"]);
    assert!(!o.status.success());
}

#[test]
fn exact_kink_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kink");
    let o = fpu5(&["exact", "kink", "--delta", "0.6", "--mu", "2", "-L", "40", "-N", "64", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = RunManifest::read(manifest_path(&out)).unwrap();
    let snap = read_snapshot(dir.path().join(&m.snapshots[0].file)).unwrap();
    assert_eq!(snap.field.values().len(), 64);
    assert!(snap.field.all_finite());
}
