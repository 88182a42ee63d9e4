use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gausskin"));
    cmd.env_remove("GAUSSKIN_TOL");
    cmd
}

fn preset_file(dir: &Path, name: &str) -> PathBuf {
    let out = bin().args(["presets", "dump", name]).output().unwrap();
    assert!(out.status.success());
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, out.stdout).unwrap();
    path
}

fn simulate(path: &Path, out_dir: &Path, steps: &str) -> Output {
    bin()
        .arg("simulate")
        .arg(path)
        .args(["--steps", steps, "--out-dir"])
        .arg(out_dir)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const COUPLED_B: &str = r#"{
  "name": "drifting",
  "constants": {"hbar": 1.0, "kb": 1.0},
  "hamiltonian": {"n": 1, "a": [[1.0]], "b": [[0.2]], "c": [[1.0]]},
  "initial": {"mean_q": [0.5], "mean_p": [0.0]},
  "t_end": 0.5,
  "steps": 50,
  "outputs": [{"series": "mean", "path": "drifting_mean.csv"}]
}"#;

#[test]
fn presets_list_and_dump() {
    let out = bin().args(["presets", "list"]).output().unwrap();
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    for name in ["harmonic_oscillator", "free_particle", "parametric_oscillator", "coupled_2d"] {
        assert!(names.lines().any(|l| l == name));
    }
    let out = bin().args(["presets", "dump", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn harmonic_oscillator_run_writes_series() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "harmonic_oscillator");
    let out = simulate(&path, dir.path(), "200");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("harmonic_oscillator_thermo.csv"));
    assert_eq!(header[0], "t");
    assert_eq!(header[1], "joint_entropy");
    assert_eq!(rows.len(), 201);
    for row in &rows {
        assert!((row[1] - 2.144_729_885_849_4).abs() < 1e-9);
    }
    let (header, rows) = read_csv(&dir.path().join("harmonic_oscillator_mean.csv"));
    assert_eq!(header, ["t", "q1", "p1"]);
    let last = rows.last().unwrap();
    assert!((last[0] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((last[1] - 1.0).abs() < 1e-3);
    let (header, _) = read_csv(&dir.path().join("harmonic_oscillator_wigner.csv"));
    assert_eq!(header, ["t", "W_11", "W_12", "W_21", "W_22"]);
}

#[test]
fn free_particle_lens_term() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "free_particle");
    let out = simulate(&path, dir.path(), "100");
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("free_particle_iwasawa.csv"));
    assert_eq!(header, ["t", "s2_11", "g_11", "alpha"]);
    for row in rows {
        let t = row[0];
        assert!((row[1] - (1.0 + t * t)).abs() < 1e-12);
        assert!((row[2] + t / (1.0 + t * t)).abs() < 1e-12);
    }
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "coupled_2d");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::create_dir_all(&a).unwrap();
    std::fs::create_dir_all(&b).unwrap();
    assert!(simulate(&path, &a, "300").status.success());
    assert!(simulate(&path, &b, "300").status.success());
    for series in ["mean", "iwasawa", "thermo", "wigner"] {
        let file = format!("coupled_2d_{series}.csv");
        let x = std::fs::read(a.join(&file)).unwrap();
        let y = std::fs::read(b.join(&file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    let (header, _) = read_csv(&a.join("coupled_2d_iwasawa.csv"));
    assert_eq!(header.len(), 1 + 4 + 4 + 1);
}

#[test]
fn verify_passes_and_skips_the_pde_when_b_is_nonzero() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "free_particle");
    let out = bin().arg("verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let path = dir.path().join("drifting.json");
    std::fs::write(&path, COUPLED_B).unwrap();
    let out = bin().arg("verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("skipped (b≠0)"), "{text}");
}

#[test]
fn tight_tolerance_fails_the_check() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "coupled_2d");
    let out = bin()
        .env("GAUSSKIN_TOL", "1e-18")
        .arg("simulate")
        .arg(&path)
        .args(["--steps", "100", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let path = preset_file(dir.path(), "free_particle");
    let bad_tol = bin().env("GAUSSKIN_TOL", "abc").arg("verify").arg(&path).output().unwrap();
    assert_eq!(bad_tol.status.code(), Some(2));
    let missing = bin().args(["simulate", "/nonexistent/scenario.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let no_args = bin().output().unwrap();
    assert_eq!(no_args.status.code(), Some(2));
    let zero = simulate(&path, dir.path(), "0");
    assert_eq!(zero.status.code(), Some(2));

    let asym = r#"{
  "name": "asym",
  "constants": {"hbar": 1.0, "kb": 1.0},
  "hamiltonian": {"n": 2, "a": [[1.0, 0.5], [0.0, 1.0]], "b": [[0.0, 0.0], [0.0, 0.0]], "c": [[1.0, 0.0], [0.0, 1.0]]},
  "initial": {"mean_q": [0.5, 0.0], "mean_p": [0.0, 0.0]},
  "t_end": 1.0,
  "steps": 10,
  "outputs": []
}"#;
    let path = dir.path().join("asym.json");
    std::fs::write(&path, asym).unwrap();
    let out = bin().arg("verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{asym}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("a:"));
}
