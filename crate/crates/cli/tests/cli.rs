use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rydpump::PhysicalSystem;

fn rydpump(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydpump")).args(args).env_remove("RYD_WORKERS").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_column(path: &Path, column: &str) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

const SMALL: &str = r#"
[lattice]
n_sites = 3
xi = 1.2
a0 = 0.3

[drive]
omega = 50.0

[dynamics]
t_final = 4.0
n_samples = 9
n_traj = 24
seed = 5
"#;

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn repeat_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL);
    for scenario in ["evolve", "trajectory"] {
        let runs: Vec<_> = ["a", "b"]
            .iter()
            .map(|tag| {
                let out = tmp.path().join(format!("{scenario}_{tag}"));
                let o = rydpump(&[scenario, "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "1"]);
                assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
                data_files(&out)
            })
            .collect();
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{scenario}");
    }
}

#[test]
fn worker_count_does_not_change_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL);
    let mut cols = Vec::new();
    for w in ["1", "3"] {
        let out = tmp.path().join(format!("w{w}"));
        let o = rydpump(&["trajectory", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", w]);
        assert!(o.status.success());
        cols.push(csv_column(&out.join("trajectories.csv"), "fidelity"));
    }
    for (a, b) in cols[0].iter().zip(&cols[1]) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn manifest_records_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("m");
    assert!(rydpump(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "11", "--workers", "2"]).status.success());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["scenario"], "evolve");
    assert_eq!(m["seed"], 11);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(m["files"].as_array().unwrap().iter().any(|f| f["name"] == "master.csv"));
}

#[test]
fn missing_omega_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[lattice]\nn_sites = 4\nxi = 1.2\na0 = 0.26\n");
    let o = rydpump(&["steady", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "config");
    assert!(err["fields"].as_array().unwrap().iter().any(|f| f["path"] == "drive.omega"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn impossible_geometry_is_reported_by_the_lattice() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "scenario = \"steady\"\n[lattice]\nn_sites = 4\nxi = 2.5\na0 = 0.26\n[drive]\nomega = 1000.0\n");
    let o = rydpump(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["fields"][0]["path"], "lattice");
    assert!(err["fields"][0]["message"].as_str().unwrap().contains("xi"));
}

#[test]
fn fig3_echo_resolves_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "fig3.toml", "scenario = \"fig3\"\n");
    let o = rydpump(&["validate", "--config", &cfg]);
    assert!(o.status.success());
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["dynamics"]["tier"], "effective");
    assert_eq!(c["lattice"]["p"], 6);
    assert_eq!(c["drive"]["reservoir_sites"], serde_json::json!([0, 5]));
    assert!(c["drive"]["delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "scenario = \"fig4\"\n[scan]\nxi_max = 3\n");
    let o = rydpump(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scan.xi_max"));
}

#[test]
fn two_site_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[lattice]\nn_sites = 2\nxi = 1.2\na0 = 0.3\n[drive]\nomega = 1000.0\n");
    let out = tmp.path().join("s");
    let o = rydpump(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let nn = PhysicalSystem::new(2, 1.2, 0.3, 1e3, 1e4).unwrap().lattice.nearest_shift();
    let v: Vec<f64> = csv_column(&out.join("spectrum.csv"), "v_n").iter().map(|x| x.parse().unwrap()).collect();
    let d2: f64 = csv_column(&out.join("spectrum.csv"), "two_photon_detuning")[0].parse().unwrap();
    assert!((v[2] - nn).abs() <= 1e-12 * nn);
    assert!((d2 - nn / 2.0).abs() <= 1e-12 * nn);
}

#[test]
fn perturbative_pole_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let nn = PhysicalSystem::new(3, 1.2, 0.3, 1e3, 1e4).unwrap().lattice.nearest_shift();
    let text = format!("[lattice]\nn_sites = 3\nxi = 1.2\na0 = 0.3\n[drive]\nomega = 1000.0\ndelta = {nn:?}\n");
    let cfg = write(tmp.path(), "c.toml", &text);
    let o = rydpump(&["effective", "--config", &cfg, "--out", tmp.path().join("e").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "numerical");
    assert!(err["error"].as_str().unwrap().contains("pole"));
}

#[test]
fn fig2a_peak_near_the_dark_resonance() {
    let tmp = tempfile::tempdir().unwrap();
    let xi = rydpump::darkstate::dark_resonance_xi(6);
    let text = format!("scenario = \"fig2a\"\n[grid]\nxi_min = {xi:?}\nxi_max = {xi:?}\nn_xi = 1\na0_min = 0.24\na0_max = 0.30\nn_a0 = 4\n");
    let cfg = write(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("f");
    assert!(rydpump(&["fig2a", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let f: Vec<f64> = csv_column(&out.join("fig2a.csv"), "fidelity").iter().map(|x| x.parse().unwrap()).collect();
    let peak = f.iter().copied().fold(0.0, f64::max);
    assert!((peak - 0.998).abs() < 2e-3, "{peak}");
}

#[test]
fn fig4_reaches_a_hundred_sites() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "scenario = \"fig4\"\n[scan]\nn_list = [124, 126, 128]\n");
    let out = tmp.path().join("f");
    assert!(rydpump(&["fig4", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let n = csv_column(&out.join("fig4.csv"), "n_sites");
    let km = csv_column(&out.join("fig4.csv"), "k_m");
    let rows: Vec<(&str, &str)> = n.iter().map(String::as_str).zip(km.iter().map(String::as_str)).collect();
    assert!(rows.contains(&("126", "100")));
    // no dark state of either family at 128
    assert!(rows.iter().filter(|r| r.0 == "128").all(|r| r.1 == "0"));
}
