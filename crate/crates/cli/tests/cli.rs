use std::path::Path;
use std::process::{Command, Output};

use chiral_wgm::wgm::{solve_resonance, ModeSpec, Polarization};
use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_chiral-wgm");

fn run(dir: &Path, config: &Value, extra: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, serde_json::to_string(config).unwrap()).unwrap();
    Command::new(BIN).arg("--config").arg(&cfg).arg("--out").arg(dir).args(extra).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').filter_map(|c| c.parse().ok()).collect()).collect();
    (header, rows)
}

fn spectrum_config(points: usize) -> Value {
    json!({
        "command": "spectrum",
        "params": {
            "model": "v_system", "g_MHz": 20.0, "gamma_MHz": 1.0, "kappa0_MHz": 1.0, "kappa_ext_MHz": 1.0,
            "alpha_sp_sq": 1.0, "grid": { "min_over_kappa0": -60.0, "max_over_kappa0": 60.0, "points": points }
        },
        "output": { "path": "spec.csv" }
    })
}

fn sweep_config(axes: Value) -> Value {
    json!({
        "command": "sweep",
        "params": { "g_MHz": 20.0, "gamma_MHz": 3.0, "kappa0_MHz": 5.0, "kappa_ext_MHz": 5.0, "axes": axes },
        "output": { "path": "sweep.csv" }
    })
}

#[test]
fn spectrum_dips_at_vacuum_rabi_peaks() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &spectrum_config(241), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("spec.csv"));
    assert_eq!(header[..2], ["delta_over_kappa0", "T_fwd"]);
    let step = 120.0 / 240.0;
    let minima: Vec<f64> = (1..rows.len() - 1).filter(|&k| rows[k][1] < rows[k - 1][1] && rows[k][1] < rows[k + 1][1]).map(|k| rows[k][0]).collect();
    assert_eq!(minima.len(), 2, "{minima:?}");
    assert!((minima[0] + 20.0).abs() <= step && (minima[1] - 20.0).abs() <= step, "{minima:?}");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("spec.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], chiral_wgm::VERSION);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "command": "sweep",
        "params": {
            "g_MHz": 20.0, "gamma_MHz": 3.0, "kappa0_MHz": 5.0,
            "axes": [
                { "name": "kappa_ext_over_kappa0", "min": 0.1, "max": 100.0, "points": 30, "log": true },
                { "name": "alpha_sp_sq", "min": 0.0, "max": 1.0, "points": 11 }
            ]
        },
        "output": { "path": "sweep.csv" }
    });
    assert!(run(dir.path(), &cfg, &[]).status.success());
    let first = std::fs::read(dir.path().join("sweep.csv")).unwrap();
    assert!(run(dir.path(), &cfg, &["--threads", "1"]).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("sweep.csv")).unwrap());
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let mut top = spectrum_config(11);
    top["extra"] = json!(1);
    assert_eq!(run(dir.path(), &top, &[]).status.code(), Some(1));
    let mut inner = spectrum_config(11);
    inner["params"]["kappa_MHz"] = json!(1.0);
    assert_eq!(run(dir.path(), &inner, &[]).status.code(), Some(1));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &sweep_config(json!([{ "name": "alpha_sp_sq", "min": 0.0, "max": 1.0, "points": 0 }])), &[]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header[0], "alpha_sp_sq");
    assert!(rows.is_empty());
}

#[test]
fn oversized_sweeps_are_rejected() {
    let dir = TempDir::new().unwrap();
    let big = sweep_config(json!([
        { "name": "alpha_sp_sq", "min": 0.0, "max": 1.0, "points": 1000 },
        { "name": "g_over_kappa0", "min": 0.0, "max": 10.0, "points": 1000 }
    ]));
    assert_eq!(run(dir.path(), &big, &[]).status.code(), Some(1));
    let axis = json!({ "name": "alpha_sp_sq", "min": 0.0, "max": 1.0, "points": 2 });
    let three = sweep_config(json!([axis, axis, axis]));
    assert_eq!(run(dir.path(), &three, &[]).status.code(), Some(1));
}

#[test]
fn mode_surface_row_matches_library() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "command": "mode",
        "params": { "n0": 1.45, "radius_um": 20.0, "m": 206, "polarization": "TM", "offsets_nm": [0.0, 100.0] },
        "output": { "path": "mode.csv" }
    });
    assert!(run(dir.path(), &cfg, &[]).status.success());
    let (header, rows) = read_csv(&dir.path().join("mode.csv"));
    let col = header.iter().position(|h| h == "O").unwrap();
    let sol = solve_resonance(&ModeSpec { n0: 1.45, radius: 20e-6, m: 206, p: 0, polarization: Polarization::TM }).unwrap();
    let o = sol.overlaps_at(sol.surface_radius()).unwrap().o;
    assert!((rows[0][col] - o).abs() <= 1e-10 * o);
    assert!(rows[0][col] < 0.2);
}

#[test]
fn json_format_and_validate() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "command": "sprint",
        "params": { "g_MHz": 20.0, "gamma_MHz": 3.0, "kappa0_MHz": 5.0 },
        "output": { "path": "sprint.json" }
    });
    assert!(run(dir.path(), &cfg, &["--format", "json"]).status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sprint.json")).unwrap()).unwrap();
    assert!(v.is_object());
    let out = run(dir.path(), &json!({ "command": "validate", "params": { "n_per_model": 2, "seed": 3 } }), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS") && !text.contains("FAIL"));
}
