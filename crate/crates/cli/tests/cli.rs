use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn largespin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_largespin")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = largespin(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("largespin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn octahedral_spin_zero_levels() {
    let v = json(&["effective", "spectrum", "--config", "O4", "--two-j", "0", "--w", "1"]);
    let levels: Vec<(f64, u64)> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| (f(&l["value"]), l["multiplicity"].as_u64().unwrap()))
        .collect();
    let want = [(-2.0, 2), (0.0, 3), (4.0, 1)];
    assert_eq!(levels.len(), 3);
    for ((e, m), (we, wm)) in levels.iter().zip(want) {
        assert!((e - we).abs() < 1e-12 && *m == wm, "{levels:?}");
    }
    assert_eq!(v["verified"], Value::Bool(true));
}

#[test]
fn half_integer_octahedral_decomposition() {
    let v = json(&["group", "decompose", "--config", "O4", "--two-j", "1"]);
    assert_eq!(v["irreps"], serde_json::json!({"E1'": 1, "G'": 1}));
    assert_eq!(v["dimension_check"], Value::Bool(true));
}

#[test]
fn action_at_zero_u() {
    let v = json(&["wkb", "c-of-u", "--u", "0"]);
    assert!((f(&v["c"]) - 0.5493061).abs() < 1e-7);
}

#[test]
fn random_gauge_leaves_levels_unchanged() {
    let base = json(&["effective", "spectrum", "--config", "Y3", "--two-j", "3", "--w=-0.7"]);
    let gauged = json(&["effective", "spectrum", "--config", "Y3", "--two-j", "3", "--w=-0.7", "--seed", "11"]);
    let (a, b) = (base["levels"].as_array().unwrap(), gauged["levels"].as_array().unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((f(&x["value"]) - f(&y["value"])).abs() < 1e-12);
        assert_eq!(x["multiplicity"], y["multiplicity"]);
    }
}

#[test]
fn multipath_needs_path_factor_and_accepts_omega() {
    let out = largespin(&["effective", "spectrum", "--config", "O3M", "--two-j", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let a = json(&["effective", "spectrum", "--config", "O3M", "--two-j", "2", "--omega", "1.0"]);
    let b = json(&["effective", "spectrum", "--config", "O3M", "--two-j", "2", "--x", &(2.0 * 0.5f64.cos()).to_string()]);
    assert_eq!(a["levels"], b["levels"]);
}

#[test]
fn invalid_inputs_exit_with_two() {
    for args in [
        vec!["wkb", "c-of-u", "--u", "0.5"],
        vec!["effective", "spectrum", "--config", "Q7", "--two-j", "1"],
        vec!["effective", "spectrum", "--config", "O2", "--two-j", "1"],
        vec!["thermo", "chi", "--config", "O4", "--two-j", "1", "--tmin", "0"],
        vec!["estimate", "dipolar", "--two-j", "7", "--n", "1e22", "--x", "2"],
        vec!["exact", "spectrum", "--two-j", "4"],
    ] {
        let out = largespin(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn csv_rows_echo_parameters() {
    let out = largespin(&["group", "decompose", "--config", "O3", "--two-j", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "config,two_j,irrep,dim,multiplicity\nO3,3,G',4,2\n");
}

#[test]
fn exact_spectrum_finds_six_fold_ground_multiplet() {
    let v = json(&["exact", "spectrum", "--two-j", "48", "--phi", "0.2"]);
    assert_eq!(v["multiplet_size"], 6);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 49);
    let u = json(&["exact", "spectrum", "--two-j", "48", "--u", &0.2f64.tan().to_string()]);
    assert_eq!(u["multiplet_size"], 6);
}

#[test]
fn file_output_is_reproducible_with_manifest() {
    let args = |path: &str| {
        vec![
            "exact".to_string(),
            "sweep".into(),
            "--two-j".into(),
            "20".into(),
            "--steps".into(),
            "37".into(),
            "--format".into(),
            "csv".into(),
            "--out".into(),
            path.into(),
        ]
    };
    let p1 = scratch("sweep1.csv");
    let p2 = scratch("sweep2.csv");
    let run = |path: &PathBuf, threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_largespin"))
            .args(args(path.to_str().unwrap()))
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    };
    run(&p1, "1");
    run(&p2, "4");
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8_lossy(&a).lines().count(), 38);
    let mut manifest_path = p1.clone().into_os_string();
    manifest_path.push(".manifest.json");
    let m: Value = serde_json::from_slice(&std::fs::read(manifest_path).unwrap()).unwrap();
    assert_eq!(m["outputs"][0]["sha256"], Value::from(hex::encode(Sha256::digest(&a))));
    assert_eq!(m["parameters"]["two_j"], 20);
    assert_eq!(m["parameters"]["format"], "csv");
    assert_eq!(m["command"][0], "exact");
}

#[test]
fn estimators() {
    let v = json(&["estimate", "tau", "--rho", "10", "--delta", "10", "--omega", "1e10", "--sound", "1e5"]);
    assert!((f(&v["tau_s"]) - 0.0553).abs() < 5e-4, "{v}");
    let v = json(&["estimate", "dipolar", "--two-j", "7", "--n", "1e22"]);
    assert!(f(&v["delta_omega_per_s"]) > 0.0);
}

#[test]
fn thermo_and_dynamics_shapes() {
    let v = json(&["thermo", "chi", "--config", "O3", "--two-j", "0", "--tmin", "0.1", "--tmax", "10", "--tsteps", "5"]);
    assert_eq!(v["chi"].as_array().unwrap().len(), 5);
    assert_eq!(v["low_t"]["ground_degeneracy"], 1);
    let v = json(&["dynamics", "oscillate", "--config", "O4", "--two-j", "2", "--tsteps", "11"]);
    let m = v["m"].as_array().unwrap();
    assert_eq!(m.len(), 11);
    assert!((f(&m[0]) - 2.0 * 1.0).abs() < 1e-12);
    let dump = json(&["geometry", "dump", "--config", "O2", "--alpha", "0.7"]);
    assert_eq!(dump["n_sites"], 12);
}
