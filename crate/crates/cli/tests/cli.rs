use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rfgeom::harness::{save_matrix, MANIFEST_FILE, REPORT_FILE};
use rfgeom::model::{
    make_feature_map, sample_data, sample_latent, DataMatrix, FeatureMapRequest, LatentSample, LatentSpace, ModelSpec,
    SamplingScheme,
};
use serde_json::Value;

fn rfgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfgeom")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path_str(&path).to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(REPORT_FILE)).unwrap()).unwrap()
}

#[test]
fn rate_run_succeeds_and_lists_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "rate.json", r#"{"p_values": [16, 32, 64, 128], "n": 40, "seeds": 3, "n_values": []}"#);
    let out = tmp.path().join("out");
    let run = rfgeom(&["conc-rate", "--config", &cfg, "--out-dir", path_str(&out), "--seed", "7"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f["path"] == REPORT_FILE));
    for f in files {
        let path = out.join(f["path"].as_str().unwrap());
        assert_eq!(fs::metadata(&path).unwrap().len(), f["bytes"].as_u64().unwrap());
        assert_eq!(f["sha256"].as_str().unwrap().len(), 64);
    }
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["experiment"], "concentration_rate");
}

#[test]
fn exit_codes_distinguish_input_errors_from_failed_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_config(tmp.path(), "unknown.json", r#"{"bogus": 1}"#);
    let run = rfgeom(&["toy-circle", "--config", &unknown, "--out-dir", path_str(&tmp.path().join("a"))]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("bogus"));

    let missing = rfgeom(&["toy-circle", "--config", path_str(&tmp.path().join("nope.json")), "--out-dir", "x"]);
    assert_eq!(missing.status.code(), Some(1));

    let wrong = write_config(tmp.path(), "wrong.json", r#"{"experiment": "torus_isometry"}"#);
    let run = rfgeom(&["toy-circle", "--config", &wrong, "--out-dir", path_str(&tmp.path().join("b"))]);
    assert_eq!(run.status.code(), Some(1));

    // Noise swamps the circle at p = 3, so the hard Betti check fails.
    let noisy = write_config(tmp.path(), "noisy.json", r#"{"p_values": [3], "n": 200, "n_sub": 100, "sigma_sq": 4.0}"#);
    let out = tmp.path().join("c");
    let run = rfgeom(&["toy-circle", "--config", &noisy, "--out-dir", path_str(&out)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(out.join(MANIFEST_FILE).exists());
    assert_eq!(report(&out)["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).count(), 1);
}

#[test]
fn artifacts_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "p.json", r#"{"p_values": [25, 100], "n": 120, "seeds": 2}"#);
    let mut manifests = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(format!("t{threads}"));
        let run = rfgeom(&["persistence", "--config", &cfg, "--out-dir", path_str(&out), "--threads", threads]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
        manifests.push(fs::read(out.join(MANIFEST_FILE)).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
}

/// Clifford-torus data whose positions are the latent rhombus points moved
/// by whole lattice vectors, as an animal revisits the same grid phase.
fn synthetic_external(dir: &Path) -> (String, String) {
    let n = 400;
    let latent = sample_latent(&LatentSpace::FlatTorusRhombus { r1: [1.0, 0.0], r2: [0.0, 1.0] }, n, SamplingScheme::UniformRandom, 3).unwrap();
    let angles = LatentSample::from_points(LatentSpace::CustomPointSet { dim: 2 }, latent.torus_angles().unwrap()).unwrap();
    let spec = ModelSpec::new(make_feature_map(FeatureMapRequest::TorusFourier { p: 150 }).unwrap(), 0.05, 3);
    let y = sample_data(&spec, &angles).unwrap();
    let xi: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let z = latent.point(i);
            [z[0] + (i % 2) as f64, z[1] + ((i / 2) % 2) as f64]
        })
        .collect();
    let (y_path, xi_path) = (dir.join("y.csv"), dir.join("xi.csv"));
    save_matrix(&y_path, &y).unwrap();
    save_matrix(&xi_path, &DataMatrix::from_rows(&xi).unwrap()).unwrap();
    (path_str(&y_path).to_string(), path_str(&xi_path).to_string())
}

#[test]
fn external_pipeline_reads_csv_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let (y, xi) = synthetic_external(tmp.path());
    let cfg = write_config(tmp.path(), "ext.json", r#"{"r1": [1.0, 0.0], "r2": [0.0, 1.0], "torus_ratios": [2.5], "homology": true, "n_sub": 150}"#);
    let out = tmp.path().join("out");
    let run = rfgeom(&[
        "external", "--config", &cfg, "--out-dir", path_str(&out), "--y", &y, "--xi", &xi, "--top-active", "300", "--pca-dims", "6",
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r = report(&out);
    assert_eq!(r["config"]["scaling"], "self_normalized");
    assert_eq!(r["results"]["rows"], 300);
    let rho = |name: &str| r["results"]["isometry"][name]["report"]["rho"].as_f64().unwrap();
    assert!(rho("rhombus_teleport") > rho("open_field"));
    assert!(rho("rhombus_teleport") > rho("rhombus_euclid"));
    assert!(out.join("external/diagram.csv").exists());

    let ragged = tmp.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();
    let run = rfgeom(&["external", "--out-dir", path_str(&tmp.path().join("r")), "--y", &y, "--xi", path_str(&ragged)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("row 2"));
}
