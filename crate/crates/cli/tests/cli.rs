//! End-to-end runs of the `scss` binary: output schemas, exit codes, and
//! reproducibility of the emitted files.

use std::path::Path;
use std::process::{Command, Output};

use scss_core::{
    apply_loss, cat_state, records_to_csv, sample_quadratures, DensityMatrix, Parity, PhaseMode,
    ScssParams,
};

fn scss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn ideal_sweep_writes_schema_conformant_csv_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ideal.csv");
    let run = scss(&[
        "sweep",
        "--ideal",
        "--r-min",
        "0.0",
        "--r-max",
        "0.2",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "R,fidelity,alpha,z,squeezing_db");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!(first[1] >= 0.999, "fidelity at R=0 was {}", first[1]);

    let manifest_path = format!("{}.manifest.json", out.display());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "sweep");
    assert!(manifest["duration_seconds"].as_f64().unwrap() > 0.0);

    let check = scss(&["check", out.to_str().unwrap(), &manifest_path]);
    assert!(check.status.success(), "{}", stderr(&check));
}

#[test]
fn sweep_rejects_missing_config_with_exit_2_and_the_path() {
    let run = scss(&[
        "sweep",
        "--ideal",
        "--config",
        "/nonexistent/config.toml",
        "--out",
        "/tmp/unused.csv",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(
        stderr(&run).contains("/nonexistent/config.toml"),
        "diagnostic must name the path: {}",
        stderr(&run)
    );
}

#[test]
fn simulate_rejects_out_of_range_reflectivity_with_exit_2() {
    let run = scss(&["simulate", "--R", "1.5", "--out", "/tmp/unused.json"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn simulate_reports_closest_fit_and_negativity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.json");
    let wigner_out = dir.path().join("wigner.csv");
    // fixed storage depth keeps this test quick
    let run = scss(&[
        "simulate",
        "--parity",
        "odd",
        "--R",
        "0.72",
        "--n-stor",
        "14",
        "--out",
        out.to_str().unwrap(),
        "--wigner",
        wigner_out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let fidelity = report["closest"]["fidelity"].as_f64().unwrap();
    assert!((fidelity - 0.57).abs() < 0.03, "fidelity {fidelity}");
    let alpha = report["closest"]["alpha"].as_f64().unwrap();
    assert!((alpha - 2.47).abs() < 0.10, "alpha {alpha}");
    assert_eq!(report["negative_regions"].as_u64().unwrap(), 3);

    let wigner_text = std::fs::read_to_string(&wigner_out).unwrap();
    assert!(wigner_text.starts_with("x,p,w\n"));
    assert_eq!(wigner_text.lines().count(), 1 + 201 * 201);

    let check = scss(&["check", out.to_str().unwrap(), wigner_out.to_str().unwrap()]);
    assert!(check.status.success(), "{}", stderr(&check));
}

#[test]
fn tomo_round_trips_synthetic_records() {
    let dir = tempfile::tempdir().unwrap();
    let records_path = dir.path().join("records.csv");
    let out = dir.path().join("reconstruction.json");

    let params = ScssParams::new(2.0, 0.4, Parity::Odd).unwrap();
    let truth = DensityMatrix::pure(&cat_state(&params, 20).unwrap()).unwrap();
    let degraded = apply_loss(&truth, 0.24).unwrap();
    let records = sample_quadratures(&degraded, 6_000, 99, PhaseMode::Uniform).unwrap();
    std::fs::write(&records_path, records_to_csv(&records)).unwrap();

    let run = scss(&[
        "tomo",
        "--in",
        records_path.to_str().unwrap(),
        "--efficiency",
        "0.76",
        "--storage-roundtrips",
        "0",
        "--target-alpha",
        "2.0",
        "--target-z",
        "0.4",
        "--bootstrap",
        "4",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["records"].as_u64().unwrap(), 6_000);
    assert!(report["converged"].as_bool().unwrap());
    let fidelity = report["fidelity_to_target"].as_f64().unwrap();
    assert!(fidelity > 0.85, "closed-loop fidelity {fidelity}");
    let bootstrap = &report["bootstrap"];
    assert!(
        bootstrap["lower"].as_f64().unwrap() <= bootstrap["point_estimate"].as_f64().unwrap()
            && bootstrap["point_estimate"].as_f64().unwrap()
                <= bootstrap["upper"].as_f64().unwrap()
    );

    let check = scss(&["check", out.to_str().unwrap()]);
    assert!(check.status.success(), "{}", stderr(&check));
}

#[test]
fn tomo_reports_malformed_rows_with_line_numbers_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x,theta\n0.4,0.1\noops,0.3\n").unwrap();
    let run = scss(&[
        "tomo",
        "--in",
        path.to_str().unwrap(),
        "--out",
        "/tmp/unused.json",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(
        stderr(&run).contains("line 3"),
        "diagnostic must carry the line number: {}",
        stderr(&run)
    );
}

#[test]
fn rate_increases_with_longer_storage() {
    let base = scss(&["rate", "--config", "paper"]);
    assert!(base.status.success(), "{}", stderr(&base));
    let base_rate: f64 = String::from_utf8_lossy(&base.stdout).trim().parse().unwrap();

    let extended = scss(&["rate", "--config", "paper", "--n-stor-max", "24"]);
    assert!(extended.status.success());
    let extended_rate: f64 = String::from_utf8_lossy(&extended.stdout)
        .trim()
        .parse()
        .unwrap();
    assert!(extended_rate > base_rate, "{extended_rate} vs {base_rate}");
}

#[test]
fn decay_fit_recovers_synthetic_loss() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("decay.csv");
    let mut text = String::from("n_stor,fidelity\n");
    for n in 0..=20u32 {
        text.push_str(&format!("{},{}\n", n, 0.95 * 0.99f64.powi(n as i32)));
    }
    std::fs::write(&path, &text).unwrap();
    let run = scss(&["decay-fit", "--in", path.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let loss: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();
    assert!((loss - 0.01).abs() < 5e-4, "fitted loss {loss}");
}

#[test]
fn config_profiles_load_from_files_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("lab.toml");
    std::fs::write(
        &config_path,
        "[profile.paper]\n\n[profile.short]\nn_stor_max = 10\n",
    )
    .unwrap();

    let out = dir.path().join("s.csv");
    let run = scss(&[
        "sweep",
        "--ideal",
        "--config",
        config_path.to_str().unwrap(),
        "--profile",
        "short",
        "--r-min",
        "0.0",
        "--r-max",
        "0.1",
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));

    // same file resolved through SCSS_CONFIG_DIR
    let out2 = dir.path().join("s2.csv");
    let run = Command::new(env!("CARGO_BIN_EXE_scss"))
        .env("SCSS_CONFIG_DIR", dir.path())
        .args([
            "sweep",
            "--ideal",
            "--config",
            "lab.toml",
            "--r-min",
            "0.0",
            "--r-max",
            "0.1",
            "--steps",
            "3",
            "--out",
            out2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        std::fs::read_to_string(&out2).unwrap(),
        "byte-identical outputs for identical inputs"
    );
}

#[test]
fn check_flags_corrupted_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.csv");
    std::fs::write(&path, "R,fidelity,alpha,z,squeezing_db\n0.2,1.5,1,0,0\n").unwrap();
    let run = scss(&["check", path.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(Path::new(&path).exists());
}
