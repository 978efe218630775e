use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use spectra::csvio::read_table;
use spectra::schema::validate_csv;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn spectra(args: &[&str]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .output()
        .expect("spawn spectra");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(args: &[&str]) -> Outcome {
    let o = spectra(args);
    assert_eq!(
        o.code, 0,
        "{args:?}\nstdout: {}\nstderr: {}",
        o.stdout, o.stderr
    );
    o
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_train(dir: &Path, extra: &[&str]) {
    let mut args = vec![
        "train",
        "--arch",
        "8x12x6x3",
        "--data",
        "blobs",
        "--batch",
        "8",
        "--eta",
        "0.05",
        "--steps",
        "40",
        "--record-stride",
        "10",
        "--dataset-size",
        "64",
        "--seed",
        "3",
        "--out",
        p(dir),
    ];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn dyson_run_has_one_column_per_particle_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    for out in [&a, &b] {
        ok(&[
            "simulate",
            "dyson",
            "--r",
            "16",
            "--m",
            "20",
            "--n",
            "16",
            "--eta",
            "1",
            "--diffusion",
            "1e-3",
            "--steps",
            "5000",
            "--dt",
            "0.01",
            "--seed",
            "7",
            "--record-stride",
            "50",
            "--out",
            p(out),
        ]);
    }
    let t = read_table(&a).unwrap();
    assert_eq!(t.header.len(), 2 + 16);
    assert_eq!(t.header[2], "lambda_1");
    assert_eq!(t.rows.len(), 101);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    ok(&[
        "validate",
        p(&a),
        p(&tmp.path().join("a.csv.manifest.json")),
    ]);
}

#[test]
fn zero_steps_write_only_the_initial_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("m.csv");
    ok(&[
        "simulate",
        "matrix",
        "--m",
        "6",
        "--n",
        "4",
        "--eta",
        "0.1",
        "--diffusion",
        "0.1",
        "--steps",
        "0",
        "--dt",
        "0.1",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    let t = read_table(&out).unwrap();
    assert_eq!(
        t.header,
        vec!["step", "time", "sigma_1", "sigma_2", "sigma_3", "sigma_4"]
    );
    assert_eq!(t.rows.len(), 1);
    validate_csv(&out).unwrap();
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x.csv");
    let missing = tmp.path().join("missing");
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "frobnicate", "--in", "x"],
        vec!["simulate"],
        vec![
            "train",
            "--arch",
            "8xx3",
            "--eta",
            "0.1",
            "--steps",
            "1",
            "--seed",
            "0",
            "--out",
            p(&out),
        ],
        vec![
            "simulate",
            "dyson",
            "--r",
            "9",
            "--m",
            "10",
            "--n",
            "8",
            "--eta",
            "1",
            "--diffusion",
            "1e-3",
            "--steps",
            "1",
            "--dt",
            "0.01",
            "--seed",
            "0",
            "--out",
            p(&out),
        ],
        vec![
            "simulate",
            "matrix",
            "--m",
            "4",
            "--n",
            "4",
            "--eta",
            "-1",
            "--diffusion",
            "1",
            "--steps",
            "1",
            "--dt",
            "0.1",
            "--seed",
            "0",
            "--out",
            p(&out),
        ],
        vec!["analyze", "mp-check", "--in", p(&missing)],
        vec!["table", "mp", "--gamma", "2", "--out", p(&out)],
    ];
    for args in cases {
        let o = spectra(&args);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stderr);
    }
}

#[test]
fn zero_rate_training_records_identical_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    ok(&[
        "train",
        "--arch",
        "6x10x3",
        "--eta",
        "0",
        "--steps",
        "30",
        "--batch",
        "8",
        "--dataset-size",
        "64",
        "--record-stride",
        "10",
        "--seed",
        "2",
        "--out",
        p(&dir),
    ]);
    for layer in 1..=2 {
        let t = read_table(&dir.join("spectra").join(format!("layer{layer}.csv"))).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.rows.iter().all(|r| r[1..] == t.rows[0][1..]));
    }
    ok(&["validate", p(&dir)]);
}

#[test]
fn record_directory_verifies_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    small_train(&dir, &["--grad-stride", "1"]);
    assert!(dir.join("manifest.json").is_file());
    assert!(dir.join("loss.csv").is_file());
    assert!(dir.join("grads").join("step0_layer1.bin").is_file());
    let o = ok(&[
        "validate",
        p(&dir),
        p(&dir.join("loss.csv")),
        p(&dir.join("spectra").join("layer2.csv")),
    ]);
    assert!(o.stdout.contains("manifest ok"));
    fs::write(dir.join("loss.csv"), "step,loss\n1,0.5\n").unwrap();
    assert_eq!(spectra(&["validate", p(&dir)]).code, 1);
}

#[test]
fn mp_check_on_initial_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    ok(&[
        "train",
        "--arch",
        "64x64x4",
        "--eta",
        "0.01",
        "--steps",
        "1",
        "--batch",
        "8",
        "--dataset-size",
        "64",
        "--seed",
        "5",
        "--out",
        p(&dir),
    ]);
    let report = tmp.path().join("mp.json");
    let o = ok(&[
        "analyze",
        "mp-check",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--step",
        "0",
        "--out",
        p(&report),
    ]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["ks"].as_f64().unwrap() < 0.08, "{v}");
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
    assert!(tmp.path().join("mp.json.manifest.json").is_file());
    let o = ok(&[
        "analyze",
        "tw-edge",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--step",
        "0",
    ]);
    assert!(o.stdout.contains("chi"), "{}", o.stdout);
}

#[test]
fn fit_gamma_recovers_the_stationary_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("dyson.csv");
    ok(&[
        "simulate",
        "dyson",
        "--r",
        "1",
        "--m",
        "8",
        "--n",
        "4",
        "--eta",
        "1",
        "--diffusion",
        "0.01",
        "--beta1",
        "1",
        "--steps",
        "400000",
        "--dt",
        "0.005",
        "--seed",
        "11",
        "--record-stride",
        "20",
        "--out",
        p(&out),
    ]);
    let o = ok(&["analyze", "fit-gamma", "--in", p(&out), "--burn-in", "1000"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let shape = v["shape"].as_f64().unwrap();
    let expected = (8.0 - 4.0 + 3.0) / 4.0;
    assert!(
        (shape / expected - 1.0).abs() < 0.1,
        "{shape} vs {expected}"
    );
}

#[test]
fn forecast_with_zero_gradients_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    small_train(&dir, &[]);
    let out = tmp.path().join("f.csv");
    ok(&[
        "forecast",
        "--record",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "4",
        "--zero-grads",
        "--out",
        p(&out),
    ]);
    let t = read_table(&out).unwrap();
    assert_eq!(t.rows.len(), 41);
    assert!(t.rows.iter().all(|r| r[1..] == t.rows[0][1..]));
    validate_csv(&out).unwrap();
}

#[test]
fn forecast_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    small_train(&dir, &[]);
    let out = tmp.path().join("f.csv");
    let o = spectra(&[
        "forecast",
        "--record",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "4",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("step 0"), "{}", o.stderr);
    let o = spectra(&[
        "forecast",
        "--record",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "9",
        "--zero-grads",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.code, 2, "{}", o.stderr);
    let o = spectra(&[
        "forecast",
        "--record",
        p(&dir),
        "--layer",
        "4",
        "--zero-grads",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.code, 2, "{}", o.stderr);
}

#[test]
fn forecast_compare_tracks_the_recorded_run() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    small_train(&dir, &["--grad-stride", "1"]);
    let out = tmp.path().join("f.csv");
    ok(&[
        "forecast",
        "--record",
        p(&dir),
        "--layer",
        "2",
        "--k",
        "3",
        "--compare",
        "--vector-update",
        "first-order",
        "--out",
        p(&out),
    ]);
    let t = read_table(&out).unwrap();
    assert_eq!(
        t.header,
        vec!["step", "sigma_1", "sigma_2", "sigma_3", "err_1", "err_2", "err_3"]
    );
    assert!(t.rows[0][4..].iter().all(|e| e.abs() < 1e-12));
    assert!(t
        .rows
        .iter()
        .flat_map(|r| r[4..].to_vec())
        .all(|e| e < 0.05));
    ok(&["validate", p(&out)]);
}

#[test]
fn beta_reports_are_emitted_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    small_train(
        &dir,
        &[
            "--grad-stride",
            "1",
            "--per-example-stride",
            "20",
            "--per-example-count",
            "16",
        ],
    );
    let series = tmp.path().join("beta.csv");
    let o = ok(&[
        "analyze",
        "noise-report",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "3",
        "--series-out",
        p(&series),
    ]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    for key in [
        "D_hat",
        "beta1_hat",
        "beta1_se",
        "correlations",
        "magnitude_shares",
    ] {
        assert!(v.get(key).is_some(), "{key} missing from {v}");
    }
    assert!(v["beta1_hat"].as_f64().unwrap() > 0.0);
    let beta = tmp.path().join("extract.csv");
    ok(&[
        "analyze",
        "extract-beta",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "3",
        "--series-out",
        p(&beta),
    ]);
    let t = read_table(&beta).unwrap();
    assert_eq!(t.header, vec!["step", "beta_1", "beta_2", "beta_3"]);
    assert_eq!(t.rows.len(), 41);
    // Without --diffusion the SDE convention falls back to the estimated D.
    ok(&[
        "analyze",
        "extract-beta",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "3",
        "--convention",
        "sde",
        "--series-out",
        p(&beta),
    ]);
    let o = spectra(&[
        "analyze",
        "extract-beta",
        "--in",
        p(&dir),
        "--layer",
        "1",
        "--k",
        "9",
        "--series-out",
        p(&beta),
    ]);
    assert_eq!(o.code, 2, "{}", o.stderr);
}

#[test]
fn tables_pass_schema_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let mp = tmp.path().join("mp.csv");
    let tw = tmp.path().join("tw.csv");
    let st = tmp.path().join("st.csv");
    ok(&["table", "mp", "--gamma", "0.5", "--out", p(&mp)]);
    ok(&["table", "tw", "--out", p(&tw)]);
    ok(&[
        "table",
        "stationary",
        "--m",
        "9",
        "--n",
        "5",
        "--eta",
        "0.1",
        "--diffusion",
        "0.2",
        "--beta1",
        "0.5",
        "--out",
        p(&st),
    ]);
    ok(&["validate", p(&mp), p(&tw), p(&st)]);
}

#[test]
fn default_training_run_finishes_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rec");
    let start = Instant::now();
    ok(&[
        "train",
        "--arch",
        "784x64x64x10",
        "--data",
        "blobs",
        "--batch",
        "32",
        "--eta",
        "5e-4",
        "--steps",
        "800",
        "--record-stride",
        "10",
        "--seed",
        "1",
        "--out",
        p(&dir),
    ]);
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "{secs} s");
    assert_eq!(
        read_table(&dir.join("spectra").join("layer1.csv"))
            .unwrap()
            .rows
            .len(),
        81
    );
}
