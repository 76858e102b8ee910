//! End-to-end tests of the `enz` binary: flag surfaces, file outputs,
//! exit codes and manifest replay.

use std::path::Path;
use std::process::Command;

fn enz() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enz"))
}

fn stdout_of(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn measure_reports_expected_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let vec_path = tmp.path().join("x.csv");
    std::fs::write(&vec_path, "2, 1, 1, 0\n").unwrap();
    let out = enz()
        .args(["measure", "--input"])
        .arg(&vec_path)
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("l0 = 3"), "stdout: {text}");
    assert!(text.contains("enz = 2.8284271247461903"), "stdout: {text}");
    assert!(text.contains("efficiency = 0.94280904158206"), "stdout: {text}");
    assert!(tmp.path().join("decomposition.csv").exists());
    assert!(tmp.path().join("hierarchy.csv").exists());
    assert!(tmp.path().join("manifest.json").exists());
}

#[test]
fn measure_zero_vector_exits_with_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let vec_path = tmp.path().join("zero.csv");
    std::fs::write(&vec_path, "0, 0, 0\n").unwrap();
    let out = enz()
        .args(["measure", "--input"])
        .arg(&vec_path)
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zero"), "stderr: {err}");
}

#[test]
fn measure_all_equal_vector_has_unit_efficiency() {
    let tmp = tempfile::tempdir().unwrap();
    let vec_path = tmp.path().join("u.csv");
    std::fs::write(&vec_path, "3,3,3,3\n").unwrap();
    let out = enz()
        .args(["measure", "--input"])
        .arg(&vec_path)
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("efficiency = 1"));
}

#[test]
fn recover_synth_deterministic_and_solves() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&d1, &d2] {
        let out = enz()
            .args([
                "recover",
                "--synth",
                "--m",
                "32",
                "--n",
                "128",
                "--k",
                "4",
                "--r",
                "0.1",
                "--cr",
                "2",
                "--eta",
                "0.01",
                "--method",
                "entropy",
                "--lambda-grid",
                "1e-3:1e3:7",
                "--seed",
                "3",
            ])
            .arg("--out-dir")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout_of(&out);
        let rel: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("rel_error = "))
            .expect("prints rel_error")
            .parse()
            .unwrap();
        assert!(rel <= 0.05, "recovery failed: rel_error {rel}");
    }
    assert_eq!(
        std::fs::read(d1.join("x_hat.csv")).unwrap(),
        std::fs::read(d2.join("x_hat.csv")).unwrap()
    );
}

#[test]
fn recover_ista_huge_lambda_gives_zero_vector() {
    let tmp = tempfile::tempdir().unwrap();
    let out = enz()
        .args([
            "recover", "--synth", "--m", "16", "--n", "48", "--k", "3", "--eta", "0",
            "--method", "ista", "--lambda", "1e9", "--seed", "1",
        ])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let x_hat = std::fs::read_to_string(tmp.path().join("x_hat.csv")).unwrap();
    assert!(
        x_hat.lines().all(|l| l.trim().parse::<f64>().unwrap() == 0.0),
        "expected the zero vector"
    );
}

#[test]
fn recover_rejects_mismatched_files() {
    let tmp = tempfile::tempdir().unwrap();
    let a_path = tmp.path().join("a.csv");
    let b_path = tmp.path().join("b.csv");
    std::fs::write(&a_path, "1,0\n0,1\n").unwrap();
    std::fs::write(&b_path, "1\n2\n3\n").unwrap();
    let out = enz()
        .args(["recover", "--matrix"])
        .arg(&a_path)
        .arg("--obs")
        .arg(&b_path)
        .args(["--method", "ista", "--lambda", "0.1"])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_smoke_run_and_manifest_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let d1 = tmp.path().join("first");
    let out = enz()
        .args([
            "sweep",
            "--trials",
            "1",
            "--seed",
            "9",
            "--k-grid",
            "2",
            "--eta-grid",
            "0.01",
            "--methods",
            "ista,iht",
            "--m",
            "24",
            "--n",
            "64",
            "--lambda-grid",
            "1e-2:1e2:5",
        ])
        .arg("--out-dir")
        .arg(&d1)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = std::fs::read_to_string(d1.join("trials.csv")).unwrap();
    assert!(trials.starts_with(
        "method,k,eta,trial,seed,rel_error,success,best_lambda,wall_time_s\n"
    ));
    let rates = std::fs::read_to_string(d1.join("success_rates.csv")).unwrap();
    assert!(rates.starts_with("method,k,eta,success_rate\n"));

    // Replay from the manifest into a second directory: identical bytes.
    let d2 = tmp.path().join("second");
    let out = enz()
        .args(["sweep", "--config"])
        .arg(d1.join("manifest.json"))
        .arg("--out-dir")
        .arg(&d2)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(d1.join("trials.csv")).unwrap(),
        std::fs::read(d2.join("trials.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(d1.join("success_rates.csv")).unwrap(),
        std::fs::read(d2.join("success_rates.csv")).unwrap()
    );
}

#[test]
fn denoise_writes_metrics_with_contracted_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = enz()
        .args([
            "denoise",
            "--size",
            "24",
            "--sigma",
            "0.05",
            "--methods",
            "tv",
            "--lambda",
            "0.05",
            "--seed",
            "2",
        ])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(tmp.path().join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("method,lambda,psnr_db,ssim\n"));
    assert!(metrics.lines().nth(1).unwrap().starts_with("tv,0.05,"));
    assert!(tmp.path().join("denoised_tv.pgm").exists());
    assert!(tmp.path().join("noisy.pgm").exists());
}

#[test]
fn denoise_sigma_zero_tiny_lambda_reports_infinite_psnr() {
    let tmp = tempfile::tempdir().unwrap();
    let out = enz()
        .args([
            "denoise", "--size", "16", "--sigma", "0", "--methods", "tv", "--lambda", "1e-9",
        ])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("psnr_db=inf"), "stdout: {text}");
}

#[test]
fn theory_default_run_reports_no_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let out = enz()
        .args(["theory", "--instances", "2", "--prop1-trials", "200", "--seed", "4"])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("lower_bound=false"));
    assert!(text.contains("prop1 singular_violations=0 cross_violations=0"));
    assert!(text.contains("bounds_hold=true"));
    let stability = std::fs::read_to_string(tmp.path().join("stability.csv")).unwrap();
    assert!(stability.starts_with("lhs_hT,bound_hT,lhs_eff,bound_eff,delta,holds\n"));
    assert_eq!(stability.lines().count(), 3); // header + 2 instances
}

#[test]
fn theory_orthogonal_matrix_reports_zero_delta() {
    let tmp = tempfile::tempdir().unwrap();
    let mat = tmp.path().join("q.csv");
    std::fs::write(&mat, "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n").unwrap();
    let out = enz()
        .args(["theory", "--matrix"])
        .arg(&mat)
        .args([
            "--k",
            "1",
            "--rescale",
            "false",
            "--column-normalize",
            "false",
            "--prop1-trials",
            "50",
        ])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(
        text.contains("delta=0 lower_bound=false"),
        "stdout: {text}"
    );
}

#[test]
fn theory_sampled_mode_prints_lower_bound_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = enz()
        .args([
            "theory",
            "--instances",
            "1",
            "--budget",
            "50",
            "--rescale",
            "false",
            "--prop1-trials",
            "10",
        ])
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("lower_bound=true"));
}

#[test]
fn decay_profiles_csv_series_and_percentile_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let s1 = tmp.path().join("s1.csv");
    std::fs::write(&s1, "4\n1\n2\n").unwrap();
    let out = enz()
        .args(["decay", "--inputs"])
        .arg(&s1)
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let env = std::fs::read_to_string(tmp.path().join("decay_envelopes.csv")).unwrap();
    assert!(env.starts_with("normalized_index,mean,median,p5,p25,p80,p95\n"));
    let series = std::fs::read_to_string(tmp.path().join("decay_series.csv")).unwrap();
    assert!(series.contains("0,0,0,1\n"), "series: {series}");
    assert!(series.contains("0,1,0.5,0.5\n"));
    assert!(series.contains("0,2,1,0.25\n"));
}

#[test]
fn decay_constant_image_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let pgm = tmp.path().join("flat.pgm");
    let mut data = b"P5\n4 4\n255\n".to_vec();
    data.extend([128u8; 16]);
    std::fs::write(&pgm, data).unwrap();
    let out = enz()
        .args(["decay", "--pgm"])
        .arg(&pgm)
        .arg("--tv")
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty input"));
}

#[test]
fn decay_step_image_two_point_decay_then_zeros() {
    let tmp = tempfile::tempdir().unwrap();
    let pgm = tmp.path().join("step.pgm");
    // 4x4, left half dark, right half bright.
    let mut data = b"P5\n4 4\n255\n".to_vec();
    for _ in 0..4 {
        data.extend([0u8, 0, 255, 255]);
    }
    std::fs::write(&pgm, data).unwrap();
    let out = enz()
        .args(["decay", "--pgm"])
        .arg(&pgm)
        .arg("--tv")
        .arg("--out-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = std::fs::read_to_string(tmp.path().join("decay_series.csv")).unwrap();
    // dx series: per row one +1 jump and one wraparound -1, so the sorted
    // normalized decay is eight ones then zeros.
    let dx_values: Vec<f64> = series
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("0,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(dx_values.len(), 16);
    assert!(dx_values[..8].iter().all(|&v| v == 1.0));
    assert!(dx_values[8..].iter().all(|&v| v == 0.0));
}

fn assert_manifest_lists_outputs(dir: &Path) {
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for o in outputs {
        assert!(Path::new(o.as_str().unwrap()).exists());
    }
    assert!(manifest["tool_version"].as_str().unwrap().len() > 2);
}

#[test]
fn every_command_writes_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let vec_path = tmp.path().join("x.csv");
    std::fs::write(&vec_path, "1,2,3\n").unwrap();
    let m_dir = tmp.path().join("m");
    assert!(enz()
        .args(["measure", "--input"])
        .arg(&vec_path)
        .arg("--out-dir")
        .arg(&m_dir)
        .status()
        .unwrap()
        .success());
    assert_manifest_lists_outputs(&m_dir);

    let d_dir = tmp.path().join("d");
    assert!(enz()
        .args(["decay", "--inputs"])
        .arg(&vec_path)
        .arg("--out-dir")
        .arg(&d_dir)
        .status()
        .unwrap()
        .success());
    assert_manifest_lists_outputs(&d_dir);
}
