use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .arg("--quiet")
        .current_dir(dir)
        .env_remove("VERIFY_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--suite",
        "check_weak_malpha,check_welland,check_discreta,check_orlicz_strong",
        "--instances",
        "6",
        "--grids",
        "16,32",
    ];
    for jobs in ["1", "8"] {
        let mut args = common.to_vec();
        args.extend(["--jobs", jobs, "--out", jobs]);
        let out = verify(&args, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for ext in ["json", "tsv"] {
        let a = std::fs::read(dir.path().join(format!("1.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("8.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} differs");
    }
}

#[test]
fn default_pipeline_has_no_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(
        &[
            "--suite", "all", "--n", "1", "--m", "2", "--alpha", "1.0", "--p", "1.3333,1.3333", "--grids", "32,64",
            "--seed", "42", "--instances", "4", "--out", "report",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("report.json"));
    let reports = r["reports"].as_array().unwrap();
    assert!(reports.len() >= 17);
    for rep in reports {
        let v = rep["verdict"].as_str().unwrap();
        assert!(v == "EXACT-PASS" || v == "STABLE-PASS", "{} gave {v}", rep["check"]);
    }
    // defaults are recorded for provenance
    assert_eq!(r["config"]["delta"], 1.0);
    assert_eq!(r["config"]["r"], 2.0);
    assert!(dir.path().join("report.tsv").exists());
}

#[test]
fn welland_on_constants_reports_a_ratio_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(
        &[
            "--suite", "check_welland", "--eps", "0.25", "--functions", "const:1;const:1", "--weights", "const:1",
            "--grids", "16,32,64",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&dir.path().join("report.json"));
    let rep = &r["reports"][0];
    assert_eq!(rep["instances"], 1);
    assert_eq!(rep["refinement"].as_array().unwrap().len(), 3);
    assert!(rep["constant"].as_f64().unwrap().is_finite());
    let tsv = std::fs::read_to_string(dir.path().join("report.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 4);
}

#[test]
fn singular_weights_skip_the_orlicz_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(
        &[
            "--suite", "check_orlicz_strong", "--B", "llogl:1", "--weights", "power:(1,0.5)", "--instances", "3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("report.json"));
    assert_eq!(r["reports"][0]["verdict"], "SKIPPED");
    assert!(r["reports"][0]["reason"].as_str().unwrap().contains("hypothesis"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["--suite", "check_nonexistent"],
        &["--grids", "64"],
        &["--grids", "64,32"],
        &["--grids", "32,48"],
        &["--p", "2.5,1.5"],
        &["--B", "nonsense:1"],
        &["--weights", "wobble:(1)", "--suite", "check_weak_malpha"],
    ];
    for args in cases {
        let out = verify(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = verify(&["--p", "2.5,1.5"], dir.path());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("p_1"), "{msg}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "checks = [\"check_dospesos\"]\ngrids = [16, 32]\ninstances = 2\nseed = 7\n\n[run]\nout = \"from_file\"\n",
    )
    .unwrap();
    let out = verify(&["--config", cfg.to_str().unwrap(), "--seed", "9"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("from_file.json"));
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["config"]["instances"], 2);
    assert_eq!(r["reports"][0]["check"], "check_dospesos");

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    let out = verify(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested");
    let out = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(["--suite", "check_p_le_1", "--grids", "16,32", "--instances", "2", "--out", "x/run", "--quiet"])
        .current_dir(dir.path())
        .env("VERIFY_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("run.json").exists());
    assert!(target.join("run.tsv").exists());
}
