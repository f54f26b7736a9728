use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn duetdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duetdyn"))
        .args(args)
        .env("DUETDYN_THREADS", "2")
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn evolve_rabi_half_period() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rabi.csv");
    let out = duetdyn(&[
        "evolve",
        "--c",
        "0",
        "--gamma-rate",
        "0",
        "--z0",
        "1",
        "--t-final",
        "3.141592653589793",
        "--dt",
        "1e-3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let data = rows(&path);
    let last = data.last().unwrap();
    assert_eq!(last[2], std::f64::consts::PI);
    assert!((last[4] - 1.0).abs() < 1e-6, "rho_ll = {}", last[4]);
}

#[test]
fn evolve_coupling_rescales_time() {
    let dir = tempfile::tempdir().unwrap();
    let unit = dir.path().join("unit.csv");
    let doubled = dir.path().join("doubled.csv");
    let common = [
        "evolve",
        "--c",
        "2",
        "--gamma-rate",
        "0.1",
        "--op",
        "sigma_plus",
        "--t-final",
        "5",
        "--record-stride",
        "100",
    ];
    let a = duetdyn(&[&common[..], &["--out", unit.to_str().unwrap()]].concat());
    let b = duetdyn(
        &[
            &common[..],
            &["--v", "2", "--out", doubled.to_str().unwrap()],
        ]
        .concat(),
    );
    assert!(a.status.success() && b.status.success());
    let (a, b) = (rows(&unit), rows(&doubled));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((y[2] - x[2] / 2.0).abs() < 1e-12);
        assert_eq!(y[0], 2.0 * x[0]);
        assert!((x[7] - y[7]).abs() < 1e-9);
    }
}

#[test]
fn sigma_plus_equals_custom_operator() {
    let dir = tempfile::tempdir().unwrap();
    let preset = dir.path().join("preset.csv");
    let custom = dir.path().join("custom.csv");
    let common = [
        "evolve",
        "--c",
        "1.5",
        "--gamma-rate",
        "0.1",
        "--t-final",
        "5",
        "--record-stride",
        "50",
    ];
    let a = duetdyn(
        &[
            &common[..],
            &["--op", "sigma_plus", "--out", preset.to_str().unwrap()],
        ]
        .concat(),
    );
    let b = duetdyn(
        &[
            &common[..],
            &[
                "--op",
                "custom",
                "--lambdas",
                "1,i,0",
                "--out",
                custom.to_str().unwrap(),
            ],
        ]
        .concat(),
    );
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(fs::read(&preset).unwrap(), fs::read(&custom).unwrap());
}

#[test]
fn guard_violation_exits_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let out = duetdyn(&[
        "evolve",
        "--gamma-rate",
        "5",
        "--dt",
        "0.5",
        "--t-final",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("at t ="), "{err}");
    assert!(err.contains("gamma_rate = 5"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["evolve", "--bogus"][..],
        &["evolve", "--op", "custom", "--out", "x.csv"][..],
        &[
            "evolve",
            "--op",
            "sigma_x",
            "--lambdas",
            "1,0,0",
            "--out",
            "x.csv",
        ][..],
        &["figures", "fig9", "--out-dir", "x"][..],
        &[][..],
    ] {
        assert_eq!(duetdyn(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn invalid_parameters_exit_with_failure() {
    let out = duetdyn(&["evolve", "--z0", "1.5", "--out", "unused.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new("unused.csv").exists());
}

#[test]
fn validate_reports_every_check() {
    let out = duetdyn(&["validate"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 9);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn figures_write_one_csv_per_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = duetdyn(&["figures", "fig6", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["fig6_gamma0.01.csv", "fig6_gamma0.csv"]);
    let open = rows(&dir.path().join("fig6_gamma0.01.csv"));
    assert_eq!(open.len(), 5001);
    assert!(open.iter().all(|r| r[0] == 2.0 && r[1] == 0.01));
}

#[test]
fn sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let csv_out = dir.path().join("sweep.csv");
    fs::write(
        &config,
        format!(
            r#"{{
  "base": {{ "lindblad": {{ "preset": "sigma_plus" }} }},
  "c_axis": {{ "min": 0.0, "max": 4.0, "steps": 5 }},
  "gamma_axis": [0.1],
  "init": {{ "z0": 1.0 }},
  "grid": {{ "t_final": 4.0, "dt": 0.001, "record_stride": 1000 }},
  "summary_window": [2.0, 4.0],
  "output": {{ "path": {csv_out:?}, "format": "csv" }}
}}"#
        ),
    )
    .unwrap();
    let out = duetdyn(&["sweep", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let data = rows(&csv_out);
    assert_eq!(data.len(), 5 * 5);
    assert_eq!(data[0][..3], [0.0, 0.1, 0.0]);
}

#[test]
fn sweep_with_missing_config_fails() {
    let out = duetdyn(&["sweep", "--config", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/run.json"));
}
