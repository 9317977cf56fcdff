use std::path::Path;
use std::process::{Command, Output};

fn modheat(args: &[&str]) -> Output {
    modheat_env(args, &[])
}

fn modheat_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_modheat"));
    for (k, _) in std::env::vars() {
        if k.starts_with("MODHEAT_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn heat_matches_oracle_on_a_range() {
    let o = modheat(&["heat", "--t", "1", "--n", "-8..8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("t,n,K_formula,K_transfer,K_oracle,abs_err\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 17);
    for r in &rows {
        assert!(num(&r[5]) <= 1e-8, "{r:?}");
    }
}

#[test]
fn heat_at_time_zero_is_a_delta() {
    let o = modheat(&["heat", "--t", "0", "--n", "0..4"]);
    assert_eq!(o.status.code(), Some(0));
    let k: Vec<f64> = csv_rows(&o).iter().map(|r| num(&r[2])).collect();
    let want = [1.0, 0.0, 0.0, 0.0, 0.0];
    for (a, b) in k.iter().zip(want) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn heat_is_inverse_symmetric_at_two() {
    let a = csv_rows(&modheat(&["heat", "--t", "2", "--n", "2"]));
    let b = csv_rows(&modheat(&["heat", "--t", "2", "--n", "-2"]));
    assert!((num(&a[0][2]) - num(&b[0][2])).abs() < 1e-12);
}

#[test]
fn heat_json_is_deterministic() {
    let args = ["heat", "--t", "0.5,5", "--n", "-3..3", "--format", "json"];
    let a = modheat(&args);
    let b = modheat(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 14);
}

#[test]
fn spectrum_prints_twelve_digits() {
    let o = modheat(&["spectrum"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("band,0.012342251763,0.682460109570"), "{text}");
    assert!(text.contains("band,1.067539890430,1.737657748237"), "{text}");
    assert!(text.contains("eigenvalue,0.750000000000,0.750000000000"));
}

#[test]
fn finite_writes_one_csv_per_prime() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = modheat(&["finite", "--p", "2,3,5,7", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4);
    for (r, (p, size)) in rows.iter().zip([(2, 6), (3, 12), (5, 60), (7, 168)]) {
        assert_eq!(r[0], p.to_string());
        assert_eq!(r[1], size.to_string());
        assert!(num(&r[3]) >= 0.0);
        assert_eq!(&r[4..6], ["true", "true"]);
        let csv = std::fs::read_to_string(dir.path().join(format!("eigenvalues_p{p}.csv"))).unwrap();
        assert_eq!(csv.lines().next(), Some("p,index,eigenvalue"));
        assert_eq!(csv.lines().count(), size + 1);
    }
}

#[test]
fn finite_thirteen_has_1092_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = modheat(&["finite", "--p", "13", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("eigenvalues_p13.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1093);
}

#[test]
fn argument_errors_exit_two() {
    assert_eq!(modheat(&["finite", "--p", "4"]).status.code(), Some(2));
    assert_eq!(modheat(&["heat", "--t", "1", "--n", "500"]).status.code(), Some(2));
    assert_eq!(modheat(&["heat", "--t", "-1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(modheat(&["heat", "--t", "1", "--n", "3..1"]).status.code(), Some(2));
    assert_eq!(modheat(&["heat", "--t", "1"]).status.code(), Some(2));
    assert_eq!(modheat(&["spectrum", "--quad-tol", "0"]).status.code(), Some(2));
    assert_eq!(modheat(&["finite", "--p", "17"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_reports_the_verdict() {
    let o = modheat(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["prefactor_adjudication"]["verdict"], "fiber-normalized");
    let suites = v["suites"].as_array().unwrap();
    assert!(suites.iter().all(|s| s["passed"] == true));
    assert!(suites.len() >= 12);
    assert_eq!(modheat(&["verify"]).stdout, o.stdout);
}

#[test]
fn verify_with_tight_quadrature() {
    let measure = |o: &Output| -> f64 {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let s = v["suites"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["name"] == "completeness")
            .unwrap()
            .clone();
        assert_eq!(s["passed"], true);
        s["measured"].as_f64().unwrap()
    };
    let loose = modheat(&["verify", "--quad-tol", "1e-6"]);
    let tight = modheat(&["verify", "--quad-tol", "1e-13"]);
    assert_eq!(tight.status.code(), Some(0));
    assert!(measure(&tight) <= measure(&loose));
}

#[test]
fn corrupted_weight_fails_covering() {
    let o = modheat(&["verify", "--corrupt-line-weight"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cov = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "covering")
        .unwrap()
        .clone();
    assert_eq!(cov["passed"], false);
    assert!(cov["detail"].as_str().unwrap().starts_with("witness:"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn configuration_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.conf",
        "# test\noutput_format = json\noracle_window = 30\n",
    );
    let o = modheat(&["spectrum", "--config", &cfg]);
    assert!(stdout(&o).trim_start().starts_with('{'));
    let o = modheat_env(&["spectrum", "--config", &cfg], &[("MODHEAT_OUTPUT_FORMAT", "csv")]);
    assert!(stdout(&o).starts_with("component,"));
    let o = modheat_env(
        &["spectrum", "--config", &cfg, "--format", "json"],
        &[("MODHEAT_OUTPUT_FORMAT", "csv")],
    );
    assert!(stdout(&o).trim_start().starts_with('{'));
    // the file's oracle window rejects n = 40
    assert_eq!(
        modheat(&["heat", "--config", &cfg, "--t", "1", "--n", "40"])
            .status
            .code(),
        Some(2)
    );
    let o = modheat(&[
        "heat",
        "--config",
        &cfg,
        "--oracle-window",
        "50",
        "--t",
        "1",
        "--n",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = modheat_env(&["heat", "--t", "1", "--n", "0"], &[("MODHEAT_CONFIG", &cfg)]);
    assert!(stdout(&o).trim_start().starts_with('['));
    let bad = write(dir.path(), "bad.conf", "speed = 11\n");
    assert_eq!(modheat(&["spectrum", "--config", &bad]).status.code(), Some(2));
    assert_eq!(
        modheat(&["spectrum", "--config", "/nonexistent/x.conf"]).status.code(),
        Some(2)
    );
    assert_eq!(
        modheat_env(&["spectrum"], &[("MODHEAT_QUAD_TOL", "-1")]).status.code(),
        Some(2)
    );
}
