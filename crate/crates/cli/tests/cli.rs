use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-class")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Data rows of a CSV file, split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn morse_rows_follow_the_normalizability_cut() {
    let o =
        run(&["spectrum", "--class", "morse", "--alpha", "1", "--tau", "0.1", "--rho", "0.7853981634", "--nmax", "20"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 21);
    let admitted: Vec<u32> = rows.iter().filter(|r| r[2] == "admitted").map(|r| r[0].parse().unwrap()).collect();
    // the typed ρ sits just above π/4, so v_10 is a tiny positive number
    assert_eq!(admitted, (0..=10).collect::<Vec<_>>());
    for r in rows.iter().filter(|r| r[2] == "skipped") {
        assert!(!r[3].is_empty(), "skipped row without a reason: {r:?}");
    }
    assert!(rows[15..].iter().all(|r| r[3].contains("n_max")));
}

#[test]
fn zero_energy_has_a_single_level() {
    let o = run(&["spectrum", "--class", "zero-energy", "--beta", "-2", "--l", "1", "--lambda", "1"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[0][2], "admitted");
}

#[test]
fn free_coulomb_levels_sit_at_rest_energy() {
    let o = run(&["spectrum", "--class", "coulomb", "--Z", "0", "--kappa", "-1", "--nmax", "4"]);
    assert_eq!(code(&o), 0);
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn validation_errors_exit_one() {
    let o = run(&["spectrum", "--class", "coulomb", "--kappa", "-1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--Z is required"));
    let o = run(&["spectrum", "--class", "coulomb", "--Z", "-3", "--kappa", "-1", "--alpha", "0.5"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["spectrum", "--class", "oscillator", "--kappa", "1", "--nmin", "3", "--nmax", "1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn spectrum_json_lists_levels() {
    let o = run(&["spectrum", "--class", "oscillator", "--kappa", "1", "--nmax", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    let e0 = levels[0]["energy"].as_f64().unwrap();
    assert!((e0 - 7f64.sqrt()).abs() < 1e-14);
}

#[test]
fn oscillator_ground_state_file_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let o = run(&[
        "wavefunction",
        "--class",
        "oscillator",
        "--kappa",
        "1",
        "--n",
        "0",
        "--grid",
        "uniform:4000:12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("r,phi,theta\n"));
    assert!(!text.contains('\r'));
    let data: Vec<[f64; 3]> =
        rows(&text).iter().map(|r| [r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()]).collect();
    assert_eq!(data.len(), 4000);
    let upper: f64 = data.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1].powi(2) + w[1][1].powi(2))).sum();
    assert!((upper - 1.0).abs() < 1e-6, "{upper}");
    // 17 significant digits
    let first = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = first.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn zero_energy_upper_component_is_positive() {
    let o = run(&["wavefunction", "--class", "zero-energy", "--beta", "-2", "--l", "1", "--grid", "log:2000:0.05:50"]);
    assert_eq!(code(&o), 0);
    for r in rows(&stdout(&o)) {
        assert!(r[1].parse::<f64>().unwrap() > 0.0, "{r:?}");
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn wavefunction_needs_a_grid() {
    for extra in [&[][..], &["--grid", ""][..]] {
        let mut args = vec!["wavefunction", "--class", "oscillator", "--kappa", "1"];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(code(&o), 1);
        assert!(String::from_utf8_lossy(&o.stderr).contains("grid required"));
    }
    let o = run(&["wavefunction", "--class", "oscillator", "--kappa", "1", "--grid", "cubic:10"]);
    assert_eq!(code(&o), 1);
}

fn report(args: &[&str]) -> (i32, Value) {
    let o = run(args);
    (code(&o), serde_json::from_str(&stdout(&o)).unwrap())
}

fn assert_report_shape(v: &Value, suite: &str) {
    assert_eq!(v["schema"], 1);
    assert_eq!(v["suite"], suite);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    for c in checks {
        assert!(!c["paper_ref"].as_str().unwrap().is_empty());
        assert!(c["threshold"].is_f64());
        assert!(c["pass"].is_boolean());
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["residuals", "spectra", "algebra", "xpct", "so21"] {
        let (c, v) = report(&["verify", "--suite", suite]);
        assert_report_shape(&v, suite);
        let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] != true).collect();
        assert!(failed.is_empty(), "{suite}: {failed:?}");
        assert_eq!(c, 0);
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn verify_failure_exits_two() {
    let (c, v) = report(&["verify", "--suite", "algebra", "--tol", "algebra.susy.pairing=1e-30"]);
    assert_eq!(c, 2);
    assert_eq!(v["pass"], false);
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "algebra.susy.pairing").unwrap();
    assert!((check["threshold"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
    assert_eq!(check["pass"], false);
}

#[test]
fn verify_usage_errors_exit_one() {
    assert_eq!(code(&run(&["verify", "--suite", "nonsense"])), 1);
    assert_eq!(code(&run(&["verify", "--suite", "xpct", "--tol", "xpct.nothing=1"])), 1);
    assert_eq!(code(&run(&["verify", "--suite", "xpct", "--tol", "xpct.maps.exact"])), 1);
}

#[test]
fn xpct_square_gives_coulomb() {
    let o = run(&["xpct", "--family", "square", "--kappa-hat", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("kappa: 0.75\n"), "{text}");
    assert!(text.contains("class: coulomb\n"));
    assert!(text.contains("identity check: constant"));
}

#[test]
fn xpct_excluded_mu_exits_one() {
    let o = run(&["xpct", "--family", "power", "--mu", "0.5"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded"));
}

#[test]
fn xpct_neglog_gives_morse() {
    let o = run(&["xpct", "--family", "neglog", "--tau", "1", "--rho", "0.5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kappa"].as_f64(), Some(0.0));
    assert_eq!(v["class"], "morse");
    let want = format!("{} exp(-1 r)", -0.5 / 0.5f64.cos());
    assert_eq!(v["w"], want);
    assert_eq!(v["identity"]["constant"], true);
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "class = coulomb\nZ = -40\nkappa = 2\nalpha = 0.0072973525693\nnmax = 8\n");
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("s{i}.csv"));
            assert_eq!(code(&run(&["spectrum", "--config", &conf, "--out", out.to_str().unwrap()])), 0);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let grid = ["--grid", "log:3000:1e-6:5"];
    let a = run(&[&["wavefunction", "--config", &conf][..], &grid[..]].concat());
    let b = run(&[&["wavefunction", "--config", &conf][..], &grid[..]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let (_, x) = report(&["verify", "--suite", "xpct"]);
    let (_, y) = report(&["verify", "--suite", "xpct"]);
    assert_eq!(x, y);
}

#[test]
fn command_line_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "# oscillator defaults\nclass = oscillator\nkappa = 1\nnmax = 1\n");
    let o = run(&["spectrum", "--config", &conf]);
    assert_eq!(rows(&stdout(&o)).len(), 2);
    let o = run(&["spectrum", "--config", &conf, "--nmax", "3"]);
    assert_eq!(rows(&stdout(&o)).len(), 4);
    let bad = write_config(dir.path(), "kappa\n");
    assert_eq!(code(&run(&["spectrum", "--config", &bad])), 1);
    assert_eq!(code(&run(&["spectrum", "--config", "/nonexistent/run.conf"])), 1);
}
