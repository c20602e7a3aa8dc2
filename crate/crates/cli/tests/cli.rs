use std::fs;
use std::process::{Command, Output};

fn dho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dho")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    fs::write(f.path(), text).unwrap();
    f
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, body)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn verify_default_passes() {
    let o = dho(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains(" 0 failed"));
    assert!(text.contains("1.000000000000:2.000000000000:4.000000000000:8.000000000000"));
    assert!(text.lines().nth(1).unwrap().ends_with("PASS"));
}

#[test]
fn verify_without_damping_is_a_precondition_error() {
    let o = dho(&["verify", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma > 0"));
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_without_damping_and_half_line_disabled() {
    let cfg = config("gamma = 0.0\n[verify]\nhalf_line = false\n");
    let o = dho(&["verify", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn mismatched_kms_convention_fails_verification() {
    let cfg = config("[verify]\nconvention = \"reversed\"\n");
    let o = dho(&["verify", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o).lines().find(|l| l.starts_with("kms_condition")).unwrap().to_string();
    assert!(line.ends_with("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let cfg = config("omgea = 1.0\n");
    assert_eq!(dho(&["evolve", "--config", cfg.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dho(&["evolve", "--config", "/nonexistent/dho.toml"]).status.code(), Some(2));
    assert_eq!(dho(&["evolve", "--dt", "-1"]).status.code(), Some(2));
    assert_eq!(dho(&["evolve", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(dho(&["spectrum", "--gamma", "0.05"]).status.code(), Some(2));
}

#[test]
fn evolve_rows() {
    let o = dho(&["evolve", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, body) = rows(&stdout(&o));
    assert_eq!(header, ["t", "T_1_1", "T_1_2", "T_2_1", "T_2_2", "sigma_max", "oracle_residual"]);
    assert_eq!(&body[0][1..5], &[1.0, 0.0, 0.0, 1.0]);
    for row in &body {
        let t = row[0];
        assert!(row[6] < 1e-9);
        assert!(row[5] <= 1.0 && row[5] >= (-t).exp() * (1.0 - 1e-12));
    }
}

#[test]
fn evolve_undamped_is_orthogonal() {
    let (_, body) = rows(&stdout(&dho(&["evolve", "--gamma", "0"])));
    for row in &body {
        assert!((row[5] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn critical_decay_follows_reference() {
    let o = dho(&["decay", "--gamma", "1", "--omega", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, body) = rows(&stdout(&o));
    assert_eq!(header, ["t", "one_particle", "grid", "fock", "reference"]);
    assert_eq!(body[0][0], 0.0);
    assert!((body[0][1] - 1.0).abs() < 1e-15);
    for row in &body {
        assert!((row[1] - row[4]).abs() < 1e-6);
        assert!((row[1] - row[2]).abs() < 1e-6);
        assert!((row[1] - row[3]).abs() < 1e-6);
    }
}

#[test]
fn spectrum_peaks_at_damped_frequency() {
    let o = dho(&["spectrum", "--gamma", "0.05", "--t-max", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, body) = rows(&stdout(&o));
    let (e, closed, dev) = (column(&header, "E"), column(&header, "closed_power"), column(&header, "deviation"));
    let step = 6.0 / 600.0;
    let peak = body.iter().max_by(|a, b| a[closed].total_cmp(&b[closed])).unwrap();
    let wd = (1.0_f64 - 0.05 * 0.05).sqrt();
    assert!((peak[e].abs() - wd).abs() <= step);
    assert!(body.iter().all(|r| r[dev] < 1e-4));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = dho(&["decay", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    assert_eq!(first, dho(&["decay"]).stdout);
}

#[test]
fn flags_override_config() {
    let cfg = config("gamma = 0.1\nt_samples = [1.0]\n");
    let path = cfg.path().to_str().unwrap();
    let from_file = stdout(&dho(&["evolve", "--config", path]));
    let overridden = stdout(&dho(&["evolve", "--config", path, "--gamma", "0.5"]));
    let default = stdout(&dho(&["evolve", "--gamma", "0.5"]));
    assert_ne!(from_file, overridden);
    assert!(default.contains(overridden.lines().nth(1).unwrap()));
}
