use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey-lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn weights_reports_at_least_the_centered_a2_value() {
    let o = run(&["weights", "--power", "0.5", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("A_2 constant")).unwrap();
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value >= 4.0 / 3.0, "{value}");
}

#[test]
fn norm_of_an_indicator() {
    let o = run(&[
        "norm", "--space", "lebesgue", "--p", "1", "--indicator", "-1,1", "--half-width", "2", "--points", "129",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let value: f64 = stdout(&o).trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((value - 2.0).abs() < 0.05, "{value}");
}

#[test]
fn kernel_class_exit_codes() {
    assert_eq!(run(&["verify", "kernel-class", "--samples", "2000"]).status.code(), Some(0));
    let o = run(&["verify", "kernel-class", "--kernel", "angular-step", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn lemma_and_tail_checks_pass_on_defaults() {
    for check in ["lemma31", "lemma41", "tail"] {
        let o = run(&["verify", check]);
        assert_eq!(o.status.code(), Some(0), "{check}: {}", stdout(&o));
    }
}

#[test]
fn theorem_sweep_writes_csv_and_report_renders_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--out", out, "verify", "theorem", "1.3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = dir.path().join("theorem-1.3.csv");
    assert!(csv.exists());
    let o = run(&["report", "--input", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("theorem-1.3.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 20);
}

#[test]
fn json_format_and_apply_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--out", out, "--format", "json", "verify", "theorem", "1.4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.path().join("theorem-1.4.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 20);

    let o = run(&["--out", out, "apply", "--instance", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(dir.path().join("apply-1.3-5.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 4);
    assert_eq!(reader.records().count(), 129);
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "lattice = [").unwrap();
    let o = run(&["--config", broken.to_str().unwrap(), "verify", "theorem", "1.3"]);
    assert_eq!(o.status.code(), Some(2));

    let even = dir.path().join("even.toml");
    let text = include_str!("../configs/theorem13.toml").replace("points = 129", "points = 128");
    std::fs::write(&even, text).unwrap();
    let o = run(&["--config", even.to_str().unwrap(), "verify", "theorem", "1.3"]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(run(&["verify", "theorem", "2.7"]).status.code(), Some(2));
}

#[test]
fn violated_hypotheses_give_no_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kappa.toml");
    let text = include_str!("../configs/theorem13.toml").replace("kappa = 0.25", "kappa = 0.75");
    std::fs::write(&path, text).unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "verify", "theorem", "1.3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NO VERDICT"));
}
