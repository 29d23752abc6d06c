use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fitts_teleport::comparison::{parse_records, Criterion};
use fitts_teleport::models::ModelKind;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fitts-teleport")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulate(dir: &Path, name: &str, seed: u64) -> PathBuf {
    let path = dir.join(name);
    let o = run(&["simulate", "--seed", &seed.to_string(), "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_full_study_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate(dir.path(), "a.csv", 42);
    let b = simulate(dir.path(), "b.csv", 42);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 8001);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let c = simulate(dir.path(), "c.csv", 43);
    assert_ne!(text, std::fs::read_to_string(&c).unwrap());
}

#[test]
fn config_without_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(&cfg, "preset = \"realistic\"\n").unwrap();
    let out = dir.path().join("log.csv");
    let o = run(&["simulate", "--config", s(&cfg), "--output", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
    assert!(!out.exists());

    // the command-line seed satisfies the requirement
    let o = run(&["simulate", "--config", s(&cfg), "--seed", "5", "--output", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("seed 5"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(&cfg, "seed = 1\nparticipant = 3\n").unwrap();
    let o = run(&["simulate", "--config", s(&cfg), "--output", s(&dir.path().join("x.csv"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_row_is_reported_with_its_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 1);
    let text = std::fs::read_to_string(&log).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // line 11 of the file is trial index 9
    let mut fields: Vec<String> = lines[10].split(',').map(String::from).collect();
    fields[9] = "-0.5".into();
    lines[10] = fields.join(",");
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let o = run(&["validate", "--input", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("line 11:"), "{}", stdout(&o));
    assert!(stdout(&o).contains("8000 trials, 1 violations"));

    let o = run(&["compare", "--input", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 11"), "{}", stderr(&o));

    let o = run(&["validate", "--input", s(&log)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("8000 trials, 0 violations"));
}

#[test]
fn missing_input_is_an_io_error() {
    let o = run(&["compare", "--input", "/nonexistent/log.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_with_input_code() {
    assert_eq!(code(&run(&["compare"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn compare_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 3);
    let out = dir.path().join("records.csv");
    let o = run(&[
        "compare",
        "--input",
        s(&log),
        "--amplitude-mode",
        "both",
        "--format",
        "records",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports = parse_records(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reports.len(), 16);
    for r in &reports {
        assert_eq!(r.entries.len(), 4);
        assert_eq!(r.entries.iter().filter(|e| e.delta_aic == 0.0).count(), 1);
    }
}

#[test]
fn throughput_emits_one_line_per_technique_and_posture() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 4);
    let o = run(&["throughput", "--input", s(&log)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 10);
    for v in &lines {
        assert!(v["tp_bits_per_s"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn missing_technique_is_incomplete_data() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 5);
    let text = std::fs::read_to_string(&log).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.contains(",RPDW,")).collect();
    let partial = dir.path().join("partial.csv");
    std::fs::write(&partial, kept.join("\n") + "\n").unwrap();
    let o = run(&["compare", "--input", s(&partial)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("RPDW"), "{}", stderr(&o));
}

#[test]
fn dropped_cell_needs_partial_grid_flag() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 6);
    let text = std::fs::read_to_string(&log).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| {
            let f: Vec<&str> = l.split(',').collect();
            !(f[1] == "RPLG" && f[2] == "Standing" && f[5] == "1.35" && f[6] == "9.0" && f[7] == "3.0")
        })
        .collect();
    let partial = dir.path().join("partial.csv");
    std::fs::write(&partial, kept.join("\n") + "\n").unwrap();
    let o = run(&["throughput", "--input", s(&partial)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let o = run(&["throughput", "--input", s(&partial), "--allow-partial-grid"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 10);
}

#[test]
fn noiseless_standard_study_ranks_standard_first() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(
        &cfg,
        "preset = \"model-exact\"\nseed = 11\nparticipants = 2\n\
         [ground_truth]\nmodel = \"Standard\"\ncoefficients = [-0.41, 0.83]\n\
         [noise]\nmt_sd_s = 0.0\n",
    )
    .unwrap();
    let log = dir.path().join("log.csv");
    let o = run(&["simulate", "--config", s(&cfg), "--output", s(&log)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["compare", "--input", s(&log), "--format", "records"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports = parse_records(&stdout(&o)).unwrap();
    let all = reports.iter().find(|r| r.group_label == "All").unwrap();
    assert_eq!(all.best(Criterion::Aic), ModelKind::Standard);
    let std_fit = &all.entry(ModelKind::Standard).fit;
    assert!((std_fit.coefficients[0] + 0.41).abs() < 1e-9);
    assert!((std_fit.coefficients[1] - 0.83).abs() < 1e-9);
}

#[test]
fn report_and_fit_produce_output() {
    let dir = tempfile::tempdir().unwrap();
    let log = simulate(dir.path(), "log.csv", 8);
    let o = run(&["report", "--input", s(&log)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    for needle in ["Trials: 8000", "Model comparison", "Throughput (bits/s)", "RPDW"] {
        assert!(text.contains(needle), "missing {needle}");
    }
    let o = run(&["fit", "--input", s(&log), "--model", "proposed"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // header plus one line per group
    assert_eq!(stdout(&o).lines().count(), 9);
    assert_eq!(code(&run(&["fit", "--input", s(&log), "--model", "quadratic"])), 2);
}
