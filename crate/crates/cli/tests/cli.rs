use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.lctrs"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lctrs")).args(args).output().expect("binary runs")
}

fn first_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().to_string()
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

#[test]
fn verdicts_on_the_corpus() {
    let expected = [
        ("absolute", "YES"),
        ("ackermann", "YES"),
        ("almost_parallel", "YES"),
        ("completion_faulty", "MAYBE"),
        ("completion_fixed", "YES"),
        ("extra_variables", "YES"),
        ("max", "YES"),
        ("nonconfluent_calc", "MAYBE"),
        ("parallel", "YES"),
        ("square_root", "MAYBE"),
        ("value_patterns", "YES"),
    ];
    for (name, verdict) in expected {
        let out = run(&["--timeout", "30", &path(name)]);
        assert_eq!(first_line(&out), verdict, "{name}");
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}

#[test]
fn sequential_mode_names_the_method() {
    let out = run(&["--sequential", "--timeout", "30", &path("max")]);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[..2], ["YES", "strongly closed"]);
    assert!(text.contains("critical pairs: 6"));
    assert!(text.contains("trivial by"));
}

#[test]
fn no_psi_loses_the_extra_variable_proof() {
    let out = run(&["--sequential", "--no-psi", "--timeout", "30", &path("extra_variables")]);
    assert_eq!(first_line(&out), "MAYBE");
}

#[test]
fn criteria_selection_restricts_the_methods() {
    let out = run(&["--criteria", "o,wo", "--timeout", "30", &path("max")]);
    assert_eq!(first_line(&out), "MAYBE");
    let out = run(&["--criteria", "nope", &path("max")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("lctrs-cli-malformed-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.lctrs");
    std::fs::write(&file, "RULES f(x -> x;").unwrap();
    let out = run(&[file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty(), "no diagnostic");
    let out = run(&[dir.join("missing.lctrs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_solver_exits_with_three() {
    let out = run(&["--solver", "/nonexistent/solver-binary", &path("max")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tiny_timeout_reports_timeout() {
    let out = run(&["--timeout", "0.001", &path("completion_faulty")]);
    assert_eq!(first_line(&out), "TIMEOUT");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn machine_readable_output() {
    let out = run(&["--sequential", "--format", "kv", "--timeout", "30", &path("parallel")]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "verdict=YES"), "{text}");
    assert!(text.lines().any(|l| l == "method=parallel closed" || l == "method=parallel_closed"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("time_ms=")));
}

#[test]
fn bench_over_empty_directory() {
    let dir = std::env::temp_dir().join(format!("lctrs-cli-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&["--bench", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "total: 0");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bench_with_tiny_timeout_times_out_everywhere() {
    let dir = corpus("max").parent().unwrap().to_path_buf();
    let out = run(&["--bench", dir.to_str().unwrap(), "--timeout", "0.001", "--format", "kv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("file=")).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.contains("verdict=TIMEOUT")), "{text}");
}

#[test]
fn bench_summary_over_the_corpus() {
    let dir = corpus("max").parent().unwrap().to_path_buf();
    let out = run(&["--bench", dir.to_str().unwrap(), "--timeout", "30", "--format", "kv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "total=11"), "{text}");
    assert!(text.lines().any(|l| l == "verdict.YES=8"), "{text}");
    assert!(text.lines().any(|l| l == "verdict.MAYBE=3"), "{text}");
}

#[test]
fn verdict_is_stable_across_concurrent_runs() {
    for name in ["max", "almost_parallel", "nonconfluent_calc"] {
        let first = first_line(&run(&["--timeout", "30", &path(name)]));
        for _ in 0..3 {
            assert_eq!(first_line(&run(&["--timeout", "30", &path(name)])), first, "{name}");
        }
    }
}
