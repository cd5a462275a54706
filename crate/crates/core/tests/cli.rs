//! The `radio-election` binary: exit codes, table shapes and output files.

use std::process::{Command, Output};

use radio_election::cli::ExperimentRecord;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radio-election"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    (headers, rdr.records().map(Result::unwrap).collect())
}

fn field<'a>(headers: &csv::StringRecord, row: &'a csv::StringRecord, name: &str) -> &'a str {
    &row[headers
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))]
}

#[test]
fn simulate_writes_summary_row() {
    let o = run(&[
        "simulate", "--algo", "1", "--n", "1024", "--alpha", "1.0767", "--trials", "1000", "--seed", "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (headers, rows) = csv_rows(&stdout(&o));
    assert_eq!(headers.len(), 15);
    assert_eq!(rows.len(), 1);
    assert_eq!(field(&headers, &rows[0], "n"), "1024");
    assert_eq!(field(&headers, &rows[0], "j_star"), "32");
    assert_eq!(field(&headers, &rows[0], "nonterminated"), "0");
    let rounds: f64 = field(&headers, &rows[0], "mean_rounds").parse().unwrap();
    let bound: f64 = field(&headers, &rows[0], "rounds_bound").parse().unwrap();
    assert!(rounds < bound);
}

#[test]
fn invalid_parameters_exit_one() {
    let o = run(&["simulate", "--alpha", "0.9", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha must be > 1"));
    assert_eq!(run(&["simulate", "--n", "1", "--trials", "10"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--n", "abc"]).status.code(), Some(1));
}

#[test]
fn theory_reports_j_star() {
    let o = run(&["theory", "--algo", "1", "--n", "65536", "--alpha", "2.0"]);
    assert_eq!(o.status.code(), Some(0));
    let (headers, rows) = csv_rows(&stdout(&o));
    assert_eq!(field(&headers, &rows[0], "j_star"), "4");
}

#[test]
fn theory_optimal_alpha() {
    let o = run(&["theory", "--algo", "1", "--optimal"]);
    let (headers, rows) = csv_rows(&stdout(&o));
    let alpha: f64 = field(&headers, &rows[0], "alpha_tilde").parse().unwrap();
    let c: f64 = field(&headers, &rows[0], "c_min").parse().unwrap();
    assert!(
        (alpha - 1.0767).abs() < 1e-3 && (c - 29.058).abs() < 0.05,
        "{alpha} {c}"
    );
}

#[test]
fn sweep_covers_the_grid() {
    let o = run(&[
        "sweep",
        "--n",
        "64,256,1024",
        "--alpha",
        "1.05,1.1",
        "--algo",
        "2",
        "--trials",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (headers, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    // alpha = 1.1 is past 1/(1 - p2*) for the weak protocol: bounds empty.
    for row in &rows {
        let alpha = field(&headers, row, "alpha");
        assert_eq!(field(&headers, row, "time_bound").is_empty(), alpha == "1.1");
    }
}

#[test]
fn verify_only_constants() {
    let o = run(&["verify", "--only", "constants"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("PASS  3 constants"), "{text}");
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .count(),
        1
    );
}

#[test]
fn verify_failure_exits_two() {
    // The V-form residual check fails as stated; see the README.
    let o = run(&["verify", "--only", "mellin"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("failed: mellin"));
}

#[test]
fn json_records_round_trip_and_runs_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.ndjson");
    let runs = dir.path().join("runs.csv");
    let o = run(&[
        "simulate",
        "--algo",
        "2",
        "--n",
        "32,64",
        "--trials",
        "40",
        "--format",
        "json",
        "--deterministic-output",
        "--out",
        out.to_str().unwrap(),
        "--runs-out",
        runs.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        let record: ExperimentRecord = serde_json::from_str(line).unwrap();
        assert_eq!(record.timestamp, 0);
        assert_eq!(record.summary.trials, 40);
        assert_eq!(serde_json::to_string(&record).unwrap(), line);
    }
    let (_, run_rows) = csv_rows(&std::fs::read_to_string(&runs).unwrap());
    assert_eq!(run_rows.len(), 80);
}

#[test]
fn deterministic_output_is_byte_identical() {
    let args = [
        "simulate",
        "--n",
        "128,256",
        "--trials",
        "200",
        "--seed",
        "3",
        "--deterministic-output",
    ];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    let c = run(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn mellin_and_round_prob_tables() {
    let o = run(&["mellin", "--variant", "u", "--m", "1", "--n", "1048576"]);
    let (headers, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(field(&headers, &rows[0], "within_bound"), "true");

    let o = run(&["mellin", "--amplitudes"]);
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 60);

    let o = run(&[
        "round-prob",
        "--algo",
        "1,2",
        "--n",
        "2",
        "--alpha",
        "1.0000000000001",
        "--round",
        "1",
        "--trials",
        "1000",
    ]);
    let (headers, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(field(&headers, &rows[0], "exact_p"), "0.5");
    assert_eq!(field(&headers, &rows[1], "exact_p"), "0.125");
}
