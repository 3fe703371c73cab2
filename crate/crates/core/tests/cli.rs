//! End-to-end tests of the command-line binary: flag handling, exit codes,
//! stream separation (CSV on stdout, diagnostics on stderr), and bytewise
//! reproducibility across processes and thread counts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hetnet-sim"))
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

/// Writes a throwaway scenario file unique to this test process.
fn write_temp_scenario(tag: &str, content: &str) -> PathBuf {
    let path =
        std::env::temp_dir().join(format!("hetnet-sim-test-{}-{tag}.scn", std::process::id()));
    fs::write(&path, content).expect("writing temp scenario");
    path
}

fn stdout_str(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("stdout is UTF-8")
}

fn stderr_str(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).expect("stderr is UTF-8")
}

const CURVE_HEADER: &str = "sweep_value,mode,mean_throughput_bps,ci95_bps,mean_handovers";

// ---------------------------------------------------------------------------
// Happy path
// ---------------------------------------------------------------------------

#[test]
fn default_run_emits_csv_on_stdout_and_waivers_on_stderr() {
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("isolated.scn"))
        .args(["--trials", "5"])
        .output()
        .expect("binary runs");

    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        stderr_str(&output)
    );
    let stdout = stdout_str(&output);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], CURVE_HEADER);
    assert_eq!(
        lines.len(),
        1 + 15 * 3,
        "expected one header plus 15 points x 3 modes, got {}",
        lines.len()
    );
    // The default antenna gain sits below the licensed band's minimum, which
    // the default scenario waives rather than enforces; the waiver must be
    // visible on stderr and must not pollute the CSV.
    assert!(
        stderr_str(&output).contains("waiver:"),
        "expected a waiver line on stderr, got: {}",
        stderr_str(&output)
    );
    assert!(!stdout.contains("waiver"), "stdout must stay pure CSV");
}

#[test]
fn mode_flag_restricts_output_to_one_curve() {
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("isolated.scn"))
        .args(["--trials", "5", "--mode", "v"])
        .output()
        .expect("binary runs");

    assert_eq!(output.status.code(), Some(0));
    let lines: Vec<&str> = stdout_str(&output).lines().collect();
    assert_eq!(lines.len(), 1 + 15, "one curve expected");
    for row in &lines[1..] {
        assert_eq!(
            row.split(',').nth(1),
            Some("v"),
            "row from a v-only run names another mode: {row}"
        );
    }
}

#[test]
fn density_sweep_uses_interferer_counts_as_sweep_values() {
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("density.scn"))
        .args(["--trials", "5", "--sweep", "density", "--mode", "e"])
        .output()
        .expect("binary runs");

    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        stderr_str(&output)
    );
    let lines: Vec<&str> = stdout_str(&output).lines().collect();
    let values: Vec<f64> = lines[1..]
        .iter()
        .map(|row| row.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(
        values,
        vec![0.0, 1.0, 2.0, 4.0, 8.0, 16.0],
        "density sweep must walk the scenario's interferer counts"
    );
}

#[test]
fn out_and_decisions_flags_write_files() {
    let out =
        std::env::temp_dir().join(format!("hetnet-sim-test-{}-curves.csv", std::process::id()));
    let dec = std::env::temp_dir().join(format!("hetnet-sim-test-{}-dec.csv", std::process::id()));
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("isolated.scn"))
        .args(["--trials", "4", "--mode", "hybrid"])
        .arg("--out")
        .arg(&out)
        .arg("--decisions")
        .arg(&dec)
        .output()
        .expect("binary runs");

    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        stderr_str(&output)
    );
    assert!(stdout_str(&output).is_empty(), "--out must silence stdout");

    let curves = fs::read_to_string(&out).expect("curve file written");
    assert!(curves.starts_with(CURVE_HEADER));
    assert_eq!(curves.lines().count(), 1 + 15);

    let decisions = fs::read_to_string(&dec).expect("decisions file written");
    assert!(decisions.starts_with("sweep_value,mode,trial,user,bands,reason"));
    // 15 points x 4 trials x 1 user, plus the header.
    assert_eq!(decisions.lines().count(), 1 + 15 * 4);
    assert!(
        decisions.lines().skip(1).all(|l| l.contains(",hybrid,")),
        "all decision rows come from the hybrid run"
    );

    fs::remove_file(out).ok();
    fs::remove_file(dec).ok();
}

#[test]
fn validate_only_reports_compliance_and_emits_no_csv() {
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("reference.scn"))
        .arg("--validate-only")
        .output()
        .expect("binary runs");

    assert_eq!(output.status.code(), Some(0));
    assert!(
        stdout_str(&output).is_empty(),
        "validation must not print CSV"
    );
    let stderr = stderr_str(&output);
    assert!(
        stderr.contains("scenario is compliant"),
        "missing compliance line: {stderr}"
    );
    assert!(
        stderr.contains("waiver:"),
        "waivers must still be listed: {stderr}"
    );
}

// ---------------------------------------------------------------------------
// Reproducibility across processes
// ---------------------------------------------------------------------------

#[test]
fn identical_invocations_are_byte_identical_across_thread_counts() {
    let run = |threads: Option<&str>| {
        let mut cmd = binary();
        cmd.args(["--scenario"])
            .arg(scenario_path("isolated.scn"))
            .args(["--trials", "12", "--seed", "9"]);
        if let Some(n) = threads {
            cmd.env("RAYON_NUM_THREADS", n);
        }
        let output = cmd.output().expect("binary runs");
        assert_eq!(output.status.code(), Some(0));
        output.stdout
    };

    let first = run(None);
    assert_eq!(first, run(None), "same flags, same bytes");
    assert_eq!(first, run(Some("1")), "single-threaded run diverged");
    assert_eq!(first, run(Some("4")), "four-thread run diverged");
}

#[test]
fn seed_flag_changes_the_sampled_curves() {
    let run = |seed: &str| {
        let output = binary()
            .args(["--scenario"])
            .arg(scenario_path("isolated.scn"))
            .args(["--trials", "12", "--mode", "e", "--seed", seed])
            .output()
            .expect("binary runs");
        assert_eq!(output.status.code(), Some(0));
        output.stdout
    };
    assert_ne!(
        run("1"),
        run("2"),
        "different seeds must sample different trials"
    );
}

// ---------------------------------------------------------------------------
// Failure paths and exit codes
// ---------------------------------------------------------------------------

#[test]
fn missing_scenario_file_exits_two() {
    let output = binary()
        .args(["--scenario", "/nonexistent/path/nowhere.scn"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr_str(&output).contains("nowhere.scn"),
        "error must name the file: {}",
        stderr_str(&output)
    );
}

#[test]
fn parse_error_exits_two_and_names_the_line() {
    let path = write_temp_scenario(
        "parse-error",
        "users.count = 3\nradio.v.carrier_ghz = sixty\n",
    );
    let output = binary()
        .arg("--scenario")
        .arg(&path)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr_str(&output).contains("line 2"),
        "parse error must cite line 2: {}",
        stderr_str(&output)
    );
    fs::remove_file(path).ok();
}

#[test]
fn regulatory_violation_exits_one_and_names_the_limit() {
    let path = write_temp_scenario("violation", "radio.v.tx_power_dbm = 30\n");
    let output = binary()
        .arg("--scenario")
        .arg(&path)
        .output()
        .expect("binary runs");
    assert_eq!(
        output.status.code(),
        Some(1),
        "a violating scenario is a validation failure, not an I/O error"
    );
    let stderr = stderr_str(&output);
    assert!(
        stderr.contains("30") && stderr.contains("27"),
        "report must show the offending power and the limit: {stderr}"
    );
    assert!(stdout_str(&output).is_empty(), "no CSV on a failed run");
    fs::remove_file(path).ok();
}

#[test]
fn violating_scenario_fails_even_with_validate_only() {
    let path = write_temp_scenario("violation-vo", "radio.e.antenna_gain?\n");
    // A malformed key must be a parse error (exit 2), not a validation one.
    let output = binary()
        .arg("--scenario")
        .arg(&path)
        .arg("--validate-only")
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr_str(&output).contains("line 1"),
        "must cite the malformed line: {}",
        stderr_str(&output)
    );
    fs::remove_file(path).ok();
}

#[test]
fn zero_trials_is_rejected() {
    let output = binary()
        .args(["--scenario"])
        .arg(scenario_path("isolated.scn"))
        .args(["--trials", "0"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr_str(&output).contains("--trials"),
        "error must point at the flag: {}",
        stderr_str(&output)
    );
}
