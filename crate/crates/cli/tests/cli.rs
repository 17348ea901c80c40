use std::path::Path;
use std::process::{Command, Output};

use cavity_ghz_cli::commands::{convergence_report, sweep, Axis};
use cavity_ghz_cli::output::TRAJECTORY_HEADER;
use cavity_ghz_cli::{presets, ScenarioConfig};

fn cavity_ghz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-ghz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scenario_file(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

// A cheap run: effective tier over a few nanoseconds.
const SHORT: &[&str] = &[
    "--set", "integration.tier=\"effective\"",
    "--set", "integration.t_final_ns=5.0",
    "--set", "integration.samples=10",
];

#[test]
fn every_preset_round_trips_through_toml() {
    for name in presets::names() {
        let cfg = presets::load(name, &[]).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again, "{name}");
    }
}

#[test]
fn malformed_toml_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario_file(dir.path(), "[device\ntopology = \"two-cavity\"\n");
    let out = cavity_ghz(&["calibrate", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn unknown_key_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = presets::source("fig2-two-cavity").unwrap().replace("k = 1", "k = 1\nkk = 2");
    let path = scenario_file(dir.path(), &text);
    let out = cavity_ghz(&["calibrate", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("kk"), "{}", stderr(&out));
}

#[test]
fn out_of_range_value_names_the_field() {
    let out = cavity_ghz(&["calibrate", "--preset", "fig2-two-cavity", "--set", "rates.beta_over_2pi_kHz=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("rates.beta_over_2pi_kHz"), "{}", stderr(&out));
}

#[test]
fn validate_passes_on_the_shipped_scenario() {
    let out = cavity_ghz(&["validate", "--preset", "fig2-two-cavity"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("worst sideband: qubit 1 mode P+ m = -1"), "{text}");
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn validate_rejects_a_sideband_resonance() {
    // J = 292.5 MHz puts the m = -2 sideband of P+ exactly on resonance
    let out = cavity_ghz(&["validate", "--preset", "fig2-two-cavity", "--set", "device.J_over_2pi_MHz=292.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL"));
    assert!(stderr(&out).contains("m = -2"), "{}", stderr(&out));
}

#[test]
fn infeasible_target_reports_the_largest_coupling() {
    let out = cavity_ghz(&[
        "calibrate", "--preset", "fig2-two-cavity", "--set", "calibration.g_target_over_2pi_MHz=80",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("maximum achievable"), "{}", stderr(&out));
}

#[test]
fn loose_adaptive_tolerances_abort_the_run() {
    let out = cavity_ghz(&[
        "simulate", "--preset", "fig2-two-cavity",
        "--set", "integration.tier=\"effective\"",
        "--set", "integration.method=\"adaptive\"",
        "--set", "integration.rtol=0.5",
        "--set", "integration.atol=0.5",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn calibrate_writes_one_csv_row_per_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nested").join("cal.csv");
    let out = cavity_ghz(&["calibrate", "--preset", "table2-two-cavity", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("qubit,"));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.csv"));
        let mut args = vec!["simulate", "--preset", "fig2-two-cavity", "--out", path.to_str().unwrap()];
        args.extend_from_slice(SHORT);
        let out = cavity_ghz(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).contains("final fidelity"));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert_eq!(text.lines().next(), Some(TRAJECTORY_HEADER));
    assert!(text.lines().count() >= 11);
}

#[test]
fn simulate_without_a_path_streams_csv() {
    let mut args = vec!["simulate", "--preset", "fig2-one-cavity"];
    args.extend_from_slice(SHORT);
    let out = cavity_ghz(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with(TRAJECTORY_HEADER));
    assert!(stderr(&out).contains("final fidelity"));
}

#[test]
fn overrides_replace_preset_values() {
    let cfg = presets::load("fig3-two-cavity", &["truncation.levels=7".into(), "rates.kappa_over_2pi_kHz=0".into()]).unwrap();
    assert_eq!(cfg.truncation.levels, 7);
    assert_eq!(cfg.rates.kappa, 0.0);
    assert!(presets::load("fig3-two-cavity", &["truncation.nope=1".into()]).is_err());
    assert!(presets::load("fig3-two-cavity", &["no-equals-sign".into()]).is_err());
}

#[test]
fn sweep_rows_come_back_sorted() {
    let overrides: Vec<String> = SHORT.chunks(2).map(|c| c[1].to_string()).collect();
    let cfg = presets::load("fig2-two-cavity", &overrides).unwrap();
    let rows = sweep(&cfg, Axis::Truncation, &[5.0, 3.0, 4.0]).unwrap();
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    assert_eq!(values, [3.0, 4.0, 5.0]);
    assert!(rows.iter().all(|r| r.valid && r.fidelity > 0.0 && r.fidelity <= 1.0));
    let report = convergence_report(&rows);
    assert!(report.contains("convergence:"));
    assert_eq!(report.lines().count(), 3);
}

#[test]
fn sweep_needs_two_values() {
    let cfg = presets::load("fig2-two-cavity", &[]).unwrap();
    assert!(sweep(&cfg, Axis::J, &[81.0]).is_err());
    let out = cavity_ghz(&["sweep", "--preset", "fig2-two-cavity", "--axis", "J", "--values", "81"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_command_prints_the_convergence_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let mut args = vec![
        "sweep", "--preset", "fig2-two-cavity", "--axis", "dt", "--values", "20,40", "--out", path.to_str().unwrap(),
    ];
    args.extend_from_slice(SHORT);
    let out = cavity_ghz(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("convergence:"));
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 3);
}

#[test]
fn source_is_required() {
    let out = cavity_ghz(&["calibrate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--config"));
}

#[test]
fn faster_z_drive_does_not_lower_the_fidelity() {
    let cfg = presets::load("fig2-two-cavity", &[]).unwrap();
    let rows = sweep(&cfg, Axis::OmegaZ, &[600.0, 900.0, 1200.0]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].fidelity >= w[0].fidelity), "{rows:?}");
}
