//! End-to-end tests of the `voqsim` binary: artifact emission, determinism,
//! exit codes, config-file handling and the fit round trip.

use std::path::Path;
use std::process::{Command, Output};

use voqsim::report::parse_fringe_csv;

fn voqsim(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voqsim"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn fringe_emits_byte_identical_csv_for_identical_invocations() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = ["fringe", "--alpha-sq", "0.5", "--bsb-r-sq", "0.5", "--steps", "64"];
    assert!(voqsim(&args, dir_a.path()).status.success());
    assert!(voqsim(&args, dir_b.path()).status.success());
    assert_eq!(read(dir_a.path(), "fringe.csv"), read(dir_b.path(), "fringe.csv"));

    let records = parse_fringe_csv(
        std::str::from_utf8(&read(dir_a.path(), "fringe.csv")).unwrap(),
    )
    .unwrap();
    assert_eq!(records.len(), 64);
}

#[test]
fn simulate_counts_is_deterministic_per_seed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let dir_c = tempfile::tempdir().unwrap();
    let base = [
        "simulate-counts",
        "--steps",
        "9",
        "--shots",
        "5000",
        "--bsb-r-sq",
        "0.5",
    ];
    let with_seed = |seed: &'static str| {
        let mut v = base.to_vec();
        v.extend(["--seed", seed]);
        v
    };
    assert!(voqsim(&with_seed("7"), dir_a.path()).status.success());
    assert!(voqsim(&with_seed("7"), dir_b.path()).status.success());
    assert!(voqsim(&with_seed("8"), dir_c.path()).status.success());

    assert_eq!(read(dir_a.path(), "counts.csv"), read(dir_b.path(), "counts.csv"));
    assert_eq!(read(dir_a.path(), "report.json"), read(dir_b.path(), "report.json"));
    assert_ne!(read(dir_a.path(), "counts.csv"), read(dir_c.path(), "counts.csv"));

    let report: serde_json::Value =
        serde_json::from_slice(&read(dir_a.path(), "report.json")).unwrap();
    assert_eq!(report["rng"], "chacha12");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["points"].as_array().unwrap().len(), 9);
}

#[test]
fn bell_stats_prints_branch_probabilities_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = voqsim(&["bell-stats", "--alpha-sq", "0.3"], dir.path());
    assert!(out.status.success());
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for (key, want) in [("psi1", 0.15), ("psi2", 0.35), ("psi3", 0.25), ("psi4", 0.25)] {
        let got = stats[key].as_f64().unwrap();
        assert!((got - want).abs() < 1e-12, "{key}: {got}");
    }
}

#[test]
fn fit_round_trips_a_produced_fringe() {
    let dir = tempfile::tempdir().unwrap();
    let fringe = ["fringe", "--alpha-sq", "0.5", "--bsb-r-sq", "0.5", "--steps", "33"];
    assert!(voqsim(&fringe, dir.path()).status.success());
    let input = dir.path().join("fringe.csv");
    let out = voqsim(
        &[
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--pair",
            "D2-D1*",
            "--column",
            "conditional",
            "--json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pair"], "D2-D1*");
    assert_eq!(report["points"], 33);
    let v = report["fit"]["v"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 1e-9, "V = {v}");
}

#[test]
fn visibility_sweep_emits_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = voqsim(
        &[
            "visibility-sweep",
            "--bsb-r-sq",
            "0.2",
            "--grid",
            "5",
            "--pair",
            "D2-D2*",
            "--plot",
            "vis.svg",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = String::from_utf8(read(dir.path(), "visibility.csv")).unwrap();
    assert!(csv.starts_with("alpha_sq,pair,visibility,degenerate"));
    assert_eq!(csv.lines().count(), 6);
    let svg = String::from_utf8(read(dir.path(), "vis.svg")).unwrap();
    assert!(svg.starts_with("<svg "));
}

#[test]
fn config_file_drives_a_mirror_sweep_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"alpha_sq": 0.3, "bsb_r_sq": 0.5, "mirror": {"start_um": 0.0, "stop_um": 0.5144908939913324, "steps": 9}}"#,
    )
    .unwrap();
    let out = voqsim(
        &["fringe", "--config", cfg.to_str().unwrap(), "--out", "a.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records =
        parse_fringe_csv(std::str::from_utf8(&read(dir.path(), "a.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 9);
    assert_eq!(records[0].mirror_um, 0.0);
    assert!((records[8].phi - std::f64::consts::TAU).abs() < 1e-6);

    let out = voqsim(
        &[
            "fringe",
            "--config",
            cfg.to_str().unwrap(),
            "--alpha-sq",
            "0.5",
            "--out",
            "b.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_ne!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
}

#[test]
fn env_var_provides_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_voqsim"))
        .args(["fringe", "--steps", "5"])
        .env("VOQSIM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("fringe.csv").exists());
}

#[test]
fn exit_codes_distinguish_config_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();

    let bad_value = voqsim(&["fringe", "--alpha-sq", "1.5"], dir.path());
    assert_eq!(bad_value.status.code(), Some(1));
    assert!(!bad_value.stderr.is_empty());

    let unknown_flag = voqsim(&["fringe", "--no-such-flag"], dir.path());
    assert_eq!(unknown_flag.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&unknown_flag.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "stderr: {stderr}");

    let missing_input = voqsim(&["fit", "--input", "/definitely/not/here.csv"], dir.path());
    assert_eq!(missing_input.status.code(), Some(1));

    let bad_config = {
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, r#"{"alpha_sq": 0.5, "no_such_key": 1}"#).unwrap();
        voqsim(&["fringe", "--config", cfg.to_str().unwrap()], dir.path())
    };
    assert_eq!(bad_config.status.code(), Some(1));

    let zero_shots = voqsim(&["simulate-counts", "--steps", "3"], dir.path());
    assert_eq!(zero_shots.status.code(), Some(1));

    let help = voqsim(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("voqsim"));
}

#[test]
fn json_flag_prints_machine_readable_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = voqsim(
        &["fringe", "--steps", "7", "--bsb-r-sq", "0.2", "--json"],
        dir.path(),
    );
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["command"], "fringe");
    assert_eq!(value["records"].as_array().unwrap().len(), 7);

    let out2 = voqsim(
        &["fringe", "--steps", "7", "--bsb-r-sq", "0.2", "--json"],
        dir.path(),
    );
    assert_eq!(out.stdout, out2.stdout);
}
