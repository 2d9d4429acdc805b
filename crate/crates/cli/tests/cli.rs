use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const SUBCOMMANDS: [&str; 11] = [
    "steady",
    "thresholds",
    "noise",
    "noise-threshold",
    "regime",
    "sweep",
    "fig1",
    "fig2",
    "sim-langevin",
    "sim-gillespie",
    "verify",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laser-noise"))
        .args(args)
        .env_remove("LASER_NOISE_DEVICE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a checked-in file; `BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

#[test]
fn help_text_matches_golden_files() {
    let top = stdout(&["--help"]);
    for cmd in SUBCOMMANDS {
        assert!(top.contains(cmd), "{cmd} missing from top-level help");
    }
    check_golden("help.txt", &top);
    for cmd in SUBCOMMANDS {
        check_golden(&format!("help_{cmd}.txt"), &stdout(&[cmd, "--help"]));
    }
}

#[test]
fn thresholds_report_for_device_file() {
    let dir = std::env::temp_dir().join(format!("laser-noise-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("default.json");
    std::fs::write(
        &path,
        r#"{"beta": 1e-5, "N_T": 1e9, "tau_sp_s": 3e-9, "tau_cav_s": 4.5e-13}"#,
    )
    .unwrap();
    let v: Value = serde_json::from_str(&stdout(&["thresholds", "--device", path.to_str().unwrap()])).unwrap();
    let j_th = v["j_th"].as_f64().unwrap();
    assert!((j_th / 4.4444e17 - 1.0).abs() < 1e-3);
    assert!((v["n_th"].as_f64().unwrap() - 316.227766).abs() < 1e-3);
    assert_eq!(v["n_T"].as_f64().unwrap(), 1.5);
    let beta_i = v["beta_I_th_A"].as_f64().unwrap();
    assert!((0.2e-6..2e-6).contains(&beta_i));

    // the environment variable names the fallback device
    let out = Command::new(env!("CARGO_BIN_EXE_laser-noise"))
        .args(["thresholds", "--no-metadata"])
        .env("LASER_NOISE_DEVICE", &path)
        .output()
        .unwrap();
    let from_env: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(from_env["j_th"], v["j_th"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zero_pump_is_a_domain_error() {
    let out = run(&["noise", "--preset", "default", "--j", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "BelowTransparency");
    assert!(err["message"].as_str().unwrap().contains("transparency"));
}

#[test]
fn non_lasing_device_is_a_domain_error() {
    let out = run(&["thresholds", "--beta", "1e-3", "--nt", "100", "--tau-sp", "1", "--tau-cav", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NonLasingDevice");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["noise", "--bogus"][..],
        &["thresholds", "--preset", "toy-a", "--beta", "0.1"],
        &["thresholds", "--beta", "0.1"],
        &["steady", "--j", "1", "--current-mA", "1"],
        &["steady"],
        &["sweep", "--min", "1", "--max", "2", "--columns", "nope"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn pump_units_agree() {
    let a: Value = serde_json::from_str(&stdout(&["steady", "--j", "1e18", "--no-metadata"])).unwrap();
    let ma = a["current_mA"].as_f64().unwrap();
    let b: Value =
        serde_json::from_str(&stdout(&["steady", "--current-mA", &ma.to_string(), "--no-metadata"])).unwrap();
    assert!((b["j"].as_f64().unwrap() / 1e18 - 1.0).abs() < 1e-12);
    assert!((b["n_bar"].as_f64().unwrap() / a["n_bar"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn simulations_are_byte_reproducible() {
    let args = [
        "sim-gillespie",
        "--preset",
        "toy-a",
        "--j-over-jth",
        "2",
        "--events",
        "2e5",
        "--seed",
        "5",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    let lang = ["sim-langevin", "--preset", "toy-a", "--j-over-jth", "3", "--steps", "200000", "--seed", "1"];
    let first = stdout(&lang);
    assert_eq!(first, stdout(&lang));
    let v: Value = serde_json::from_str(&first).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records[0]["channel"], "dn");
    for key in ["mean", "variance", "std_error", "tau_decorr_s", "samples", "seed", "config"] {
        assert!(records[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn trajectory_dump_has_fixed_header() {
    let path = std::env::temp_dir().join(format!("laser-noise-dump-{}.csv", std::process::id()));
    stdout(&[
        "sim-gillespie",
        "--preset",
        "toy-a",
        "--j-over-jth",
        "0.5",
        "--events",
        "1e4",
        "--dump",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_seconds,N,n"));
    let mut last = -1.0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 3);
        let t: f64 = f[0].parse().unwrap();
        assert!(t >= last);
        last = t;
        f[1].parse::<u64>().unwrap();
        f[2].parse::<u64>().unwrap();
    }
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn sweep_csv_is_deterministic_and_complete() {
    let args = [
        "sweep",
        "--preset",
        "toy-b",
        "--relative",
        "--min",
        "1.01",
        "--max",
        "10",
        "--points",
        "7",
        "--columns",
        "j,n_bar,ratio",
        "--no-metadata",
    ];
    let text = stdout(&args);
    assert_eq!(text, stdout(&args));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,n_bar,ratio");
    assert_eq!(lines.len(), 8);
    let with_meta = stdout(&args[..args.len() - 1]);
    assert!(with_meta.starts_with("# tool: laser-noise"));
    assert!(with_meta.contains("# device: "));
}

#[test]
fn sweep_spec_file() {
    let path = std::env::temp_dir().join(format!("laser-noise-spec-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{
            "swept_variable": "beta",
            "grid": {"min": 1e-8, "max": 1e-3, "points": 3},
            "device": {"beta": 1e-5, "N_T": 1e9, "tau_sp_s": 3e-9, "tau_cav_s": 4.5e-13},
            "columns": ["beta", "n_half", "regime"]
        }"#,
    )
    .unwrap();
    let v: Value = serde_json::from_str(&stdout(&["sweep", "--spec", path.to_str().unwrap(), "--format", "json"])).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["regime"], "stimulated-dominated");
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn figure_commands_emit_tables() {
    let fig1 = stdout(&["fig1", "--points", "4", "--no-metadata"]);
    assert_eq!(fig1.lines().next(), Some("inv_beta,n_half,n_half_piecewise,n_th"));
    assert_eq!(fig1.lines().count(), 5);
    let fig2 = stdout(&["fig2", "--points", "4", "--format", "json"]);
    let v: Value = serde_json::from_str(&fig2).unwrap();
    assert!(v["metadata"]["material"].is_object());
    assert_eq!(run(&["fig1", "--beta-min", "1e-14"]).status.code(), Some(1));
}
