use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn gridshutoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridshutoff"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn scenario_args<'a>(network: &'a str, risk: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "--network",
        network,
        "--risk",
        risk,
        "--out",
        out,
        "--horizon",
        "2",
        "--risk-threshold",
        "40",
    ]
}

struct Paths {
    _dir: TempDir,
    out: String,
    network: String,
    risk: String,
    raster: String,
}

fn paths() -> Paths {
    let dir = TempDir::new().unwrap();
    Paths {
        out: dir.path().join("out").display().to_string(),
        network: data("tiny.json").display().to_string(),
        risk: data("tiny.csv").display().to_string(),
        raster: data("tiny.asc").display().to_string(),
        _dir: dir,
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&gridshutoff(&["--help"])), 0);
    assert_eq!(code(&gridshutoff(&["--version"])), 0);
    let o = gridshutoff(&["run", "--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for flag in [
        "--network",
        "--risk",
        "--raster",
        "--alpha",
        "--risk-threshold",
        "--budget",
        "--horizon",
        "--gap",
        "--solver",
        "--emit",
    ] {
        assert!(text.contains(flag), "run --help lacks {flag}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let p = paths();
    assert_eq!(code(&gridshutoff(&[])), 2);
    assert_eq!(code(&gridshutoff(&["run", "--risk", &p.risk])), 2, "missing --network");
    assert_eq!(code(&gridshutoff(&["run", "--network", &p.network])), 2, "missing risk");
    assert_eq!(
        code(&gridshutoff(&[
            "run",
            "--network",
            &p.network,
            "--risk",
            &p.risk,
            "--raster",
            &p.raster
        ])),
        2,
        "both risk sources"
    );
    assert_eq!(
        code(&gridshutoff(&[
            "run",
            "--network",
            &p.network,
            "--risk",
            &p.risk,
            "--alpha",
            "1.5"
        ])),
        2
    );
    assert_eq!(
        code(&gridshutoff(&[
            "run",
            "--network",
            &p.network,
            "--risk",
            &p.risk,
            "--end-day",
            "9"
        ])),
        2
    );
    assert_eq!(
        code(&gridshutoff(&[
            "sweep",
            "--network",
            &p.network,
            "--risk",
            &p.risk,
            "--axis",
            "colour",
            "--values",
            "1"
        ])),
        2
    );
}

#[test]
fn bad_data_exits_three() {
    let p = paths();
    let dir = TempDir::new().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"num_days\": 2, \"buses\": [").unwrap();
    let broken = broken.display().to_string();
    assert_eq!(code(&gridshutoff(&["validate", "--network", &broken])), 3);
    assert_eq!(code(&gridshutoff(&["run", "--network", &broken, "--risk", &p.risk])), 3);
    assert_eq!(
        code(&gridshutoff(&["validate", "--network", "/nonexistent/net.json"])),
        3
    );

    let risk = dir.path().join("risk.csv");
    std::fs::write(&risk, "issue_day,target_day,line_id,risk\n0,0,ZZ,5\n").unwrap();
    assert_eq!(
        code(&gridshutoff(&[
            "validate",
            "--network",
            &p.network,
            "--risk",
            &risk.display().to_string()
        ])),
        3
    );
}

#[test]
fn validate_reports_inputs() {
    let p = paths();
    let o = gridshutoff(&["validate", "--network", &p.network, "--risk", &p.risk]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("3 buses, 3 lines"), "{text}");
    assert!(text.contains("lead up to 3 days"), "{text}");
    assert_eq!(
        code(&gridshutoff(&[
            "validate",
            "--network",
            &p.network,
            "--raster",
            &p.raster
        ])),
        0
    );
}

#[test]
fn run_writes_reports() {
    let p = paths();
    let mut args = vec!["run"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--budget", "inf"]);
    let o = gridshutoff(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = Path::new(&p.out);
    for f in ["results.json", "days.csv", "summary.json", "risk.svg", "load.svg"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let mut reader = csv::Reader::from_path(out.join("days.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "day",
            "load_served_MW",
            "load_served_pct",
            "risk_no_shutoff",
            "risk_with_shutoff",
            "vulnerability",
            "deenergizations",
            "reenergizations",
            "miles_restored",
            "gap",
            "wall_time"
        ]
    );
    assert_eq!(reader.records().count(), 4);
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["days"], 4, "{summary}");
}

#[test]
fn emit_selects_formats() {
    let p = paths();
    let mut args = vec!["run"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--emit", "csv", "--end-day", "1"]);
    assert_eq!(code(&gridshutoff(&args)), 0);
    let out = Path::new(&p.out);
    assert!(out.join("days.csv").is_file() && out.join("results.json").is_file());
    assert!(!out.join("summary.json").exists() && !out.join("risk.svg").exists());
}

#[test]
fn report_reemits_identical_files() {
    let p = paths();
    let mut args = vec!["run"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    assert_eq!(code(&gridshutoff(&args)), 0);
    let again = format!("{}-again", p.out);
    let results = format!("{}/results.json", p.out);
    assert_eq!(
        code(&gridshutoff(&["report", "--results", &results, "--out", &again])),
        0
    );
    for f in ["days.csv", "summary.json", "risk.svg", "load.svg"] {
        let a = std::fs::read(Path::new(&p.out).join(f)).unwrap();
        let b = std::fs::read(Path::new(&again).join(f)).unwrap();
        assert!(a == b, "{f} differs after re-emit");
    }
}

#[test]
fn sweep_writes_one_row_per_value() {
    let p = paths();
    let mut args = vec!["sweep"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--axis", "budget", "--values", "0,20,40"]);
    let o = gridshutoff(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_path(Path::new(&p.out).join("sweep.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let values: Vec<&str> = rows.iter().map(|r| &r[1]).collect();
    assert_eq!(values, ["0", "20", "40"]);
    assert!(rows.iter().all(|r| &r[0] == "budget" && r[20].is_empty()));
    assert!(Path::new(&p.out).join("sweep.json").is_file());
}

#[test]
fn mps_only_and_export_write_model_files() {
    let p = paths();
    let mut args = vec!["run"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--solver", "mps-only", "--start-day", "1"]);
    assert_eq!(code(&gridshutoff(&args)), 0);
    let mps = std::fs::read_to_string(Path::new(&p.out).join("window_day1.mps")).unwrap();
    assert!(mps.contains("ROWS") && mps.contains("ENDATA"));
    assert!(!Path::new(&p.out).join("results.json").exists());

    let mut args = vec!["export-mps"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--day", "2"]);
    assert_eq!(code(&gridshutoff(&args)), 0);
    assert!(Path::new(&p.out).join("window_day2.mps").is_file());

    let mut args = vec!["export-mps"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--day", "7"]);
    assert_eq!(code(&gridshutoff(&args)), 2);
}

#[test]
fn zero_node_budget_exits_four() {
    let p = paths();
    let mut args = vec!["run"];
    args.extend(scenario_args(&p.network, &p.risk, &p.out));
    args.extend(["--node-budget", "0"]);
    let o = gridshutoff(&args);
    // zero nodes leaves no incumbent on the first day
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}
