use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use rgg_rainbow_cli::commands::sweep_schema;
use rgg_rainbow_cli::{read_results, Cell};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rgg-rainbow"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn fixture_check_reports_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check", "--fixture"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "not rainbow connected; first failure (0,5)"
    );
}

#[test]
fn fixture_document_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["fixture"], dir.path()).status.success());
    let doc = dir.path().join("fixture.json");
    let out = run(
        &["check", "--input", doc.to_str().unwrap()],
        &dir.path().join("c"),
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("first failure (0,5)"));
}

#[test]
fn gen_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "gen", "--n", "100", "--r", "0.1", "--h", "2", "--seed", "42",
    ];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    assert_eq!(files(a.path()), files(b.path()));
    let text = std::fs::read_to_string(a.path().join("graph.json")).unwrap();
    let g = rgg_rainbow::document::deserialize(&text).unwrap();
    assert_eq!((g.n(), g.h(), g.seed()), (100, 2, Some(42)));
}

#[test]
fn formulas_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["formulas", "--n", "1000000", "--h", "2"], dir.path());
    assert!(out.status.success());
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((line["threshold_radius"].as_f64().unwrap() - 0.06096).abs() < 1e-4);
    assert_eq!(line["b_lower"], 0.68);
    assert_eq!(line["c_upper"], 0.56);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("formulas_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["experiment"], "formulas");
    assert_eq!(
        summary["outputs"]["constants"]["source"],
        "two_layer_special"
    );
}

#[test]
fn sweep_rows_sorted_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--n",
        "60",
        "--h",
        "2",
        "--radii",
        "0.5,0.1,0.3,0.2,0.4",
        "--trials",
        "20",
        "--seed",
        "3",
    ];
    assert!(run(&args, dir.path()).status.success());
    let rows = read_results(&dir.path().join("sweep.csv"), &sweep_schema()).unwrap();
    let radii: Vec<f64> = rows
        .iter()
        .map(|r| match r[0] {
            Cell::Float(x) => x,
            _ => panic!("radius column"),
        })
        .collect();
    assert_eq!(radii, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
    let points = rgg_rainbow::analysis::probability_sweep(
        60,
        &[0.5, 0.1, 0.3, 0.2, 0.4],
        2,
        20,
        3,
        rgg_rainbow::rainbow::DEFAULT_DP_BUDGET_BITS,
    )
    .unwrap();
    for (row, (r, e)) in rows.iter().zip(&points) {
        assert_eq!(row[0], Cell::Float(*r));
        assert_eq!(row[1], Cell::Float(e.p_hat));
        assert_eq!(row[4], Cell::Float(e.ci_low));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32, &str); 5] = [
        (
            &["gen", "--n", "10", "--r", "3", "--h", "2", "--seed", "1"],
            2,
            "config",
        ),
        (&["gen", "--n", "10", "--r", "0.3", "--h", "2"], 2, "config"),
        (
            &[
                "check",
                "--n",
                "1000",
                "--r",
                "0.1",
                "--h",
                "4",
                "--seed",
                "1",
                "--budget-bits",
                "100",
            ],
            3,
            "budget",
        ),
        (&["check", "--input", "/definitely/not/here.json"], 4, "io"),
        (
            &[
                "threshold",
                "--n",
                "10",
                "--h",
                "2",
                "--trials",
                "10",
                "--seed",
                "1",
            ],
            2,
            "config",
        ),
    ];
    for (args, code, category) in cases {
        let out = run(args, dir.path());
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with(&format!("error[{category}]")), "{err}");
    }
    let out = bin().args(["gen", "--unknown-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"seed": 42, "n": 100, "r": 0.1, "h": 3, "out_dir": {:?}}}"#,
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let status = bin()
        .args(["gen", "--config", cfg.to_str().unwrap(), "--h", "2"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let reference = tempfile::tempdir().unwrap();
    run(
        &[
            "gen", "--n", "100", "--r", "0.1", "--h", "2", "--seed", "42",
        ],
        reference.path(),
    );
    assert_eq!(
        std::fs::read(out_dir.join("graph.json")).unwrap(),
        std::fs::read(reference.path().join("graph.json")).unwrap()
    );
}

#[test]
fn writes_stay_in_out_dir() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("nested").join("out");
    let status = bin()
        .current_dir(root.path())
        .args([
            "occupancy",
            "--m",
            "20",
            "--k",
            "10",
            "--trials",
            "50",
            "--seed",
            "1",
        ])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let top: Vec<_> = std::fs::read_dir(root.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(top, vec![std::ffi::OsString::from("nested")]);
    let names: Vec<String> = files(&out).into_keys().collect();
    assert_eq!(
        names,
        vec![
            "occupancy.csv",
            "occupancy_summary.json",
            "occupancy_trials.csv"
        ]
    );
}

#[test]
fn help_lists_commands_and_flags() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in [
        "gen",
        "check",
        "witness",
        "sweep",
        "threshold",
        "expansion",
        "occupancy",
        "balls",
        "formulas",
        "fixture",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    for flag in ["--config", "--out-dir", "--workers", "--seed"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
    let out = bin().args(["threshold", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--n", "--h", "--trials", "--tolerance", "--budget-bits"] {
        assert!(text.contains(flag), "{flag} missing from threshold help");
    }
}

#[test]
fn witness_path_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["witness", "--fixture", "--from", "3", "--to", "4"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("witness.csv")).unwrap();
    assert!(text.starts_with("step,from,to,color\r\n"));
    let out = run(
        &["witness", "--fixture", "--from", "0", "--to", "5"],
        dir.path(),
    );
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "no rainbow path from 0 to 5"
    );
}
