use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qutrit-esd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_csv_has_default_grid_and_header() {
    let o = run(&[
        "sweep",
        "--kind",
        "dephasing",
        "--mode",
        "qubitonly",
        "--b",
        "0.05",
        "--c",
        "0.6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,negativity,negativity_analytic,coherence");
    assert_eq!(lines.len(), 1 + 513);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[513].starts_with("1,"));
}

#[test]
fn analytic_column_is_blank_without_closed_form() {
    let o = run(&[
        "sweep",
        "--kind",
        "bitflip",
        "--mode",
        "multilocal",
        "--b",
        "0.05",
        "--c",
        "0.6",
        "--gamma-steps",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        assert_eq!(line.split(',').nth(2), Some(""), "{line}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "sweep",
        "--kind",
        "depolarizing",
        "--mode",
        "multilocal",
        "--b",
        "0.05",
        "--c",
        "0.6",
        "--format",
        "json",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 513);
    let g = v["esd"]["esd_gamma"].as_f64().unwrap();
    let closed = v["esd"]["analytic_gamma"].as_f64().unwrap();
    assert!((g - closed).abs() < 1e-6, "{g} vs {closed}");
}

#[test]
fn several_curves_go_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves");
    let o = run(&[
        "sweep",
        "--kind",
        "bitflip",
        "--mode",
        "multilocal",
        "--a-zero",
        "--b",
        "0,0.0333333333333333,0.1333333333333333",
        "--gamma-steps",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    assert!(names.contains(&"bitflip_multilocal_b0_c1.csv".to_string()));
}

#[test]
fn several_curves_without_out_is_a_config_error() {
    let o = run(&[
        "sweep",
        "--kind",
        "bitflip",
        "--mode",
        "multilocal",
        "--b",
        "0,0.05",
        "--c",
        "0.6",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn batch_config_runs_every_entry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("runs.json");
    fs::write(
        &cfg,
        r#"[
            {"kind": "phaseflip", "mode": "qutritonly", "b": 0.05, "c": 0.6, "gamma_steps": 4, "out": "pf.csv"},
            {"kind": "bit-phase-flip", "mode": "multilocal", "b": 0, "a_zero": true, "format": "json", "out": "bell.json"}
        ]"#,
    )
    .unwrap();
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("pf.csv"))
            .unwrap()
            .lines()
            .count(),
        6
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bell.json")).unwrap()).unwrap();
    assert!((v["esd"]["esd_gamma"].as_f64().unwrap() - 0.720136).abs() < 1e-5);
}

#[test]
fn bad_batch_entries_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("runs.json");
    fs::write(
        &cfg,
        r#"[{"kind": "bitflip", "mode": "multilocal", "b": 0.4, "c": 0.6}]"#,
    )
    .unwrap();
    assert_eq!(
        run(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(
        run(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("absent.json");
    assert_eq!(
        run(&["sweep", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &[
            "sweep",
            "--kind",
            "nope",
            "--mode",
            "multilocal",
            "--b",
            "0",
            "--c",
            "1",
        ][..],
        &[
            "sweep",
            "--kind",
            "bitflip",
            "--mode",
            "multilocal",
            "--b",
            "0.2",
            "--c",
            "0.9",
        ],
        &[
            "sweep",
            "--kind",
            "bitflip",
            "--mode",
            "multilocal",
            "--b",
            "0",
            "--c",
            "1",
            "--tol",
            "0",
        ],
        &[
            "sweep",
            "--kind",
            "bitflip",
            "--mode",
            "multilocal",
            "--b",
            "0",
            "--c",
            "1",
            "--gamma-steps",
            "0",
        ],
        &[
            "sweep",
            "--kind",
            "bitflip",
            "--mode",
            "multilocal",
            "--b",
            "0",
            "--c",
            "1",
            "--format",
            "text",
        ],
        &["sweep", "--mode", "multilocal", "--b", "0", "--c", "1"],
        &["esd", "--b", "0,0.1,0.2", "--c", "0.5,0.6"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&[
        "sweep",
        "--kind",
        "bitflip",
        "--mode",
        "multilocal",
        "--b",
        "0",
        "--c",
        "1",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn esd_csv_lists_every_setting() {
    let o = run(&["esd", "--b", "0.05", "--c", "0.6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 16);
    assert!(text.contains("depolarizing,qutritonly,0.05,0.6,0.574468"));
}

#[test]
fn table1_reports_the_two_open_cells() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let o = run(&[
        "table1",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let failing: Vec<String> = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["holds"].as_bool().unwrap())
        .map(|c| {
            format!(
                "{}/{}",
                c["setting"]["kind"].as_str().unwrap(),
                c["setting"]["mode"].as_str().unwrap()
            )
        })
        .collect();
    assert_eq!(failing, ["bitflip/qutritonly", "bitphaseflip/qutritonly"]);
}

#[test]
fn validate_passes() {
    let o = run(&["validate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["discrepancies"].as_array().unwrap().len() >= 3);
    assert!(Path::new(env!("CARGO_BIN_EXE_qutrit-esd")).exists());
}
