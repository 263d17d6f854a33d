//! End-to-end smoke tests of the command-line interface.

use std::process::Command;

fn pcds() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcds"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn pcds");
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn fixture_schedule_milp_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = dir.path().join("fx");

    let listing = run_ok(pcds().args(["fixture", "six-ue", "--out"]).arg(&fixtures));
    assert!(listing.contains("rates.json"));
    let rates = fixtures.join("rates.json");
    assert!(rates.exists());

    // schedule the exported matrix: must reproduce the 8-slot golden schedule
    let out = run_ok(
        pcds()
            .args(["schedule", "--hmax", "3", "--demand", "6", "--rates"])
            .arg(&rates),
    );
    let dump: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(dump["total_slots"], 8);
    assert_eq!(dump["schedule"]["pairings"].as_array().unwrap().len(), 3);

    // LP export round-trips through the parser
    let lp = run_ok(
        pcds()
            .args(["milp", "export", "--hmax", "3", "--demand", "6", "--rates"])
            .arg(&rates),
    );
    assert!(lp.starts_with("\\"));
    assert!(lp.contains("Minimize"));
    assert!(lp.trim_end().ends_with("End"));
    let summary = pcds::milp::parse_lp(&lp).unwrap();
    assert!(summary.n_constraints > 0 && summary.n_binaries > 0);

    // exact solve agrees with the golden objective
    let out = run_ok(
        pcds()
            .args(["milp", "solve", "--hmax", "3", "--demand", "6", "--rates"])
            .arg(&rates),
    );
    let sol: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(sol["objective"], 8);
    assert_eq!(sol["proven_optimal"], true);
}

#[test]
fn simulate_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "topology": { "n_ues": 5 },
            "frame": { "horizon_slots": 5000 },
            "experiment": {
                "schemes": ["pcds", "sbts"],
                "loads": [1.0],
                "h_max": [3],
                "replications": 2,
                "base_seed": 3
            }
        })
        .to_string(),
    )
    .unwrap();

    let csv_path = dir.path().join("rows.csv");
    let summary_path = dir.path().join("summary.json");
    run_ok(
        pcds()
            .arg("simulate")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&csv_path)
            .arg("--summary")
            .arg(&summary_path),
    );

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), pcds::experiment::CSV_HEADER);
    assert_eq!(lines.count(), 4); // 2 schemes x 2 replications

    let summary: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&summary_path).unwrap()).unwrap();
    assert_eq!(summary.len(), 2);
    for cell in &summary {
        assert_eq!(cell["replications"], 2);
    }

    // identical invocation reproduces the CSV byte for byte
    let csv2_path = dir.path().join("rows2.csv");
    run_ok(
        pcds()
            .arg("simulate")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&csv2_path),
    );
    assert_eq!(csv, std::fs::read_to_string(&csv2_path).unwrap());
}

#[test]
fn cli_overrides_narrow_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "topology": { "n_ues": 4 },
            "frame": { "horizon_slots": 3000 },
            "experiment": {
                "schemes": ["pcds", "fdmac-h", "sbts"],
                "loads": [0.5, 1.0],
                "h_max": [2, 3],
                "replications": 2,
                "base_seed": 1
            }
        })
        .to_string(),
    )
    .unwrap();

    let out = run_ok(
        pcds()
            .arg("simulate")
            .arg("--config")
            .arg(&config)
            .args(["--scheme", "sbts", "--load", "1.0", "--hmax", "2", "--seed", "9"]),
    );
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row.starts_with("sbts,poisson,1,2,"));
        let seed: u64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!(seed == 9 || seed == 10);
    }
}

#[test]
fn errors_are_diagnosed() {
    // unknown fixture
    let out = pcds()
        .args(["fixture", "nope", "--out", "/tmp/should-not-exist"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown fixture"));

    // invalid config names the failing field
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        serde_json::json!({ "experiment": { "loads": [] } }).to_string(),
    )
    .unwrap();
    let out = pcds()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.loads"));
}

#[test]
fn fixture_export_is_usable_as_golden_input() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(pcds().args(["fixture", "six-ue", "--out"]).arg(dir.path()));
    for file in [
        "rates.json",
        "topology.json",
        "expected_paths.json",
        "expected_schedule.json",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let expected: pcds::schedule::Schedule = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("expected_schedule.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(expected.total_slots(), 8);
}
