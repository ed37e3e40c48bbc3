//! End-to-end tests of the `ctqw` binary: golden outputs, schema stability,
//! determinism, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn ctqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctqw"))
        .args(args)
        .env_remove("CTQW_TOL")
        .env_remove("CTQW_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = ctqw(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn scratch_dir() -> PathBuf {
    static COUNTER: AtomicU32 = AtomicU32::new(0);
    let dir = std::env::temp_dir().join(format!(
        "ctqw-cli-test-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn generate_g1_is_the_four_cycle() {
    assert_eq!(stdout_of(&["generate", "--generation", "1"]), "1 2\n1 3\n2 4\n3 4\n");
}

#[test]
fn generated_edge_lists_round_trip_through_graph_file() {
    let dir = scratch_dir();
    let path = dir.join("g2.edges");
    let text = stdout_of(&["generate", "--generation", "2"]);
    std::fs::write(&path, &text).unwrap();
    let from_file = stdout_of(&["spectrum", "--graph-file", path.to_str().unwrap()]);
    let from_generation = stdout_of(&["spectrum", "--generation", "2"]);
    assert_eq!(from_file, from_generation);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn limit_reports_the_golden_chi_column() {
    let text = stdout_of(&["limit", "--generation", "2", "--start", "1"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["start"], 1);
    let chi = doc["chi"].as_array().unwrap();
    assert_eq!(chi.len(), 10);
    let chi_10_1 = chi[9].as_f64().unwrap();
    assert!((chi_10_1 - 0.2644).abs() <= 5e-4, "chi[10] = {chi_10_1}");
    let total: f64 = chi.iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn limit_numeric_mode_approximates_the_exact_column() {
    let exact = stdout_of(&["limit", "--generation", "1", "--start", "2"]);
    let averaged = stdout_of(&[
        "limit", "--generation", "1", "--start", "2",
        "--numeric", "--horizon", "500", "--steps", "50000",
    ]);
    let exact: serde_json::Value = serde_json::from_str(&exact).unwrap();
    let averaged: serde_json::Value = serde_json::from_str(&averaged).unwrap();
    for (a, b) in exact["chi"]
        .as_array()
        .unwrap()
        .iter()
        .zip(averaged["chi"].as_array().unwrap())
    {
        assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() <= 1e-2);
    }
}

#[test]
fn limit_csv_lists_node_and_chi() {
    let text = stdout_of(&["limit", "--generation", "1", "--start", "1", "--format", "csv"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,chi");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,"));
}

fn column_peak(csv: &str, node: usize, field: usize) -> f64 {
    let mut best = f64::MIN;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[1].parse::<usize>().unwrap() == node {
            best = best.max(fields[field].parse::<f64>().unwrap());
        }
    }
    best
}

#[test]
fn propagate_shows_fast_top_bottom_but_slow_left_right_transport() {
    let schema = "t,j,k,p,pi,ratio";
    let from_top = stdout_of(&[
        "propagate", "--generation", "2", "--start", "1", "--t-max", "10", "--t-steps", "200",
    ]);
    assert_eq!(from_top.lines().next().unwrap(), schema);
    assert_eq!(from_top.lines().count(), 1 + 201 * 10);

    // Starting at the top node, the opposite node is reached quickly and
    // strongly; starting at the leftmost axis node, the mirror node's
    // quantum probability stays at the scale of the classical one.
    let peak_bottom = column_peak(&from_top, 10, 4);
    assert!(peak_bottom > 0.5, "pi_10_1 peak = {peak_bottom}");

    let from_left = stdout_of(&[
        "propagate", "--generation", "2", "--start", "4", "--t-max", "10", "--t-steps", "200",
    ]);
    let peak_right = column_peak(&from_left, 7, 4);
    let peak_right_classical = column_peak(&from_left, 7, 3);
    assert!(peak_right < 0.3, "pi_7_4 peak = {peak_right}");
    assert!(
        peak_right < 4.0 * peak_right_classical,
        "pi peak {peak_right} vs p peak {peak_right_classical}"
    );
}

#[test]
fn propagate_json_carries_the_same_numbers() {
    let text = stdout_of(&[
        "propagate", "--generation", "1", "--start", "1", "--times", "0.5", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["nodes"], 4);
    let slice = &doc["series"][0];
    assert_eq!(slice["t"].as_f64().unwrap(), 0.5);
    let p: f64 = slice["p"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    let pi: f64 = slice["pi"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((p - 1.0).abs() < 1e-9);
    assert!((pi - 1.0).abs() < 1e-9);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = [
        "propagate", "--generation", "3", "--start", "8", "--t-max", "20", "--t-steps", "50",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    let args = ["limit", "--generation", "3", "--start", "8"];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn version_header_is_opt_in() {
    let bare = stdout_of(&["generate", "--generation", "1"]);
    assert!(!bare.starts_with('#'));
    let headed = stdout_of(&["generate", "--generation", "1", "--version-header"]);
    assert!(headed.starts_with("# ctqw "));
    assert!(headed.ends_with(&bare));
}

#[test]
fn spectrum_groups_partition_the_indices() {
    let text = stdout_of(&["spectrum", "--generation", "2"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["n"], 10);
    assert_eq!(doc["eigenvalues"].as_array().unwrap().len(), 10);
    let mut seen: Vec<usize> = doc["groups"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|g| g["indices"].as_array().unwrap().iter())
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    seen.sort_unstable();
    assert_eq!(seen, (0..10).collect::<Vec<_>>());
    // The mirror symmetries force a triply degenerate eigenvalue.
    assert!(doc["groups"]
        .as_array()
        .unwrap()
        .iter()
        .any(|g| g["indices"].as_array().unwrap().len() == 3));
}

#[test]
fn collapse_dumps_the_partition_and_tridiagonal_chain() {
    let text = stdout_of(&["collapse", "--generation", "3", "--times", "1,5"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["direction"], "left-right");
    assert_eq!(doc["sizes"], serde_json::json!([4, 4, 2, 2, 2, 4, 4]));
    assert_eq!(doc["bonds"], serde_json::json!([8, 4, 2, 2, 4, 8]));
    assert_eq!(doc["clusters"][0], serde_json::json!([8, 9, 10, 11]));
    let matrix = doc["matrix"].as_array().unwrap();
    assert_eq!(matrix.len(), 7);
    assert_eq!(matrix[0][0].as_f64().unwrap(), 2.0);
    assert_eq!(matrix[0][1].as_f64().unwrap(), -2.0);
    assert_eq!(matrix[0][2].as_f64().unwrap(), 0.0);
    let chi: f64 = doc["chi"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((chi - 1.0).abs() < 1e-9);
    for slice in doc["series"].as_array().unwrap() {
        let pi: f64 = slice["pi"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((pi - 1.0).abs() < 1e-9);
    }
}

#[test]
fn collapse_csv_writes_the_structure_sidecar() {
    let dir = scratch_dir();
    let sidecar = dir.join("chain.json");
    let text = stdout_of(&[
        "collapse", "--generation", "2", "--direction", "top-bottom", "--times", "1",
        "--format", "csv", "--structure-out", sidecar.to_str().unwrap(),
    ]);
    assert_eq!(text.lines().next().unwrap(), "t,j,k,p,pi,ratio");
    assert_eq!(text.lines().count(), 1 + 5);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert_eq!(doc["direction"], "top-bottom");
    assert_eq!(doc["sizes"], serde_json::json!([1, 2, 4, 2, 1]));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn compare_emits_one_row_per_time_and_pair() {
    let text = stdout_of(&[
        "compare", "--generation", "2", "--pairs", "10:1,7:4", "--times", "1,5,20",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,j,k,p,pi,ratio");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1].contains(",10,1,"));
    assert!(lines[2].contains(",7,4,"));
}

#[test]
fn compare_leaves_the_ratio_empty_when_classically_unreachable() {
    let dir = scratch_dir();
    let path = dir.join("two-components.edges");
    std::fs::write(&path, "1 2\n3 4\n").unwrap();
    let text = stdout_of(&[
        "compare", "--graph-file", path.to_str().unwrap(), "--pairs", "3:1", "--times", "2",
    ]);
    let row = text.lines().nth(1).unwrap();
    assert!(row.ends_with(','), "row should end with empty ratio: {row}");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn output_dir_env_var_prefixes_relative_paths() {
    let dir = scratch_dir();
    let out = Command::new(env!("CARGO_BIN_EXE_ctqw"))
        .args(["generate", "--generation", "1", "--output", "tree.edges"])
        .env("CTQW_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.join("tree.edges")).unwrap();
    assert_eq!(written, "1 2\n1 3\n2 4\n3 4\n");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn invalid_node_ids_exit_2() {
    let out = ctqw(&["propagate", "--generation", "2", "--start", "99", "--times", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("99"));

    let out = ctqw(&["compare", "--generation", "1", "--pairs", "9:1", "--times", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ctqw(&["collapse", "--generation", "2", "--start", "9", "--times", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_graph_files_exit_2_with_line_numbers() {
    let dir = scratch_dir();
    let path = dir.join("bad.edges");
    std::fs::write(&path, "1 2\n1 2\n").unwrap();
    let out = ctqw(&["spectrum", "--graph-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn unwritable_output_exits_4() {
    let out = ctqw(&[
        "limit", "--generation", "1", "--start", "1",
        "--output", "/nonexistent-dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn invalid_gamma_and_times_exit_2() {
    let out = ctqw(&["propagate", "--generation", "1", "--start", "1", "--gamma", "0", "--times", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ctqw(&["propagate", "--generation", "1", "--start", "1", "--times", "-3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ctqw(&["propagate", "--generation", "1", "--start", "1", "--t-max", "10"]);
    assert_eq!(out.status.code(), Some(2)); // --t-max without --t-steps
}
