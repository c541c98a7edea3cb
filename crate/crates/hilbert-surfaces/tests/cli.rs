//! End-to-end runs of the command line tool.

use std::process::{Command, Output};

const GOLDEN: &str = include_str!("data/invariants_table.md");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert-surfaces"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn markdown_table_is_byte_identical_to_golden() {
    let out = run(&["table", "6", "33", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), GOLDEN);
}

#[test]
fn table_is_deterministic() {
    let a = run(&["table", "6", "33", "--format", "json"]);
    let b = run(&["table", "6", "33", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_table_has_one_row_per_level() {
    let out = stdout(&run(&["table", "6", "33", "--format", "csv"]));
    assert_eq!(out.lines().count(), 80);
    assert!(out.lines().any(|l| l == "24,23,37,2,0,0,-124,,-1"));
}

#[test]
fn single_level_table() {
    let out = stdout(&run(&["table", "17", "17", "--format", "markdown"]));
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(
        rows,
        vec![
            "| 17 | 1 | 10 | 2 | 1 | 3 | -20 | -2 | 0 |",
            "| 17 | 3 | 10 | 2 | 1 | 4 | -16 | -2 | 0 |"
        ]
    );
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["table", "5", "33"]).status.code(), Some(2));
    let missing = run(&["invariants", "40", "1"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(stderr(&missing).contains("Kani-Schanz"));
    assert_eq!(run(&["invariants", "12", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["oracle-verify", "--max-level", "30"]).status.code(),
        Some(4)
    );
    assert_eq!(
        run(&["diagram", "17", "1", "9", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["table", "6", "7", "--format", "svg"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn invariants_report_in_json() {
    let out = run(&["invariants", "17", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["row"]["pg_w"], 1);
    assert_eq!(value["row"]["kw_sq"], -20);
    assert_eq!(value["row"]["ksmall_sq"], -2);
    assert_eq!(value["frak_m_levels"], serde_json::json!([8, 9, 19]));
    assert!(stderr(&out).is_empty());
}

#[test]
fn representative_is_normalised_with_a_notice() {
    let out = run(&["invariants", "17", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["row"]["r"], 1);
    assert!(stderr(&out).contains("normalised to r = 1"));
}

#[test]
fn classify_both_surfaces() {
    assert_eq!(
        stdout(&run(&["classify", "21", "2"])),
        "W(21,2): blown_up_elliptic_K3 (kappa 0)\n"
    );
    assert_eq!(
        stdout(&run(&["classify", "11", "1", "--surface", "z"])),
        "Z(11,1): properly_elliptic (kappa 1)\n"
    );
    assert_eq!(
        stdout(&run(&["classify", "40", "1"])),
        "W(40,1): general_type (kappa 2)\n"
    );
}

#[test]
fn resolve_prints_chain_and_multiplicities() {
    let out = stdout(&run(&["resolve", "16", "5", "--level", "16"]));
    assert!(out.contains("[[4,2,2,2,2]]"));
    assert!(out.contains("a = [16, 5, 4, 3, 2, 1, 0]"));
    assert!(out.contains("a' = [0, 1, 4, 7, 10, 13, 16]"));
}

#[test]
fn diagram_examples() {
    let out = stdout(&run(&["diagram", "16", "5", "21"]));
    assert!(
        out.contains("cusp [1,1] (width 21, Fricke width 1) meets chain (16,5) = [[4,2,2,2,2]]")
    );
    assert!(out.contains("marks: E0 x1, C1 x1"));
    assert!(out.contains("cusp [1,7] (width 3, Fricke width 7) meets chain (16,5) = [[4,2,2,2,2]]\n  E0 --- C1(-4) --- C2(-2) --- C3(-2) --- C4(-2) --- C5(-2) --- E6\n  marks: C3 x1"));
    let out = stdout(&run(&["diagram", "17", "1", "9"]));
    assert!(
        out.contains("chain (17,9) = [[2,9]]\n  E0 --- C1(-2) --- C2(-9) --- E3\n  marks: C1 x1")
    );
    let out = stdout(&run(&["diagram", "17", "1", "15"]));
    assert!(out.contains("chain (17,4) = [[5,2,2,2]]\n  E0 --- C1(-5) --- C2(-2) --- C3(-2) --- C4(-2) --- E5\n  marks: C2 x1"));
    assert!(out.contains("marks: C8 x1"));
}

#[test]
fn diagram_formats_and_ambiguity() {
    let svg = run(&["diagram", "16", "5", "21", "--format", "svg"]);
    assert!(stdout(&svg).starts_with("<svg"));
    assert!(stdout(&svg).trim_end().ends_with("</svg>"));
    let dot = stdout(&run(&["diagram", "16", "5", "21", "--format", "dot"]));
    assert!(dot.starts_with("graph incidence {"));
    let ambiguous = run(&["diagram", "5", "1", "21"]);
    assert_eq!(ambiguous.status.code(), Some(0));
    assert!(stdout(&ambiguous).contains("ambiguous"));
    assert!(stderr(&ambiguous).contains("warning"));
}

#[test]
fn diagram_written_to_file() {
    let path = std::env::temp_dir().join(format!("incidence-{}.svg", std::process::id()));
    let out = run(&[
        "diagram",
        "17",
        "1",
        "9",
        "--format",
        "svg",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.starts_with("<svg"));
}

#[test]
fn oracle_verify_small() {
    let out = run(&["oracle-verify", "--max-level", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let total = text.lines().last().unwrap();
    let checks: usize = total
        .split(", ")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(checks >= 6, "{total}");
}

#[test]
fn base_data_override_replaces_bundled_rows() {
    let path = std::env::temp_dir().join(format!("base-{}.csv", std::process::id()));
    std::fs::write(&path, "N,r,pg_Z,c1sq_Z\n17,1,10,-16\n").unwrap();
    let out = run(&[
        "invariants",
        "17",
        "1",
        "--base-data",
        path.to_str().unwrap(),
    ]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["row"]["pg_w"], 1);
    assert_eq!(value["row"]["kw_sq"], -41);
}
