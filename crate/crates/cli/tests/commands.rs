use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn jobmarket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jobmarket"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = jobmarket(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn extremes_lists_nine_points() {
    let text = stdout(&["extremes", &fixture("example1.json")]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(
        lines[1].split_whitespace().collect::<Vec<_>>(),
        ["9", "4", "|", "3", "2", "0"]
    );
    assert_eq!(
        lines[9].split_whitespace().collect::<Vec<_>>(),
        ["0", "0", "|", "8", "6", "4"]
    );
    assert_eq!(lines[10], "9 extreme points from 28 of 48 extended orders");
}

#[test]
fn extremes_json_is_valid() {
    let text = stdout(&["extremes", "--json", &fixture("example1.json")]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["extremes"].as_array().unwrap().len(), 9);
    assert_eq!(doc["orders"], 48);
    assert_eq!(doc["extremes"][8]["orders"].as_array().unwrap().len(), 9);
}

#[test]
fn witness_table_has_every_order() {
    let text = stdout(&["extremes", "--witnesses", &fixture("example1.json")]);
    let rows: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| l.starts_with('('))
        .collect();
    assert_eq!(rows.len(), 48);
    assert_eq!(rows.iter().filter(|r| r.ends_with('+')).count(), 28);
}

#[test]
fn digraph_dot_output() {
    let text = stdout(&["digraph", &fixture("example1.json"), "3,2,0", "--dot"]);
    let arcs: Vec<&str> = text
        .lines()
        .filter(|l| l.contains("->"))
        .map(str::trim)
        .collect();
    assert_eq!(arcs, ["0 -> 3;", "3 -> 1;", "3 -> 2;"]);
}

#[test]
fn solution_concepts() {
    let m = fixture("example1.json");
    assert_eq!(stdout(&["nucleolus", &m]), "(4, 9/4; 23/4, 17/4, 7/4)\n");
    assert_eq!(stdout(&["tau", &m]), "(143/28, 13/7; 149/28, 27/7, 13/7)\n");
    assert_eq!(stdout(&["fair-division", &m]), "(9/2, 2; 11/2, 4, 2)\n");
    assert_eq!(
        stdout(&["--decimal", "2", "nucleolus", &m]),
        "(4.00, 2.25; 5.75, 4.25, 1.75)\n"
    );
}

#[test]
fn core_and_kernel_checks() {
    let m = fixture("example1.json");
    assert!(stdout(&["core", "check", &m, "3,2,0"]).starts_with("in core: yes"));
    let blocked = stdout(&["core", "check", &m, "9,4,4,1,0"]);
    assert!(blocked.starts_with("in core: no"), "{blocked}");
    assert!(stdout(&["kernel", "check", &m, "4,9/4,23/4,17/4,7/4"]).starts_with("in kernel: yes"));
    let e2 = fixture("example2.json");
    assert!(stdout(&["kernel", "check", &e2, "0,0,1,1,1"]).starts_with("in kernel: yes"));
}

#[test]
fn dominant_diagonal_and_convexity() {
    let text = stdout(&["dominant-diagonal", &fixture("dominant.json")]);
    assert!(text.starts_with("dominant diagonal: yes"), "{text}");
    let text = stdout(&["convex", &fixture("example1.json")]);
    assert_eq!(text, "convex market: no\nconvex game: no\n");
}

#[test]
fn kaneko_commands() {
    let k = fixture("kaneko.json");
    let text = stdout(&["kaneko", "extremes", &k]);
    assert!(text.contains("4 extreme CE payoff vectors"), "{text}");
    let text = stdout(&["kaneko", "digraph", &k, "4,2,0"]);
    assert!(
        text.starts_with("arcs: 0 -> 3, 1 -> 2, 2 -> 1, 3 -> 2\n"),
        "{text}"
    );
    let text = stdout(&["kaneko", "ce-check", &k, "4,2,0"]);
    assert!(text.contains("in CE: yes\nprices (4, 4)"), "{text}");
}

#[test]
fn exit_codes() {
    let bad = jobmarket(&["nucleolus", &fixture("negative.json")]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("negative.json:4:"), "{err}");

    let missing = jobmarket(&["nucleolus", &fixture("absent.json")]);
    assert_eq!(missing.status.code(), Some(1));

    let wrong_mode = jobmarket(&["kaneko", "extremes", &fixture("example1.json")]);
    assert_eq!(wrong_mode.status.code(), Some(1));

    let wrong_length = jobmarket(&["core", "check", &fixture("example1.json"), "1,2"]);
    assert_eq!(wrong_length.status.code(), Some(1));

    assert_eq!(jobmarket(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        jobmarket(&["salaries", &fixture("example1.json")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jobmarket(&["digraph", &fixture("example1.json"), "1,x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic() {
    let m = fixture("example1.json");
    for args in [
        vec!["extremes", "--table", m.as_str()],
        vec!["extremes", "--witnesses", m.as_str()],
        vec!["--jobs", "1", "extremes", "--json", m.as_str()],
    ] {
        assert_eq!(jobmarket(&args).stdout, jobmarket(&args).stdout);
    }
    assert_eq!(
        jobmarket(&["--jobs", "1", "extremes", &m]).stdout,
        jobmarket(&["--jobs", "4", "extremes", &m]).stdout
    );
}
