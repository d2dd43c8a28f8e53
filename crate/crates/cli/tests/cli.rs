use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use allocflow_cli::{render_solve, Method, EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_USAGE};
use allocflow_core::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn allocflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_allocflow")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_table4_d2_runs_on_fog() {
    let out = allocflow(&["solve", path(&fixture("table4_d2.json"))]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["time_seconds"], 8.0);
    for node in v["placement"].as_object().unwrap().values() {
        assert_eq!(node, "fog");
    }
}

#[test]
fn binary_matches_library_rendering() {
    let file = fixture("example1.json");
    let inst = load_instance_for_test(&file);
    let m = Model::new(&inst, DEFAULT_FLOW_CAP).unwrap();
    let o = Objective::distance(&inst);
    let r = solve_branch_bound(&m, &o, None).unwrap();
    let expected = render_solve(&m, &o, Method::Ours, &r).unwrap();
    let out = allocflow(&["solve", path(&file)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);

    let b = solve_baseline(&m).unwrap();
    let expected = render_solve(&m, &o, Method::Baseline, &b).unwrap();
    let out = allocflow(&["solve", path(&file), "--method", "baseline"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

fn load_instance_for_test(p: &Path) -> ProblemInstance {
    parse_problem(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn invalid_instance_exits_one() {
    let out = allocflow(&["validate", path(&fixture("cycle.json"))]);
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());

    let out = allocflow(&["solve", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(allocflow(&["solve"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(allocflow(&["frobnicate"]).status.code(), Some(EXIT_USAGE));
    let f = fixture("example1.json");
    assert_eq!(allocflow(&["solve", path(&f), "--wm", "-1"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(allocflow(&["simulate", path(&f), "--trials", "0"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(allocflow(&["bench", "--edge-prob", "2"]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn enumeration_cap_exits_three() {
    let out = allocflow(&["solve", path(&fixture("table4_d1.json")), "--oracle", "--cap", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_CAP));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("result.json");
    let f = fixture("example1.json");
    let out = allocflow(&["solve", path(&f), "--out", path(&target)]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    let direct = allocflow(&["solve", path(&f)]);
    assert_eq!(std::fs::read(&target).unwrap(), direct.stdout);
}

#[test]
fn examples_match_bundled_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = allocflow(&["examples", "--dir", path(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    for (name, _) in fixtures::bundled() {
        let written = std::fs::read_to_string(dir.path().join(&name)).unwrap();
        let stored = std::fs::read_to_string(fixture(&name)).unwrap();
        assert_eq!(written, stored, "{name}");
    }
}

#[test]
fn flows_and_time_and_memory() {
    let f = fixture("table4_d2.json");
    let out = allocflow(&["flows", path(&f), "--count-only"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let count: usize = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(count >= 1);

    let inst = load_instance_for_test(&f);
    let dir = tempfile::tempdir().unwrap();
    let placement = dir.path().join("p.json");
    std::fs::write(&placement, serde_json::to_string(&Placement::uniform(&inst, "fog")).unwrap()).unwrap();
    let out = allocflow(&["time", path(&f), "--placement", path(&placement), "--aggregate", "max"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8(out.stdout).unwrap().contains("# max 8"));
    let out = allocflow(&["memory", path(&f), "--placement", path(&placement)]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8(out.stdout).unwrap().contains("robot"));
}

#[test]
fn run_is_thread_count_independent() {
    let f = fixture("table4_d4.json");
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let code = allocflow_cli::run(
            ["allocflow", "--threads", threads, "--seed", "3", "simulate", path(&f), "--trials", "20"],
            &mut stdout,
            &mut stderr,
        );
        assert_eq!(code, EXIT_OK);
        outputs.push(stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}
