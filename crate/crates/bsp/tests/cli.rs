//! End-to-end checks of the installed binary: exit codes, plan output,
//! the STATS line, bench CSV, and the snapshot table.

use std::path::Path;
use std::process::{Command, Output};

use bsp::cli::{parse_stats_line, RunStatus, CSV_HEADER};

fn bsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsp"))
        .args(args)
        .env_remove("BSP_TIMEOUT_S")
        .env_remove("BSP_SEED")
        .output()
        .expect("spawn bsp")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_conformant_prints_plan_and_stats() {
    let out = bsp(&["solve", "--gen", "btc:2", "--dir", "regress", "--h", "zero"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..3], &["DunkP2", "Flush", "DunkP1"]);
    let stats = parse_stats_line(lines.last().unwrap()).expect("final line is STATS");
    assert_eq!(stats.problem, "btc:2");
    assert_eq!(stats.spec, "zero");
    assert_eq!(stats.status, RunStatus::Ok);
    assert_eq!(stats.plan_len, Some(3));
}

#[test]
fn solve_progression_branches_and_counts_the_longest_path() {
    let out = bsp(&["solve", "--gen", "bt:2", "--h", "lug:rp", "--w", "5", "--dir", "progress"]);
    assert_eq!(out.status.code(), Some(0));
    let stats = parse_stats_line(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(stats.plan_len, Some(2));

    let out = bsp(&["solve", "--gen", "btcs", "--dir", "progress", "--h", "lug:rp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("obs inP1:"));
    assert!(text.contains("obs (not inP1):"));
    assert_eq!(parse_stats_line(text.lines().last().unwrap()).unwrap().plan_len, Some(2));
}

#[test]
fn usage_errors_exit_3() {
    // A spec that parses as a substrate but misuses the tail.
    let out = bsp(&["solve", "--gen", "btc:2", "--h", "sg:rp:sum"]);
    assert_eq!(out.status.code(), Some(3));
    // Unknown generator.
    let out = bsp(&["solve", "--gen", "nosuch:3"]);
    assert_eq!(out.status.code(), Some(3));
    // Missing problem selector entirely.
    let out = bsp(&["solve", "--h", "zero"]);
    assert_eq!(out.status.code(), Some(3));
    // Cross-world pairing is not a CLI option.
    let out = bsp(&["solve", "--gen", "btc:2", "--h", "lug:rp", "--mutex", "fx-cross"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unsolvable_exits_1_and_timeout_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stuck.bsp");
    std::fs::write(
        &path,
        "(problem stuck (:fluents a b) (:init a) (:goal b) (:action Noop (:effect a)))",
    )
    .unwrap();
    let out = bsp(&["solve", "--file", path.to_str().unwrap(), "--h", "zero"]);
    assert_eq!(out.status.code(), Some(1));
    let stats = parse_stats_line(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(stats.status, RunStatus::Unsat);
    assert_eq!(stats.plan_len, None);

    let out = bsp(&["solve", "--gen", "btc:6", "--h", "zero", "--timeout", "0.000001"]);
    assert_eq!(out.status.code(), Some(2));
    let stats = parse_stats_line(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(stats.status, RunStatus::Timeout);
}

#[test]
fn timeout_honors_the_environment_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_bsp"))
        .args(["solve", "--gen", "btc:6", "--h", "zero"])
        .env("BSP_TIMEOUT_S", "0.000001")
        .env_remove("BSP_SEED")
        .output()
        .expect("spawn bsp");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_emits_the_csv_schema_in_suite_order() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.txt");
    std::fs::write(
        &suite,
        "# two solvable rows, one timeout, one broken\n\
         bt:2 card\n\
         btc:2 lug:rp 5 60\n\
         btc:4 zero 5 0.000001\n\
         nosuch:9 zero\n",
    )
    .unwrap();
    let out = bsp(&["bench", suite.to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    let field = |row: usize, col: usize| lines[row].split(',').nth(col).unwrap().to_string();
    // Rows keep suite order: problem is column 0, plan_len 5, status 6.
    assert_eq!(field(1, 0), "bt:2");
    assert_eq!(field(1, 5), "2");
    assert_eq!(field(1, 6), "OK");
    assert_eq!(field(2, 0), "btc:2");
    assert_eq!(field(2, 5), "3");
    assert_eq!(field(3, 0), "btc:4");
    assert_eq!(field(3, 5), "");
    assert_eq!(field(3, 6), "TO");
    assert_eq!(field(4, 6), "ERR");
}

#[test]
fn hsnapshot_prints_the_goal_side_table() {
    let out = bsp(&["hsnapshot", "--gen", "cbtc", "--dir", "regress"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let get = |name: &str| -> String {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .unwrap_or_else(|| panic!("row {name} missing"))
            .split_whitespace()
            .nth(1)
            .unwrap()
            .to_string()
    };
    assert_eq!(get("card"), "4");
    assert_eq!(get("sg:rp"), "2");
    assert_eq!(get("mg:rp:max"), "2");
    assert_eq!(get("mg:rp:sum"), "4");
    assert_eq!(get("mg:rpu"), "3");
    assert_eq!(get("lug:rp"), "3");
    assert_eq!(get("lug:level"), "2");
    assert_eq!(get("lug:level:fx"), "3");
    assert_eq!(get("h*"), "5");
}

#[test]
fn bundled_domains_solve_from_files() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let btcs = root.join("domains/btcs.bsp");
    let out = bsp(&["solve", "--file", btcs.to_str().unwrap(), "--dir", "progress"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("DetectMetal"));

    let btc3 = root.join("domains/btc3.bsp");
    let out = bsp(&["solve", "--file", btc3.to_str().unwrap(), "--h", "card"]);
    assert_eq!(out.status.code(), Some(0));
    let stats = parse_stats_line(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(stats.plan_len, Some(5));

    let medicate = root.join("domains/medicate.bsp");
    let out = bsp(&["solve", "--file", medicate.to_str().unwrap(), "--dir", "progress"]);
    assert_eq!(out.status.code(), Some(0));
    let stats = parse_stats_line(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(stats.plan_len, Some(2));
}
