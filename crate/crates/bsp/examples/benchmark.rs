//! Run a small benchmark matrix in-process and print the CSV the `bench`
//! subcommand would emit: bomb-in-the-toilet sizes 2..=6 under a blind
//! cardinality heuristic and the labelled relaxed plan. Rows run on two
//! worker threads, each with its own formula store; output order is still
//! suite order.

use bsp::cli::{csv_row, run_suite, RunStatus, SuiteRow, CSV_HEADER};
use bsp::heuristic::Direction;

fn main() {
    let mut rows = Vec::new();
    for n in 2..=6 {
        for spec in ["card", "lug:rp"] {
            rows.push(SuiteRow {
                problem: format!("bt:{n}"),
                spec: spec.to_string(),
                weight: 5.0,
                timeout_s: 60.0,
            });
        }
    }

    let lines = run_suite(&rows, Direction::Regression, 2, 1.0, 0, &None);

    println!("{CSV_HEADER}");
    for l in &lines {
        println!("{}", csv_row(l));
    }

    // Every instance solves, and the plan dunks each package exactly once.
    assert_eq!(lines.len(), rows.len());
    for (row, line) in rows.iter().zip(&lines) {
        assert_eq!(line.status, RunStatus::Ok);
        let n: usize = row.problem.split(':').nth(1).unwrap().parse().unwrap();
        assert_eq!(line.plan_len, Some(n));
    }
}
