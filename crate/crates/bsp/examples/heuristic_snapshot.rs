//! Compare every heuristic at one belief state.
//!
//! The cube-in-toilet variant (CBTC: one of four packages, dunking clogs)
//! separates the substrates nicely at the goal side of regression:
//! a single union graph can't tell the four worlds apart, per-world graphs
//! aggregated by max miss cross-world work sharing, sums overcount shared
//! actions, and the labelled graph's relaxed plan lands in between —
//! closest to the true cost h* = 5 without going over it here.

use bsp::cli::{fmt_value, snapshot_table};
use bsp::heuristic::Direction;
use bsp::model::gen_cbtc;
use bsp::search::bfs_oracle;

fn main() {
    let (mut store, problem) = gen_cbtc().expect("generator");
    println!("heuristic values at the goal side of {} (regression):\n", problem.name);

    let rows = snapshot_table(
        &mut store,
        &problem,
        Direction::Regression,
        problem.goal,
        1.0,
        0,
    )
    .unwrap();
    for (name, v) in &rows {
        println!("  {name:<14} {}", fmt_value(*v));
    }
    let hstar = bfs_oracle(&mut store, &problem, 100_000).unwrap().unwrap();
    println!("  {:<14} {hstar}   (exact, by belief-space value iteration)", "h*");

    let get = |name: &str| rows.iter().find(|(n, _)| n == name).unwrap().1;
    assert_eq!(get("card"), 4.0); // one model per package position
    assert_eq!(get("sg:rp"), 2.0); // union graph: one dunk "covers" all worlds
    assert_eq!(get("mg:rp:max"), 2.0); // hardest single world still needs 2
    assert_eq!(get("mg:rp:sum"), 4.0); // double-counts the shared flush
    assert_eq!(get("mg:rpu"), 3.0); // layer-wise union de-duplicates it
    assert_eq!(get("lug:rp"), 3.0); // labelled cover agrees with the union
    assert_eq!(get("lug:level"), 2.0); // without mutexes
    assert_eq!(get("lug:level:fx"), 3.0); // mutexes push the goal a level out
    assert_eq!(hstar, 5);
}
