//! Walk the regression semantics by hand on the two-package
//! bomb-in-the-toilet problem, then let A* find the same plan.
//!
//! Regression maps a belief state `BS` through an action to the weakest
//! belief that is guaranteed to reach `BS` when the action runs. Search
//! proceeds goal-side: it stops at the first regressed belief the initial
//! belief entails, and the chain of actions walked from the goal is read
//! off in execution order.

use bsp::heuristic::{Direction, Evaluator, HeuristicSpec};
use bsp::model::gen_btc;
use bsp::search::{astar_regress, Outcome};
use bsp::transition::{is_relevant, regress};

fn main() {
    let (mut store, problem) = gen_btc(2).expect("generator");
    println!("problem: {}", problem.name);
    println!("init:    {}", store.print_formula(problem.init).unwrap());
    println!("goal:    {}\n", store.print_formula(problem.goal).unwrap());

    // Regress the goal (not arm) through each action by hand.
    let dunk1 = problem.action_by_name("DunkP1").unwrap();
    let flush = problem.action_by_name("Flush").unwrap();
    let bs2 = regress(&mut store, &problem.actions[dunk1], problem.goal).unwrap();
    println!("Regress(goal, DunkP1) = {}", store.print_formula(bs2).unwrap());
    let bs4 = regress(&mut store, &problem.actions[flush], bs2).unwrap();
    println!("Regress(^,    Flush)  = {}", store.print_formula(bs4).unwrap());

    // Flush is only *relevant* to beliefs it can actually help: it gives
    // (not clog), so regressing the bare goal through it changes nothing.
    assert!(!is_relevant(&mut store, &problem.actions[flush], problem.goal).unwrap());
    assert!(is_relevant(&mut store, &problem.actions[flush], bs2).unwrap());

    // The belief after also dunking package 2 must cover both worlds:
    // whichever package held the bomb, some dunk disarmed it.
    let dunk2 = problem.action_by_name("DunkP2").unwrap();
    let bs9 = regress(&mut store, &problem.actions[dunk2], bs4).unwrap();
    println!("Regress(^,    DunkP2) = {}", store.print_formula(bs9).unwrap());
    assert!(store.entails(problem.init, bs9));

    // A* regression finds exactly that three-step conformant plan.
    let spec: HeuristicSpec = "lug:rp".parse().unwrap();
    let mut eval = Evaluator::new(&problem, Direction::Regression, spec).unwrap();
    let res = astar_regress(&mut store, &problem, &mut eval, 5.0, None).unwrap();
    let plan = match res.outcome {
        Outcome::Solved(plan) => plan,
        o => panic!("btc:2 is solvable, got {o:?}"),
    };
    println!("\nplan ({} expanded):", res.stats.expanded);
    print!("{}", plan.render(&mut store, &problem).unwrap());
    let names: Vec<&str> = plan
        .steps()
        .unwrap()
        .into_iter()
        .map(|a| problem.actions[a].name.as_str())
        .collect();
    assert_eq!(names, ["DunkP2", "Flush", "DunkP1"]);
}
