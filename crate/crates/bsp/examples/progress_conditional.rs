//! Forward search over belief states, branching on sensor readings.
//!
//! Progression applies an action to a belief wholesale (the action must be
//! applicable in *every* world of the belief), then a sensing action
//! partitions the result into one successor per consistent reading. AO*
//! searches the resulting AND-OR space and returns a conditional plan.

use bsp::heuristic::{Direction, Evaluator, HeuristicSpec};
use bsp::model::gen_btcs;
use bsp::search::{aostar_progress, validate, Outcome};
use bsp::transition::{applicable, progress};

fn main() {
    let (mut store, problem) = gen_btcs().expect("generator");
    println!("init: {}\n", store.print_formula(problem.init).unwrap());

    // A causative action yields one successor; a sensor splits the belief
    // into observational classes, one per reading consistent with it.
    let dunk1 = &problem.actions[problem.action_by_name("DunkP1").unwrap()];
    let detect = &problem.actions[problem.action_by_name("DetectMetal").unwrap()];
    assert!(applicable(&mut store, dunk1, problem.init));

    let after_dunk = progress(&mut store, dunk1, problem.init).unwrap();
    assert_eq!(after_dunk.len(), 1);
    println!(
        "DunkP1      -> {}",
        store.print_formula(after_dunk[0].belief).unwrap()
    );

    let readings = progress(&mut store, detect, problem.init).unwrap();
    assert_eq!(readings.len(), 2);
    for s in &readings {
        println!(
            "DetectMetal -> saw {:<10} now {}",
            store.print_formula(s.reading.unwrap()).unwrap(),
            store.print_formula(s.belief).unwrap()
        );
    }

    // AO* turns the split into a two-branch conditional plan: sense, then
    // dunk exactly the package that holds the bomb.
    let spec: HeuristicSpec = "lug:rp".parse().unwrap();
    let mut eval = Evaluator::new(&problem, Direction::Progression, spec).unwrap();
    let res = aostar_progress(&mut store, &problem, &mut eval, 5.0, None).unwrap();
    let plan = match res.outcome {
        Outcome::Solved(plan) => plan,
        o => panic!("btcs is solvable, got {o:?}"),
    };
    println!("\nconditional plan:");
    print!("{}", plan.render(&mut store, &problem).unwrap());
    assert!(plan.is_conditional());
    assert_eq!(plan.max_path_len(), 2);

    // The validator replays the plan in every initial world.
    let report = validate(&mut store, &problem, &plan).unwrap();
    assert!(report.valid);
    println!("\nvalidated over {} worlds", report.worlds);
}
