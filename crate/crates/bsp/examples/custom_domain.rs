//! Load a hand-written problem file and solve it both ways.
//!
//! The medicate domain: the patient has exactly one of two illnesses.
//! Progression may sense, so its conditional plan diagnoses first and
//! gives exactly one medicine. Regression is conformant-only and refuses
//! problems with sensors outright; drop the sensor and it cures blindly
//! with both medicines. Also round-trips the file through the printer to
//! show the two formats agree.

use std::path::Path;

use bsp::heuristic::{Direction, Evaluator, HeuristicSpec};
use bsp::model::{parse_problem, print_problem};
use bsp::search::{aostar_progress, astar_regress, validate, Outcome, Plan};
use bsp::Error;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("domains/medicate.bsp");
    let text = std::fs::read_to_string(path).expect("bundled domain file");
    let (mut store, mut problem) = parse_problem(&text).expect("well-formed problem");

    let printed = print_problem(&mut store, &problem).unwrap();
    println!("{printed}");
    let (mut store2, reparsed) = parse_problem(&printed).expect("printer output parses");
    assert_eq!(reparsed.actions.len(), problem.actions.len());
    assert_eq!(
        store2.count_models(reparsed.init).unwrap(),
        store.count_models(problem.init).unwrap()
    );

    // Progression branches on the Inspect reading; each branch is one step.
    let spec: HeuristicSpec = "lug:rp".parse().unwrap();
    let mut eval = Evaluator::new(&problem, Direction::Progression, spec).unwrap();
    let res = aostar_progress(&mut store, &problem, &mut eval, 5.0, None).unwrap();
    let conditional = solved(res.outcome);
    println!("conditional plan:");
    print!("{}", conditional.render(&mut store, &problem).unwrap());
    assert!(conditional.is_conditional());
    assert_eq!(conditional.max_path_len(), 2);
    assert!(validate(&mut store, &problem, &conditional).unwrap().valid);

    // Backward search cannot branch, so it rejects the problem as long as
    // the sensor is present rather than silently planning around it.
    let mut eval = Evaluator::new(&problem, Direction::Regression, spec).unwrap();
    let err = astar_regress(&mut store, &problem, &mut eval, 5.0, None).unwrap_err();
    assert!(matches!(err, Error::SensorNotSupported(_)));
    println!("\nregression refused while Inspect exists: {err}");

    problem.actions.retain(|a| a.observations.is_empty());
    let mut eval = Evaluator::new(&problem, Direction::Regression, spec).unwrap();
    let res = astar_regress(&mut store, &problem, &mut eval, 5.0, None).unwrap();
    let conformant = solved(res.outcome);
    println!("\nconformant plan without the sensor:");
    print!("{}", conformant.render(&mut store, &problem).unwrap());
    assert_eq!(conformant.max_path_len(), 2);
    assert!(!conformant.is_conditional());
    assert!(validate(&mut store, &problem, &conformant).unwrap().valid);
}

fn solved(outcome: Outcome) -> Plan {
    match outcome {
        Outcome::Solved(plan) => plan,
        o => panic!("medicate is solvable, got {o:?}"),
    }
}
