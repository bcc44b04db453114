//! Inspect a labelled planning graph (LUG) layer by layer.
//!
//! One graph covers all possible worlds: each literal, action, and effect
//! carries a *label*, the formula over the seed belief describing exactly
//! which worlds reach it at that level. A literal is reachable for the
//! whole belief at the first level whose label the seed belief entails.

use bsp::formula::{Formula, Lit};
use bsp::graphs::{build_lug, dump_lug, GroundSet};
use bsp::model::gen_cbtc;
use bsp::mutex::{lug_first_reachable, MutexScheme};

fn main() {
    let (mut store, problem) = gen_cbtc().expect("generator");
    let ground = GroundSet::new(&problem);
    let lug = build_lug(&mut store, &ground, problem.init, MutexScheme::NONE, 1.0, 0)
        .expect("labelled graph");

    println!("{}", dump_lug(&mut store, &lug, &ground, &problem).unwrap());

    // The toilet starts clogged and dunking needs it clear, so (not arm)
    // is two causal steps out: Flush gives (not clog) at level 1, the
    // dunks fire at level 1, and each world's own dunk delivers (not arm)
    // at level 2 — at which point its label covers the whole seed belief.
    let not_arm = Lit::neg(problem.universe.id("arm").unwrap());
    for k in 0..lug.levels() {
        let label = lug.lit_label(k, not_arm);
        println!(
            "label of (not arm) at level {k}: {}",
            store.print_formula(label).unwrap()
        );
    }
    assert_eq!(lug.lit_label(0, not_arm), Formula::FALSE);
    assert_eq!(lug.lit_label(1, not_arm), Formula::FALSE);
    let l2 = lug.lit_label(2, not_arm);
    assert!(store.entails(problem.init, l2));

    // Labels extend from literals to arbitrary formulas by substitution,
    // which `lug_first_reachable` uses to level whole belief states.
    let goal_level = lug_first_reachable(&mut store, &lug, problem.goal).unwrap();
    println!("goal first reachable (no mutexes): level {goal_level:?}");
    assert_eq!(goal_level, Some(2));
}
