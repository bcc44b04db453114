//! Show what mutex propagation buys: deeper, more honest level estimates.
//!
//! In the clogged bomb-in-the-toilet problem both goal literals appear at
//! level 2, but they can't be achieved together there: every disarming dunk
//! clogs the toilet, so (not arm) and (not clog) interfere until level 3.
//! Tracking mutexes moves the goal's level — and every heuristic built on
//! it — from 2 to 3.

use bsp::formula::Lit;
use bsp::graphs::{build_single, GroundSet};
use bsp::model::gen_cbtc;
use bsp::mutex::{lug_first_reachable, MutexDepth, MutexScheme};

fn main() {
    let (mut store, problem) = gen_cbtc().expect("generator");
    let ground = GroundSet::new(&problem);
    let arm = problem.universe.id("arm").unwrap();
    let clog = problem.universe.id("clog").unwrap();
    let goal_lits = [Lit::neg(arm), Lit::neg(clog)];

    // Classical graph from one world, with and without full mutexes.
    let world = [Lit::pos(arm), Lit::pos(clog), Lit::pos(problem.universe.id("inP1").unwrap()), Lit::neg(problem.universe.id("inP2").unwrap())];
    let plain = build_single(&ground, &world, MutexDepth::Nx);
    let full = build_single(&ground, &world, MutexDepth::Fx);
    for l in goal_lits {
        assert_eq!(plain.lit_level(l), full.lit_level(l));
    }
    println!("goal cube level, no mutexes:   {:?}", plain.cube_level(&goal_lits));
    println!("goal cube level, full mutexes: {:?}", full.cube_level(&goal_lits));
    assert_eq!(plain.cube_level(&goal_lits), Some(2));
    assert_eq!(full.cube_level(&goal_lits), Some(3));
    assert!(full.lit_mutex_at(2, goal_lits[0], goal_lits[1]));

    // The labelled graph carries the same relation per world: the mutex
    // between the goal literals at level 2 is labelled with the worlds it
    // holds in — here all of them.
    let lug = build_lug_with(&mut store, &ground, &problem, MutexScheme::same(MutexDepth::Fx));
    let level2 = lug.mutex_level(2).expect("labelled mutexes are tracked");
    let label = level2.lit_label(goal_lits[0], goal_lits[1]);
    println!(
        "labelled mutex (not arm)/(not clog) at level 2 holds in: {}",
        store.print_formula(label).unwrap()
    );
    assert!(store.entails(problem.init, label));

    let lax = build_lug_with(&mut store, &ground, &problem, MutexScheme::NONE);
    let without = lug_first_reachable(&mut store, &lax, problem.goal).unwrap();
    let with = lug_first_reachable(&mut store, &lug, problem.goal).unwrap();
    println!("goal first reachable without mutexes: {without:?}");
    println!("goal first reachable with FX mutexes: {with:?}");
    assert_eq!(without, Some(2));
    assert_eq!(with, Some(3));
}

fn build_lug_with(
    store: &mut bsp::formula::Store,
    ground: &GroundSet,
    problem: &bsp::model::Problem,
    scheme: MutexScheme,
) -> bsp::graphs::Lug {
    bsp::graphs::build_lug(store, ground, problem.init, scheme, 1.0, 0).expect("labelled graph")
}
