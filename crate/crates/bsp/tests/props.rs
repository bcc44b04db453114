//! Randomized algebraic invariants of the formula store.
//!
//! Every property works over a 4-fluent universe, small enough that a
//! `u16` truth table is an exact semantic oracle: bit `i` is the value of
//! the formula in the state whose fluent bits spell `i`. Anything the
//! planner computes symbolically can be cross-checked against it.

use bsp::formula::{Formula, Lit, State, Store, Universe};
use proptest::prelude::*;
use std::collections::HashSet;

const N: usize = 4;
const STATES: usize = 1 << N;

fn store() -> Store {
    Store::new(Universe::new(["p", "q", "r", "s"]).unwrap())
}

fn state_of(index: usize) -> State {
    let mut s = State::new(N);
    for f in 0..N {
        s.set(f as u32, index >> f & 1 == 1);
    }
    s
}

/// The unique formula whose model set is the bit set of `table`.
fn from_table(st: &mut Store, table: u16) -> Formula {
    let mut acc = Formula::FALSE;
    for i in 0..STATES {
        if table >> i & 1 == 1 {
            let cube = st.state_cube(&state_of(i));
            acc = st.disj(acc, cube);
        }
    }
    acc
}

fn table_of(st: &Store, f: Formula) -> u16 {
    let mut t = 0u16;
    for i in 0..STATES {
        if st.eval(f, &state_of(i)) {
            t |= 1 << i;
        }
    }
    t
}

/// A random connective tree, deliberately redundant, to exercise builds
/// that differ structurally while meaning the same function.
#[derive(Debug, Clone)]
enum Expr {
    Leaf(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = (0..2 * N).prop_map(Expr::Leaf);
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
        ]
    })
}

fn build(st: &mut Store, e: &Expr) -> Formula {
    match e {
        Expr::Leaf(i) => st.lit(Lit::from_index(*i)),
        Expr::Not(a) => {
            let f = build(st, a);
            st.neg(f)
        }
        Expr::And(a, b) => {
            let fa = build(st, a);
            let fb = build(st, b);
            st.conj(fa, fb)
        }
        Expr::Or(a, b) => {
            let fa = build(st, a);
            let fb = build(st, b);
            st.disj(fa, fb)
        }
    }
}

fn eval_expr(e: &Expr, s: &State) -> bool {
    match e {
        Expr::Leaf(i) => s.holds(Lit::from_index(*i)),
        Expr::Not(a) => !eval_expr(a, s),
        Expr::And(a, b) => eval_expr(a, s) && eval_expr(b, s),
        Expr::Or(a, b) => eval_expr(a, s) || eval_expr(b, s),
    }
}

proptest! {
    /// Canonicity: however a function is built — a redundant connective
    /// tree or a minterm disjunction — it lands on the same handle, and
    /// `eval` agrees with a direct interpretation of the tree.
    #[test]
    fn equal_functions_share_a_handle(e in expr_strategy()) {
        let mut st = store();
        let f = build(&mut st, &e);
        for i in 0..STATES {
            prop_assert_eq!(st.eval(f, &state_of(i)), eval_expr(&e, &state_of(i)));
        }
        let table = table_of(&st, f);
        let g = from_table(&mut st, table);
        prop_assert_eq!(f, g);
    }

    /// The usual laws hold as handle identities, not just equivalences.
    #[test]
    fn boolean_laws_hold_on_handles(a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let g = from_table(&mut st, b);
        let h = from_table(&mut st, c);

        let fg = st.conj(f, g);
        let gf = st.conj(g, f);
        prop_assert_eq!(fg, gf);

        let fg_h = st.conj(fg, h);
        let gh = st.conj(g, h);
        let f_gh = st.conj(f, gh);
        prop_assert_eq!(fg_h, f_gh);

        let n_and = st.neg(fg);
        let nf = st.neg(f);
        let ng = st.neg(g);
        let or_n = st.disj(nf, ng);
        prop_assert_eq!(n_and, or_n);

        let absorbed = st.disj(f, fg);
        prop_assert_eq!(absorbed, f);

        let nn = st.neg(nf);
        prop_assert_eq!(nn, f);

        let g_or_h = st.disj(g, h);
        let left = st.conj(f, g_or_h);
        let fh = st.conj(f, h);
        let right = st.disj(fg, fh);
        prop_assert_eq!(left, right);
    }

    /// Entailment and disjointness are exactly model containment and
    /// model exclusion.
    #[test]
    fn entailment_is_model_containment(a in any::<u16>(), b in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let g = from_table(&mut st, b);
        prop_assert_eq!(st.entails(f, g), a & !b == 0);
        prop_assert_eq!(st.disjoint(f, g), a & b == 0);
        let n = st.neg(f);
        prop_assert_eq!(table_of(&st, n), !a);
    }

    /// Model enumeration lists exactly the oracle's states, each once,
    /// and agrees with the counter.
    #[test]
    fn model_listing_matches_counting(a in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let models = st.models(f).unwrap();
        prop_assert_eq!(models.len() as u128, st.count_models(f).unwrap());
        prop_assert_eq!(models.len(), a.count_ones() as usize);
        let distinct: HashSet<&State> = models.iter().collect();
        prop_assert_eq!(distinct.len(), models.len());
        for m in &models {
            prop_assert!(st.eval(f, m));
        }
    }

    /// The clausal cover keeps its whole documented contract: its
    /// conjunction is exactly the formula, every clause is an implicate,
    /// no clause survives a dropped literal, and none is redundant.
    #[test]
    fn clausal_cover_is_exact_minimal_irredundant(a in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let clauses = st.to_clauses(f).unwrap();
        let built: Vec<Formula> = clauses.iter().map(|c| st.clause(c)).collect();
        let cover = st.conj_all(built.iter().copied());
        prop_assert_eq!(cover, f);
        for (i, c) in clauses.iter().enumerate() {
            prop_assert!(st.entails(f, built[i]));
            for j in 0..c.len() {
                let mut shrunk = c.clone();
                shrunk.remove(j);
                let sf = st.clause(&shrunk);
                prop_assert!(!st.entails(f, sf), "clause {c:?} keeps a spare literal");
            }
            let rest = st.conj_all(
                built.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &g)| g),
            );
            prop_assert_ne!(rest, f, "clause {:?} is redundant", c);
        }
    }

    /// Dual contract for the constituent cover: its disjunction is exactly
    /// the formula, every cube is an implicant, each is literal-minimal,
    /// and none is redundant.
    #[test]
    fn constituent_cover_is_exact_minimal_irredundant(a in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let cubes = st.to_constituents(f).unwrap();
        let built: Vec<Formula> = cubes.iter().map(|c| st.cube(c)).collect();
        let cover = st.disj_all(built.iter().copied());
        prop_assert_eq!(cover, f);
        for (i, c) in cubes.iter().enumerate() {
            prop_assert!(!built[i].is_false(), "constituent {c:?} is inconsistent");
            prop_assert!(st.entails(built[i], f));
            for j in 0..c.len() {
                let mut wide = c.clone();
                wide.remove(j);
                let wf = st.cube(&wide);
                prop_assert!(!st.entails(wf, f), "cube {c:?} keeps a spare literal");
            }
            let rest = st.disj_all(
                built.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &g)| g),
            );
            prop_assert_ne!(rest, f, "cube {:?} is redundant", c);
        }
    }

    /// Cofactors drop the fluent from the support, recombine by Shannon
    /// expansion, and their disjunction is existential quantification.
    #[test]
    fn shannon_expansion_round_trips(a in any::<u16>(), v in 0..N as u32) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let hi = st.cofactor(f, v, true);
        let lo = st.cofactor(f, v, false);
        prop_assert!(!st.support(hi).contains(&v));
        prop_assert!(!st.support(lo).contains(&v));
        let pv = st.lit(Lit::pos(v));
        let nv = st.lit(Lit::neg(v));
        let t_hi = st.conj(pv, hi);
        let t_lo = st.conj(nv, lo);
        let back = st.disj(t_hi, t_lo);
        prop_assert_eq!(back, f);
        let ex = st.exists(f, v);
        let both = st.disj(hi, lo);
        prop_assert_eq!(ex, both);
    }

    /// Pretty-printing then parsing is the identity on handles.
    #[test]
    fn printing_then_parsing_is_identity(a in any::<u16>()) {
        let mut st = store();
        let f = from_table(&mut st, a);
        let text = st.print_formula(f).unwrap();
        let g = st.parse_formula(&text).unwrap();
        prop_assert_eq!(g, f);
    }
}
