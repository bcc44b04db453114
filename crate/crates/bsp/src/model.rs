//! Problem model: fluents, actions with conditional effects and
//! observations, initial/goal beliefs; the `.bsp` text format; and the
//! benchmark problem generators.
//!
//! An action is `⟨precondition, effects, observations⟩`:
//!
//! * the *precondition* is a consistent conjunction of literals that must be
//!   known to hold (entailed by the belief) for the action to apply;
//! * each *effect* is `antecedent ⟹ consequent`, both consistent literal
//!   conjunctions; effect 0 always exists and is the unconditional one
//!   (antecedent ⊤). In a given world every effect whose antecedent holds
//!   fires simultaneously;
//! * *observations* are formulas describing mutually exclusive sensor
//!   readings; after acting, the belief is partitioned by the readings.
//!
//! Disjunction is normalized away at parse time: a disjunctive precondition
//! splits an action into replicas (`name~1`, `name~2`, ...), a disjunctive
//! effect antecedent splits the effect. Disjunctive effect consequents are
//! rejected.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::formula::{normalize_cube, Formula, Lit, State, Store, Universe};
use crate::sexpr::{self, err_at, Sexpr};
use crate::{Error, Result};

/// One conditional effect: if `antecedent` held before the action, then
/// `consequent` holds after. Both are consistent sorted literal cubes; an
/// empty cube is ⊤.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub antecedent: Vec<Lit>,
    pub consequent: Vec<Lit>,
}

#[derive(Debug, Clone)]
pub struct Action {
    pub name: String,
    /// Consistent sorted literal cube; empty = always applicable.
    pub precondition: Vec<Lit>,
    /// `effects[0]` is the unconditional effect (empty antecedent).
    pub effects: Vec<Effect>,
    /// Sensor readings observed after acting; empty for causative actions.
    pub observations: Vec<Formula>,
}

impl Action {
    pub fn has_observations(&self) -> bool {
        !self.observations.is_empty()
    }
}

#[derive(Debug)]
pub struct Problem {
    pub name: String,
    /// Copy of the owning store's universe, for name lookups without the
    /// store at hand.
    pub universe: Universe,
    pub actions: Vec<Action>,
    /// Initial belief state; never ⊥.
    pub init: Formula,
    /// Goal belief state; never ⊥.
    pub goal: Formula,
    /// Non-fatal issues found while loading (e.g. overlapping readings).
    pub warnings: Vec<String>,
}

impl Problem {
    pub fn action_by_name(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn has_observations(&self) -> bool {
        self.actions.iter().any(Action::has_observations)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// A literal: `name` or `(not name)`.
fn parse_lit(uni: &Universe, node: &Sexpr) -> Result<Lit> {
    if let Some(name) = node.atom() {
        let f = uni.id(name).ok_or_else(|| err_at(node, format!("unknown fluent `{name}`")))?;
        return Ok(Lit::pos(f));
    }
    let items = node.list().unwrap();
    if node.head().as_deref() == Some("not") && items.len() == 2 {
        if let Some(name) = items[1].atom() {
            let f = uni
                .id(name)
                .ok_or_else(|| err_at(&items[1], format!("unknown fluent `{name}`")))?;
            return Ok(Lit::neg(f));
        }
    }
    Err(err_at(node, "expected a literal: `name` or `(not name)`"))
}

/// A consistent conjunction of literals: `LIT` or `(and LIT*)`.
fn parse_lit_conj(uni: &Universe, node: &Sexpr, what: &str) -> Result<Vec<Lit>> {
    let lits = if node.head().as_deref() == Some("and") {
        node.list().unwrap()[1..]
            .iter()
            .map(|n| parse_lit(uni, n))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![parse_lit(uni, node)?]
    };
    normalize_cube(lits).ok_or_else(|| err_at(node, format!("contradictory literals in {what}")))
}

/// `LITCONJ` or `(or LITCONJ+)`, normalized to a list of disjunct cubes.
fn parse_disj_of_conj(uni: &Universe, node: &Sexpr, what: &str) -> Result<Vec<Vec<Lit>>> {
    if node.head().as_deref() == Some("or") {
        let items = &node.list().unwrap()[1..];
        if items.is_empty() {
            return Err(err_at(node, format!("empty disjunction in {what}")));
        }
        items.iter().map(|n| parse_lit_conj(uni, n, what)).collect()
    } else {
        Ok(vec![parse_lit_conj(uni, node, what)?])
    }
}

struct ParsedEffects {
    unconditional: Vec<Lit>,
    conditional: Vec<Effect>,
}

/// `:effect` body: literals and `(when ANTE CONS)` items, possibly wrapped
/// in one `(and ...)`.
fn parse_effect_body(uni: &Universe, node: &Sexpr, action: &str) -> Result<ParsedEffects> {
    let items: Vec<&Sexpr> = if node.head().as_deref() == Some("and") {
        node.list().unwrap()[1..].iter().collect()
    } else {
        vec![node]
    };
    let mut unconditional = Vec::new();
    let mut conditional = Vec::new();
    for item in items {
        if item.head().as_deref() == Some("when") {
            let parts = item.list().unwrap();
            if parts.len() != 3 {
                return Err(err_at(item, "`when` takes an antecedent and a consequent"));
            }
            if parts[2].head().as_deref() == Some("or") {
                return Err(Error::DisjunctiveConsequent(action.to_string()));
            }
            let consequent = parse_lit_conj(uni, &parts[2], "effect consequent")?;
            for antecedent in parse_disj_of_conj(uni, &parts[1], "effect antecedent")? {
                conditional.push(Effect { antecedent, consequent: consequent.clone() });
            }
        } else if item.head().as_deref() == Some("or") {
            return Err(Error::DisjunctiveConsequent(action.to_string()));
        } else {
            unconditional.push(parse_lit(uni, item)?);
        }
    }
    let unconditional = normalize_cube(unconditional)
        .ok_or_else(|| err_at(node, "contradictory literals in unconditional effect"))?;
    Ok(ParsedEffects { unconditional, conditional })
}

fn section_items<'a>(node: &'a Sexpr, keyword: &str) -> Result<&'a [Sexpr]> {
    let items = node
        .list()
        .ok_or_else(|| err_at(node, format!("expected a `({keyword} ...)` section")))?;
    Ok(&items[1..])
}

/// Parse a problem in the `.bsp` text format, creating a fresh store for
/// its formulas.
///
/// ```text
/// (problem NAME
///   (:fluents a b ...)
///   (:init FORMULA)
///   (:goal FORMULA)
///   (:action NAME
///     (:precondition PRE)          ; optional, default ⊤
///     (:effect EFF)                ; optional
///     (:observation FORMULA+))     ; optional, repeatable
///   ...)
/// ```
pub fn parse_problem(text: &str) -> Result<(Store, Problem)> {
    let top = sexpr::parse_one(text)?;
    if top.head().as_deref() != Some("problem") {
        return Err(err_at(&top, "expected `(problem NAME ...)`"));
    }
    let items = top.list().unwrap();
    if items.len() < 2 || items[1].atom().is_none() {
        return Err(err_at(&top, "problem needs a name"));
    }
    let name = items[1].atom().unwrap().to_string();

    // First pass: find the fluent declaration (required, unique).
    let mut fluent_decl: Option<&Sexpr> = None;
    for section in &items[2..] {
        if section.head().as_deref() == Some(":fluents") {
            if fluent_decl.is_some() {
                return Err(err_at(section, "duplicate `:fluents` section"));
            }
            fluent_decl = Some(section);
        }
    }
    let fluent_decl = fluent_decl
        .ok_or_else(|| err_at(&top, "missing `(:fluents ...)` section"))?;
    let mut names = Vec::new();
    for item in section_items(fluent_decl, ":fluents")? {
        match item.atom() {
            Some(n) => names.push(n.to_string()),
            None => return Err(err_at(item, "fluent names must be atoms")),
        }
    }
    if names.is_empty() {
        return Err(err_at(fluent_decl, "`:fluents` must declare at least one fluent"));
    }
    let uni = Universe::new(names).map_err(|e| match e {
        Error::Invalid(msg) => err_at(fluent_decl, msg),
        other => other,
    })?;
    let mut store = Store::new(uni);

    let mut init: Option<Formula> = None;
    let mut goal: Option<Formula> = None;
    let mut actions: Vec<Action> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    for section in &items[2..] {
        match section.head().as_deref() {
            Some(":fluents") => {}
            Some(":init") => {
                if init.is_some() {
                    return Err(err_at(section, "duplicate `:init` section"));
                }
                let body = section_items(section, ":init")?;
                if body.len() != 1 {
                    return Err(err_at(section, "`:init` takes exactly one formula"));
                }
                init = Some(store.formula_from_sexpr(&body[0])?);
            }
            Some(":goal") => {
                if goal.is_some() {
                    return Err(err_at(section, "duplicate `:goal` section"));
                }
                let body = section_items(section, ":goal")?;
                if body.len() != 1 {
                    return Err(err_at(section, "`:goal` takes exactly one formula"));
                }
                goal = Some(store.formula_from_sexpr(&body[0])?);
            }
            Some(":action") => {
                let body = section_items(section, ":action")?;
                if body.is_empty() || body[0].atom().is_none() {
                    return Err(err_at(section, "action needs a name"));
                }
                let act_name = body[0].atom().unwrap().to_string();
                let mut pre_disjuncts: Vec<Vec<Lit>> = vec![Vec::new()];
                let mut parsed_effects: Option<ParsedEffects> = None;
                let mut observations: Vec<Formula> = Vec::new();
                let mut seen_pre = false;
                for part in &body[1..] {
                    match part.head().as_deref() {
                        Some(":precondition") => {
                            if seen_pre {
                                return Err(err_at(part, "duplicate `:precondition`"));
                            }
                            seen_pre = true;
                            let b = section_items(part, ":precondition")?;
                            if b.len() != 1 {
                                return Err(err_at(part, "`:precondition` takes one form"));
                            }
                            pre_disjuncts = parse_disj_of_conj(store.universe(), &b[0], "precondition")?;
                        }
                        Some(":effect") => {
                            if parsed_effects.is_some() {
                                return Err(err_at(part, "duplicate `:effect`"));
                            }
                            let b = section_items(part, ":effect")?;
                            if b.len() != 1 {
                                return Err(err_at(part, "`:effect` takes one form"));
                            }
                            parsed_effects = Some(parse_effect_body(store.universe(), &b[0], &act_name)?);
                        }
                        Some(":observation") => {
                            let b = section_items(part, ":observation")?;
                            if b.is_empty() {
                                return Err(err_at(part, "`:observation` needs at least one reading"));
                            }
                            for r in b {
                                observations.push(store.formula_from_sexpr(r)?);
                            }
                        }
                        _ => return Err(err_at(part, "expected :precondition, :effect or :observation")),
                    }
                }
                let parsed = parsed_effects
                    .unwrap_or(ParsedEffects { unconditional: Vec::new(), conditional: Vec::new() });
                let mut effects = vec![Effect { antecedent: Vec::new(), consequent: parsed.unconditional }];
                effects.extend(parsed.conditional);
                for (i, reading) in observations.iter().enumerate() {
                    for (j, other) in observations.iter().enumerate().skip(i + 1) {
                        if !store.disjoint(*reading, *other) {
                            warnings.push(format!(
                                "action `{act_name}`: readings {i} and {j} are jointly satisfiable"
                            ));
                        }
                    }
                }
                let replicate = pre_disjuncts.len() > 1;
                for (i, pre) in pre_disjuncts.into_iter().enumerate() {
                    let name = if replicate { format!("{act_name}~{}", i + 1) } else { act_name.clone() };
                    actions.push(Action {
                        name,
                        precondition: pre,
                        effects: effects.clone(),
                        observations: observations.clone(),
                    });
                }
            }
            _ => return Err(err_at(section, "expected :fluents, :init, :goal or :action")),
        }
    }

    let init = init.ok_or_else(|| err_at(&top, "missing `(:init ...)` section"))?;
    let goal = goal.ok_or_else(|| err_at(&top, "missing `(:goal ...)` section"))?;
    if init.is_false() {
        return Err(Error::Invalid("initial belief is inconsistent (no possible world)".into()));
    }
    if goal.is_false() {
        return Err(Error::Invalid("goal belief is inconsistent (unsatisfiable)".into()));
    }
    let mut seen = HashSet::new();
    for a in &actions {
        if !seen.insert(a.name.clone()) {
            return Err(Error::Invalid(format!("duplicate action name `{}`", a.name)));
        }
    }

    let universe = store.universe().clone();
    Ok((store, Problem { name, universe, actions, init, goal, warnings }))
}

/// Render a problem in the `.bsp` format. Parsing the output yields a
/// structurally identical problem (same actions, equivalent formulas).
pub fn print_problem(store: &mut Store, p: &Problem) -> Result<String> {
    let uni = &p.universe;
    let mut out = String::new();
    let _ = writeln!(out, "(problem {}", p.name);
    let names: Vec<&str> = uni.fluents().map(|f| uni.name(f)).collect();
    let _ = writeln!(out, "  (:fluents {})", names.join(" "));
    let _ = writeln!(out, "  (:init {})", store.print_formula(p.init)?);
    let _ = writeln!(out, "  (:goal {})", store.print_formula(p.goal)?);
    for a in &p.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let cube_str = |lits: &[Lit]| -> String {
            let parts: Vec<String> = lits.iter().map(|l| l.display(uni)).collect();
            format!("(and {})", parts.join(" "))
        };
        let _ = writeln!(out, "    (:precondition {})", cube_str(&a.precondition));
        let mut eff_parts: Vec<String> =
            a.effects[0].consequent.iter().map(|l| l.display(uni)).collect();
        for e in &a.effects[1..] {
            eff_parts.push(format!("(when {} {})", cube_str(&e.antecedent), cube_str(&e.consequent)));
        }
        let _ = writeln!(out, "    (:effect (and {}))", eff_parts.join(" "));
        if !a.observations.is_empty() {
            let readings: Vec<String> = a
                .observations
                .iter()
                .map(|r| store.print_formula(*r))
                .collect::<Result<_>>()?;
            let _ = writeln!(out, "    (:observation {})", readings.join(" "));
        }
        let _ = writeln!(out, "  )");
    }
    out.push_str(")\n");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invalid(msg.into()))
    }
}

fn build(
    name: String,
    store: Store,
    actions: Vec<Action>,
    init: Formula,
    goal: Formula,
) -> (Store, Problem) {
    let universe = store.universe().clone();
    (store, Problem { name, universe, actions, init, goal, warnings: Vec::new() })
}

fn oneof_lits(store: &mut Store, fluents: &[u32]) -> Formula {
    let mut acc = Formula::FALSE;
    for &i in fluents {
        let mut term = Formula::TRUE;
        for &j in fluents {
            let l = store.lit(Lit::new(j, i == j));
            term = store.conj(term, l);
        }
        acc = store.disj(acc, term);
    }
    acc
}

/// Bomb in the Toilet with `n` packages: exactly one package holds the bomb;
/// dunking package i defuses it if the bomb is there. Conformant optimum: n.
pub fn gen_bt(n: usize) -> Result<(Store, Problem)> {
    require(n >= 1, "bt needs at least 1 package")?;
    let mut names: Vec<String> = (1..=n).map(|i| format!("inP{i}")).collect();
    names.push("arm".into());
    let mut store = Store::new(Universe::new(names)?);
    let arm = n as u32;
    let actions: Vec<Action> = (0..n)
        .map(|i| Action {
            name: format!("DunkP{}", i + 1),
            precondition: vec![],
            effects: vec![
                Effect { antecedent: vec![], consequent: vec![] },
                Effect { antecedent: vec![Lit::pos(i as u32)], consequent: vec![Lit::neg(arm)] },
            ],
            observations: vec![],
        })
        .collect();
    let packages: Vec<u32> = (0..n as u32).collect();
    let one = oneof_lits(&mut store, &packages);
    let arm_f = store.lit(Lit::pos(arm));
    let init = store.conj(arm_f, one);
    let goal = store.lit(Lit::neg(arm));
    Ok(build(format!("bt:{n}"), store, actions, init, goal))
}

/// Bomb in the Toilet with Clogging: dunking clogs the toilet; `Flush`
/// unclogs it. Conformant optimum: 2n−1.
pub fn gen_btc(n: usize) -> Result<(Store, Problem)> {
    require(n >= 1, "btc needs at least 1 package")?;
    let mut names: Vec<String> = (1..=n).map(|i| format!("inP{i}")).collect();
    names.push("arm".into());
    names.push("clog".into());
    let mut store = Store::new(Universe::new(names)?);
    let arm = n as u32;
    let clog = n as u32 + 1;
    let mut actions: Vec<Action> = (0..n)
        .map(|i| Action {
            name: format!("DunkP{}", i + 1),
            precondition: vec![Lit::neg(clog)],
            effects: vec![
                Effect { antecedent: vec![], consequent: vec![Lit::pos(clog)] },
                Effect { antecedent: vec![Lit::pos(i as u32)], consequent: vec![Lit::neg(arm)] },
            ],
            observations: vec![],
        })
        .collect();
    actions.push(Action {
        name: "Flush".into(),
        precondition: vec![],
        effects: vec![Effect { antecedent: vec![], consequent: vec![Lit::neg(clog)] }],
        observations: vec![],
    });
    let packages: Vec<u32> = (0..n as u32).collect();
    let one = oneof_lits(&mut store, &packages);
    let known = store.cube(&[Lit::pos(arm), Lit::neg(clog)]);
    let init = store.conj(known, one);
    let goal = store.lit(Lit::neg(arm));
    Ok(build(format!("btc:{n}"), store, actions, init, goal))
}

/// Two-package BTC variant that starts clogged and must end unclogged as
/// well as disarmed. Optimal conformant plan: 5 steps.
pub fn gen_cbtc() -> Result<(Store, Problem)> {
    let (mut store, mut p) = gen_btc(2)?;
    let arm = p.universe.id("arm").unwrap();
    let clog = p.universe.id("clog").unwrap();
    let packages = [p.universe.id("inP1").unwrap(), p.universe.id("inP2").unwrap()];
    let one = oneof_lits(&mut store, &packages);
    let known = store.cube(&[Lit::pos(arm), Lit::pos(clog)]);
    p.init = store.conj(known, one);
    p.goal = store.cube(&[Lit::neg(arm), Lit::neg(clog)]);
    p.name = "cbtc".into();
    Ok((store, p))
}

/// BTC(2) plus a `DetectMetal` sensor that reports whether the bomb is in
/// package 1. Supports a 2-step conditional plan under progression.
pub fn gen_btcs() -> Result<(Store, Problem)> {
    let (mut store, mut p) = gen_btc(2)?;
    let in_p1 = store.lit(Lit::pos(p.universe.id("inP1").unwrap()));
    let not_in_p1 = store.neg(in_p1);
    p.actions.push(Action {
        name: "DetectMetal".into(),
        precondition: vec![],
        effects: vec![Effect { antecedent: vec![], consequent: vec![] }],
        observations: vec![in_p1, not_in_p1],
    });
    p.name = "btcs".into();
    Ok((store, p))
}

/// Cube world: position unknown in an n×n×n grid (n odd); moves shift one
/// step per axis, clamping at the boundary. Goal: reach the center.
/// Conformant optimum: 9(n−1)/2 (localize into a corner, then walk back).
pub fn gen_cube(n: usize) -> Result<(Store, Problem)> {
    require(n >= 1 && n % 2 == 1, "cube needs an odd size (the grid must have a center)")?;
    let dims = ["x", "y", "z"];
    let mut names = Vec::new();
    for d in dims {
        for i in 1..=n {
            names.push(format!("{d}{i}"));
        }
    }
    let mut store = Store::new(Universe::new(names)?);
    let at = |d: usize, i: usize| (d * n + i) as u32; // i is 0-based here
    let mut actions = Vec::new();
    for (d, dname) in dims.iter().enumerate() {
        for (suffix, step_up) in [("inc", true), ("dec", false)] {
            let mut effects = vec![Effect { antecedent: vec![], consequent: vec![] }];
            for i in 0..n {
                let j = if step_up { i + 1 } else { i.wrapping_sub(1) };
                if j >= n {
                    continue; // boundary: no movement effect
                }
                effects.push(Effect {
                    antecedent: vec![Lit::pos(at(d, i))],
                    consequent: normalize_cube(vec![Lit::neg(at(d, i)), Lit::pos(at(d, j))]).unwrap(),
                });
            }
            actions.push(Action {
                name: format!("{suffix}-{dname}"),
                precondition: vec![],
                effects,
                observations: vec![],
            });
        }
    }
    let mut init = Formula::TRUE;
    for d in 0..3 {
        let fluents: Vec<u32> = (0..n).map(|i| at(d, i)).collect();
        let one = oneof_lits(&mut store, &fluents);
        init = store.conj(init, one);
    }
    let center = (n - 1) / 2;
    let goal = store.cube(&[Lit::pos(at(0, center)), Lit::pos(at(1, center)), Lit::pos(at(2, center))]);
    Ok(build(format!("cube:{n}"), store, actions, init, goal))
}

/// Ring of `n` rooms, each with a window that may be open, closed, or
/// closed and locked; position unknown. Goal: all windows locked.
/// Conformant optimum: 3n−1 (close, lock, move around the ring).
pub fn gen_ring(n: usize) -> Result<(Store, Problem)> {
    require(n >= 2, "ring needs at least 2 rooms")?;
    let mut names = Vec::new();
    for kind in ["at", "closed", "locked"] {
        for r in 1..=n {
            names.push(format!("{kind}{r}"));
        }
    }
    let mut store = Store::new(Universe::new(names)?);
    let at = |r: usize| r as u32;
    let closed = |r: usize| (n + r) as u32;
    let locked = |r: usize| (2 * n + r) as u32;

    let move_action = |name: &str, target: &dyn Fn(usize) -> usize| -> Action {
        let mut effects = vec![Effect { antecedent: vec![], consequent: vec![] }];
        for r in 0..n {
            effects.push(Effect {
                antecedent: vec![Lit::pos(at(r))],
                consequent: normalize_cube(vec![Lit::neg(at(r)), Lit::pos(at(target(r)))]).unwrap(),
            });
        }
        Action { name: name.into(), precondition: vec![], effects, observations: vec![] }
    };
    let mut actions = vec![
        move_action("move-right", &|r| (r + 1) % n),
        move_action("move-left", &|r| (r + n - 1) % n),
    ];
    let mut close_effects = vec![Effect { antecedent: vec![], consequent: vec![] }];
    for r in 0..n {
        close_effects.push(Effect {
            antecedent: vec![Lit::pos(at(r))],
            consequent: vec![Lit::pos(closed(r))],
        });
    }
    actions.push(Action {
        name: "close".into(),
        precondition: vec![],
        effects: close_effects,
        observations: vec![],
    });
    let mut lock_effects = vec![Effect { antecedent: vec![], consequent: vec![] }];
    for r in 0..n {
        lock_effects.push(Effect {
            antecedent: normalize_cube(vec![Lit::pos(at(r)), Lit::pos(closed(r))]).unwrap(),
            consequent: vec![Lit::pos(locked(r))],
        });
    }
    actions.push(Action {
        name: "lock".into(),
        precondition: vec![],
        effects: lock_effects,
        observations: vec![],
    });

    let positions: Vec<u32> = (0..n).map(at).collect();
    let mut init = oneof_lits(&mut store, &positions);
    for r in 0..n {
        // locked ⟹ closed: each window is open, closed, or closed+locked.
        let cl = store.lit(Lit::pos(closed(r)));
        let nl = store.lit(Lit::neg(locked(r)));
        let constraint = store.disj(cl, nl);
        init = store.conj(init, constraint);
    }
    let goal_lits: Vec<Lit> = (0..n).map(|r| Lit::pos(locked(r))).collect();
    let goal = store.cube(&goal_lits);
    Ok(build(format!("ring:{n}"), store, actions, init, goal))
}

/// Construct a generated problem from a CLI-style spec: `bt:N`, `btc:N`,
/// `cube:N`, `ring:N`, `cbtc`, `btcs`.
pub fn gen_by_name(spec: &str) -> Result<(Store, Problem)> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let size = |what: &str| -> Result<usize> {
        let a = arg.ok_or_else(|| Error::Invalid(format!("`{what}` needs a size, e.g. `{what}:3`")))?;
        a.parse::<usize>()
            .map_err(|_| Error::Invalid(format!("invalid size `{a}` for `{what}`")))
    };
    match name {
        "bt" => gen_bt(size("bt")?),
        "btc" => gen_btc(size("btc")?),
        "cube" => gen_cube(size("cube")?),
        "ring" => gen_ring(size("ring")?),
        "cbtc" => {
            require(arg.is_none(), "`cbtc` takes no size")?;
            gen_cbtc()
        }
        "btcs" => {
            require(arg.is_none(), "`btcs` takes no size")?;
            gen_btcs()
        }
        other => Err(Error::Invalid(format!(
            "unknown generator `{other}` (expected bt, btc, cbtc, btcs, cube, ring)"
        ))),
    }
}

/// Enumerate the possible worlds of a belief (initial belief sampling is
/// built on this; order is the store's lexicographic model order).
pub fn possible_worlds(store: &mut Store, belief: Formula) -> Result<Vec<State>> {
    store.models(belief)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_match_expected_counts() {
        for n in 1..=6 {
            let (mut st, p) = gen_bt(n).unwrap();
            assert_eq!(p.universe.len(), n + 1);
            assert_eq!(p.actions.len(), n);
            assert_eq!(st.count_models(p.init).unwrap(), n as u128);

            let (mut st, p) = gen_btc(n).unwrap();
            assert_eq!(p.universe.len(), n + 2);
            assert_eq!(p.actions.len(), n + 1);
            assert_eq!(st.count_models(p.init).unwrap(), n as u128);
        }
        let (mut st, p) = gen_cbtc().unwrap();
        assert_eq!(st.count_models(p.init).unwrap(), 2);
        assert_eq!(st.count_models(p.goal).unwrap(), 4);

        for n in [1, 3, 5] {
            let (mut st, p) = gen_cube(n).unwrap();
            assert_eq!(p.universe.len(), 3 * n);
            assert_eq!(p.actions.len(), 6);
            assert_eq!(st.count_models(p.init).unwrap(), (n * n * n) as u128);
        }
        assert!(gen_cube(4).is_err());

        for n in 2..=4 {
            let (mut st, p) = gen_ring(n).unwrap();
            assert_eq!(p.universe.len(), 3 * n);
            assert_eq!(p.actions.len(), 4);
            assert_eq!(st.count_models(p.init).unwrap(), (n as u128) * 3u128.pow(n as u32));
        }
        assert!(gen_ring(1).is_err());
    }

    #[test]
    fn effect_zero_is_always_unconditional() {
        for (_, p) in [
            gen_bt(3).unwrap(),
            gen_btc(3).unwrap(),
            gen_cbtc().unwrap(),
            gen_btcs().unwrap(),
            gen_cube(3).unwrap(),
            gen_ring(3).unwrap(),
        ] {
            for a in &p.actions {
                assert!(!a.effects.is_empty(), "{}", a.name);
                assert!(a.effects[0].antecedent.is_empty(), "{}", a.name);
            }
        }
    }

    const BTCS_TEXT: &str = "
(problem btcs
  (:fluents inP1 inP2 arm clog)
  (:init (and arm (not clog) (oneof inP1 inP2)))
  (:goal (not arm))
  (:action DunkP1
    (:precondition (not clog))
    (:effect (and clog (when inP1 (not arm)))))
  (:action DunkP2
    (:precondition (not clog))
    (:effect (and clog (when inP2 (not arm)))))
  (:action Flush
    (:effect (not clog)))
  (:action DetectMetal
    (:observation inP1 (not inP1))))
";

    #[test]
    fn parse_btcs_round_trip() {
        let (mut st, p) = parse_problem(BTCS_TEXT).unwrap();
        assert_eq!(p.name, "btcs");
        assert_eq!(p.actions.len(), 4);
        assert_eq!(st.count_models(p.init).unwrap(), 2);
        assert!(p.warnings.is_empty());
        let dunk1 = &p.actions[0];
        assert_eq!(dunk1.precondition, vec![Lit::neg(3)]);
        assert_eq!(dunk1.effects.len(), 2);
        assert_eq!(dunk1.effects[0].consequent, vec![Lit::pos(3)]);
        assert_eq!(dunk1.effects[1].antecedent, vec![Lit::pos(0)]);
        let detect = &p.actions[3];
        assert!(detect.has_observations());
        assert_eq!(detect.effects.len(), 1);

        // Printing re-parses to a structurally identical problem.
        let printed = print_problem(&mut st, &p).unwrap();
        let (mut st2, p2) = parse_problem(&printed).unwrap();
        let printed2 = print_problem(&mut st2, &p2).unwrap();
        assert_eq!(printed, printed2);
        assert_eq!(p.actions.len(), p2.actions.len());
        for (a, b) in p.actions.iter().zip(&p2.actions) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.precondition, b.precondition);
            assert_eq!(a.effects, b.effects);
        }
    }

    #[test]
    fn generated_problems_print_and_reparse() {
        for (mut st, p) in [gen_btc(3).unwrap(), gen_ring(2).unwrap(), gen_cube(3).unwrap()] {
            let printed = print_problem(&mut st, &p).unwrap();
            let (mut st2, p2) = parse_problem(&printed).unwrap();
            assert_eq!(st2.count_models(p2.init).unwrap(), st.count_models(p.init).unwrap());
            assert_eq!(p2.actions.len(), p.actions.len());
        }
    }

    #[test]
    fn disjunctive_preconditions_replicate() {
        let text = "
(problem d
  (:fluents a b g)
  (:init (oneof a b))
  (:goal g)
  (:action go
    (:precondition (or a (and b (not a))))
    (:effect g)))
";
        let (_, p) = parse_problem(text).unwrap();
        assert_eq!(p.actions.len(), 2);
        assert_eq!(p.actions[0].name, "go~1");
        assert_eq!(p.actions[1].name, "go~2");
        assert_eq!(p.actions[0].precondition, vec![Lit::pos(0)]);
        assert_eq!(p.actions[0].effects[0].consequent, vec![Lit::pos(2)]);
    }

    #[test]
    fn disjunctive_antecedents_replicate_effects() {
        let text = "
(problem d
  (:fluents a b g)
  (:init a)
  (:goal g)
  (:action go
    (:effect (when (or a b) g))))
";
        let (_, p) = parse_problem(text).unwrap();
        let a = &p.actions[0];
        assert_eq!(a.effects.len(), 3); // inserted ⊤-effect + two replicas
        assert_eq!(a.effects[1].antecedent, vec![Lit::pos(0)]);
        assert_eq!(a.effects[2].antecedent, vec![Lit::pos(1)]);
    }

    #[test]
    fn parse_errors() {
        let empty_init = "(problem p (:fluents a) (:init) (:goal a))";
        assert!(matches!(parse_problem(empty_init), Err(Error::Syntax { .. })));

        let unknown = "(problem p (:fluents a) (:init b) (:goal a))";
        match parse_problem(unknown) {
            Err(Error::Syntax { msg, .. }) => assert!(msg.contains("`b`")),
            other => panic!("expected unknown fluent, got {other:?}"),
        }

        let disj_cons = "
(problem p (:fluents a b) (:init a) (:goal b)
  (:action x (:effect (when a (or a b)))))
";
        assert!(matches!(parse_problem(disj_cons), Err(Error::DisjunctiveConsequent(_))));

        let false_init = "(problem p (:fluents a) (:init (and a (not a))) (:goal a))";
        assert!(matches!(parse_problem(false_init), Err(Error::Invalid(_))));

        let no_fluents = "(problem p (:init a) (:goal a))";
        assert!(parse_problem(no_fluents).is_err());
    }

    #[test]
    fn overlapping_readings_warn() {
        let text = "
(problem p (:fluents a b) (:init (or a b)) (:goal a)
  (:action look (:observation a b)))
";
        let (_, p) = parse_problem(text).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].contains("jointly satisfiable"));
    }

    #[test]
    fn gen_by_name_dispatch() {
        assert_eq!(gen_by_name("bt:4").unwrap().1.actions.len(), 4);
        assert_eq!(gen_by_name("cbtc").unwrap().1.name, "cbtc");
        assert_eq!(gen_by_name("btcs").unwrap().1.actions.len(), 4);
        assert!(gen_by_name("bt").is_err());
        assert!(gen_by_name("bt:x").is_err());
        assert!(gen_by_name("cbtc:3").is_err());
        assert!(gen_by_name("nope:1").is_err());
    }
}
