//! Belief-state transition semantics: regression (for conformant A\*) and
//! progression (for conditional AO\*).
//!
//! Regression computes the weakest belief `BS'` such that executing `a` in
//! any world of `BS'` lands in `BS`:
//!
//! ```text
//! Regress(BS, a) = ρᵉ(a) ∧ ⋀_{C ∈ κ(BS)} ⋁_{l ∈ C} (Σ(a,l) ∧ IP(a,l))
//! Σ(a,l)  = l ∨ ⋁_{i : l ∈ εⁱ(a)} ρⁱ(a)        (causation)
//! IP(a,l) = ⋀_{i : ¬l ∈ εⁱ(a)} ¬ρⁱ(a)           (preservation)
//! ```
//!
//! Progression first applies the causative effects world-wise (computed
//! symbolically over firing patterns, cross-checked by the model-by-model
//! oracle [`progress_models`]), then partitions the result by the action's
//! sensor readings, dropping impossible branches.

use crate::formula::{normalize_cube, Formula, Lit, State, Store};
use crate::model::Action;
use crate::{Error, Result};

/// An action is relevant for regressing `bs` iff (i) its unconditional
/// effect is consistent with every constituent of `bs` and (ii) some effect
/// consequent contains a literal present in a constituent of `bs`.
pub fn is_relevant(store: &mut Store, action: &Action, bs: Formula) -> Result<bool> {
    let constituents = store.to_constituents(bs)?;
    let e0 = store.cube(&action.effects[0].consequent);
    for c in &constituents {
        let cf = store.cube(c);
        if store.disjoint(e0, cf) {
            return Ok(false);
        }
    }
    let gives = action
        .effects
        .iter()
        .flat_map(|e| e.consequent.iter())
        .any(|l| constituents.iter().any(|c| c.contains(l)));
    Ok(gives)
}

/// Regress `bs` through a causative action. The result is the raw weakest
/// precondition (callers decide whether ⊥ or non-new beliefs get pruned).
pub fn regress(store: &mut Store, action: &Action, bs: Formula) -> Result<Formula> {
    if action.has_observations() {
        return Err(Error::SensorNotSupported(action.name.clone()));
    }
    let mut result = store.cube(&action.precondition);
    for clause in store.to_clauses(bs)? {
        let mut regressed_clause = Formula::FALSE;
        for l in clause {
            // Σ(a,l): l already held, or some effect giving l fired.
            let mut sigma = store.lit(l);
            for e in &action.effects {
                if e.consequent.contains(&l) {
                    let ante = store.cube(&e.antecedent);
                    sigma = store.disj(sigma, ante);
                }
            }
            // IP(a,l): no effect clobbering l fired.
            let mut ip = Formula::TRUE;
            let nl = l.negated();
            for e in &action.effects {
                if e.consequent.contains(&nl) {
                    let ante = store.cube(&e.antecedent);
                    let n = store.neg(ante);
                    ip = store.conj(ip, n);
                }
            }
            let term = store.conj(sigma, ip);
            regressed_clause = store.disj(regressed_clause, term);
        }
        result = store.conj(result, regressed_clause);
    }
    Ok(result)
}

/// One branch of a progression: the successor belief, tagged with the
/// sensor reading that selects it (`None` for causative-only actions).
#[derive(Debug, Clone, Copy)]
pub struct Successor {
    pub belief: Formula,
    pub reading: Option<Formula>,
    pub reading_index: Option<usize>,
}

/// Whether `a` applies to the belief: the precondition must be *known*,
/// i.e. entailed by `bs`.
pub fn applicable(store: &mut Store, action: &Action, bs: Formula) -> bool {
    let pre = store.cube(&action.precondition);
    store.entails(bs, pre)
}

/// Progress `bs` through `a`. Empty result iff `a` is not applicable.
/// Causative actions yield one successor; an action with observations
/// yields one branch per consistent sensor reading.
pub fn progress(store: &mut Store, action: &Action, bs: Formula) -> Result<Vec<Successor>> {
    if !applicable(store, action, bs) {
        return Ok(Vec::new());
    }
    let image = causative_image(store, action, bs)?;
    debug_assert!(!image.is_false(), "image of a non-empty belief is non-empty");
    if action.observations.is_empty() {
        return Ok(vec![Successor { belief: image, reading: None, reading_index: None }]);
    }
    let mut out = Vec::new();
    for (j, &reading) in action.observations.iter().enumerate() {
        let branch = store.conj(image, reading);
        if !branch.is_false() {
            out.push(Successor { belief: branch, reading: Some(reading), reading_index: Some(j) });
        }
    }
    Ok(out)
}

/// Symbolic image of the causative part of `a` over `bs`: partition `bs`
/// into firing patterns (which conditional effects' antecedents hold),
/// forget the affected fluents in each region, and assert the fired
/// consequents.
fn causative_image(store: &mut Store, action: &Action, bs: Formula) -> Result<Formula> {
    let mut fired: Vec<usize> = Vec::new();
    let mut acc = Formula::FALSE;
    image_rec(store, action, bs, 1, &mut fired, &mut acc)?;
    Ok(acc)
}

fn image_rec(
    store: &mut Store,
    action: &Action,
    region: Formula,
    next: usize,
    fired: &mut Vec<usize>,
    acc: &mut Formula,
) -> Result<()> {
    if region.is_false() {
        return Ok(());
    }
    if next == action.effects.len() {
        let mut gives: Vec<Lit> = action.effects[0].consequent.clone();
        for &i in fired.iter() {
            gives.extend_from_slice(&action.effects[i].consequent);
        }
        let gives = normalize_cube(gives)
            .ok_or_else(|| Error::EffectConflict(action.name.clone()))?;
        let vars: Vec<u32> = {
            let mut v: Vec<u32> = gives.iter().map(|l| l.fluent()).collect();
            v.dedup();
            v
        };
        let shadow = store.exists_many(region, &vars);
        let cube = store.cube(&gives);
        let chunk = store.conj(shadow, cube);
        *acc = store.disj(*acc, chunk);
        return Ok(());
    }
    let ante = store.cube(&action.effects[next].antecedent);
    let on = store.conj(region, ante);
    let n_ante = store.neg(ante);
    let off = store.conj(region, n_ante);
    fired.push(next);
    image_rec(store, action, on, next + 1, fired, acc)?;
    fired.pop();
    image_rec(store, action, off, next + 1, fired, acc)
}

/// Progress a single complete world state; `s` must satisfy the
/// precondition. Errors if two fired effects assert contradictory literals.
pub fn progress_state(action: &Action, s: &State) -> Result<State> {
    debug_assert!(action.precondition.iter().all(|l| s.holds(*l)));
    let mut gives: Vec<Lit> = Vec::new();
    for e in &action.effects {
        if e.antecedent.iter().all(|l| s.holds(*l)) {
            gives.extend_from_slice(&e.consequent);
        }
    }
    let gives =
        normalize_cube(gives).ok_or_else(|| Error::EffectConflict(action.name.clone()))?;
    let mut out = s.clone();
    for l in gives {
        out.set(l.fluent(), l.is_positive());
    }
    Ok(out)
}

/// Model-by-model progression oracle: identical contract to [`progress`]
/// but computed by enumerating and advancing every possible world. Used to
/// cross-check the symbolic image.
pub fn progress_models(store: &mut Store, action: &Action, bs: Formula) -> Result<Vec<Successor>> {
    if !applicable(store, action, bs) {
        return Ok(Vec::new());
    }
    let worlds = store.models(bs)?;
    let mut image = Formula::FALSE;
    for w in &worlds {
        let next = progress_state(action, w)?;
        let cube = store.state_cube(&next);
        image = store.disj(image, cube);
    }
    if action.observations.is_empty() {
        return Ok(vec![Successor { belief: image, reading: None, reading_index: None }]);
    }
    let mut out = Vec::new();
    for (j, &reading) in action.observations.iter().enumerate() {
        let branch = store.conj(image, reading);
        if !branch.is_false() {
            out.push(Successor { belief: branch, reading: Some(reading), reading_index: Some(j) });
        }
    }
    Ok(out)
}
