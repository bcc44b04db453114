//! Planning-graph substrates: the classical single graph (seeded from one
//! state or from a literal union), the per-world graph set, and the
//! labelled graph that folds all worlds into one structure.
//!
//! All graphs share a [`GroundSet`]: the problem's actions plus one
//! *persistence* action per literal `l` (precondition `l`, single
//! unconditional effect `l`), with dense ids for actions and effects.
//! Layers follow IPP structure: literal layer `L_k`, action layer `A_k`
//! (everything whose precondition is in `L_k`), effect layer `E_k`
//! (effects of present actions whose antecedents are in `L_k`);
//! `L_{k+1}` collects the consequents of `E_k`.
//!
//! The labelled graph attaches to every element a formula over the worlds
//! of the seed belief `BS_P` describing *from which worlds* the element is
//! optimistically reachable; an element is present iff its label is not ⊥.
//! Construction runs to level-off (no literal label or mutex changes) or
//! the level cap, in which case the graph is marked `truncated` and
//! heuristics treat unreached goals as unreachable.

use std::collections::HashMap;

use rand::SeedableRng;

use crate::formula::{Formula, Lit, State, Store};
use crate::model::Problem;
use crate::mutex::{self, ClassicalMutexLevel, LabelledMutexLevel, MutexDepth, MutexScheme, StaticTables};
use crate::{Error, Result};

/// Construction stops after this many levels and marks the graph truncated.
pub const LEVEL_CAP: usize = 128;

/// Dense ground elements shared by every graph over one problem:
/// real actions first, then one persistence action per literal index.
pub struct GroundSet {
    pub n_fluents: usize,
    pub n_real: usize,
    names: Vec<String>,
    pre: Vec<Vec<Lit>>,
    eff_start: Vec<usize>, // per action; effects are action-major
    eff_action: Vec<u32>,
    eff_index: Vec<u32>,
    ante: Vec<Vec<Lit>>,
    cons: Vec<Vec<Lit>>,
    supporters: Vec<Vec<u32>>, // per literal index: effects giving it
}

impl GroundSet {
    pub fn new(problem: &Problem) -> GroundSet {
        let n_fluents = problem.universe.len();
        let n_real = problem.actions.len();
        let mut names = Vec::new();
        let mut pre = Vec::new();
        let mut eff_start = Vec::new();
        let mut eff_action = Vec::new();
        let mut eff_index = Vec::new();
        let mut ante: Vec<Vec<Lit>> = Vec::new();
        let mut cons: Vec<Vec<Lit>> = Vec::new();
        for (i, a) in problem.actions.iter().enumerate() {
            names.push(a.name.clone());
            pre.push(a.precondition.clone());
            eff_start.push(ante.len());
            for (j, e) in a.effects.iter().enumerate() {
                eff_action.push(i as u32);
                eff_index.push(j as u32);
                ante.push(e.antecedent.clone());
                cons.push(e.consequent.clone());
            }
        }
        for li in 0..2 * n_fluents {
            let l = Lit::from_index(li);
            names.push(format!("persist({})", l.display(&problem.universe)));
            pre.push(vec![l]);
            eff_start.push(ante.len());
            eff_action.push((n_real + li) as u32);
            eff_index.push(0);
            ante.push(vec![]);
            cons.push(vec![l]);
        }
        eff_start.push(ante.len());
        let mut supporters = vec![Vec::new(); 2 * n_fluents];
        for (e, c) in cons.iter().enumerate() {
            for l in c {
                supporters[l.index()].push(e as u32);
            }
        }
        GroundSet { n_fluents, n_real, names, pre, eff_start, eff_action, eff_index, ante, cons, supporters }
    }

    pub fn action_count(&self) -> usize {
        self.n_real + 2 * self.n_fluents
    }

    pub fn effect_count(&self) -> usize {
        self.ante.len()
    }

    pub fn is_persist(&self, a: usize) -> bool {
        a >= self.n_real
    }

    pub fn persist_action(&self, l: Lit) -> usize {
        self.n_real + l.index()
    }

    /// The literal carried by a persistence action.
    pub fn persist_lit(&self, a: usize) -> Option<Lit> {
        (a >= self.n_real).then(|| Lit::from_index(a - self.n_real))
    }

    /// The single effect of `persist(l)`.
    pub fn persist_effect(&self, l: Lit) -> usize {
        self.eff_start[self.persist_action(l)]
    }

    pub fn action_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn pre(&self, a: usize) -> &[Lit] {
        &self.pre[a]
    }

    pub fn effects_of(&self, a: usize) -> std::ops::Range<usize> {
        self.eff_start[a]..self.eff_start[a + 1]
    }

    pub fn eff_action(&self, e: usize) -> usize {
        self.eff_action[e] as usize
    }

    /// Effect's index within its action (0 = the unconditional effect).
    pub fn eff_index(&self, e: usize) -> usize {
        self.eff_index[e] as usize
    }

    pub fn ante(&self, e: usize) -> &[Lit] {
        &self.ante[e]
    }

    pub fn cons(&self, e: usize) -> &[Lit] {
        &self.cons[e]
    }

    /// All effects (of any action) whose consequent contains `l`.
    pub fn supporters(&self, l: Lit) -> &[u32] {
        &self.supporters[l.index()]
    }

    pub fn eff_name(&self, e: usize) -> String {
        let a = self.eff_action(e);
        if self.is_persist(a) {
            self.names[a].clone()
        } else {
            format!("{}[{}]", self.names[a], self.eff_index(e))
        }
    }
}

// ---------------------------------------------------------------------------
// Classical (boolean) graphs: SG¹, SGᵁ, and MG members
// ---------------------------------------------------------------------------

/// One boolean layer: presence of literals (by literal index), actions,
/// effects (by dense id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CLayer {
    pub lits: Vec<bool>,
    pub acts: Vec<bool>,
    pub effs: Vec<bool>,
}

#[derive(Debug)]
pub struct ClassicalGraph {
    pub depth: MutexDepth,
    pub layers: Vec<CLayer>,
    /// One entry per layer when `depth != NX`, else empty.
    pub mutexes: Vec<ClassicalMutexLevel>,
    pub truncated: bool,
}

impl ClassicalGraph {
    pub fn levels(&self) -> usize {
        self.layers.len()
    }

    /// Presence with clamping: levels past the last behave like the last
    /// (which is a fixpoint unless the graph is truncated).
    fn layer(&self, k: usize) -> &CLayer {
        &self.layers[k.min(self.layers.len() - 1)]
    }

    pub fn lit_at(&self, k: usize, l: Lit) -> bool {
        if self.truncated && k >= self.layers.len() {
            return false;
        }
        self.layer(k).lits[l.index()]
    }

    pub fn act_at(&self, k: usize, a: usize) -> bool {
        if self.truncated && k >= self.layers.len() {
            return false;
        }
        self.layer(k).acts[a]
    }

    pub fn eff_at(&self, k: usize, e: usize) -> bool {
        if self.truncated && k >= self.layers.len() {
            return false;
        }
        self.layer(k).effs[e]
    }

    /// First level where `l` appears, if any.
    pub fn lit_level(&self, l: Lit) -> Option<usize> {
        self.layers.iter().position(|layer| layer.lits[l.index()])
    }

    /// First level where action `a` appears, if any.
    pub fn act_level(&self, a: usize) -> Option<usize> {
        self.layers.iter().position(|layer| layer.acts[a])
    }

    pub fn lit_mutex_at(&self, k: usize, l1: Lit, l2: Lit) -> bool {
        if self.mutexes.is_empty() {
            return false;
        }
        if self.truncated && k >= self.mutexes.len() {
            return true; // unknown beyond a truncated graph: stay pessimistic
        }
        let k = k.min(self.mutexes.len() - 1);
        self.mutexes[k].lits.contains(&norm_pair(l1.index() as u32, l2.index() as u32))
    }

    pub fn eff_mutex_at(&self, k: usize, e1: usize, e2: usize) -> bool {
        if self.mutexes.is_empty() || e1 == e2 {
            return false;
        }
        if self.truncated && k >= self.mutexes.len() {
            return true;
        }
        let k = k.min(self.mutexes.len() - 1);
        self.mutexes[k].effs.contains(&norm_pair(e1 as u32, e2 as u32))
    }

    /// First level at which all literals of the cube are present and no
    /// two of them are mutex.
    pub fn cube_level(&self, lits: &[Lit]) -> Option<usize> {
        'levels: for k in 0..self.layers.len() {
            let layer = &self.layers[k];
            if !lits.iter().all(|l| layer.lits[l.index()]) {
                continue;
            }
            for (i, &l1) in lits.iter().enumerate() {
                for &l2 in &lits[i + 1..] {
                    if self.lit_mutex_at(k, l1, l2) {
                        continue 'levels;
                    }
                }
            }
            return Some(k);
        }
        None
    }
}

pub(crate) fn norm_pair(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Build a classical graph from an initial literal set (a complete state
/// for SG¹/MG members, or a possibly inconsistent union for SGᵁ).
pub fn build_single(ground: &GroundSet, init: &[Lit], depth: MutexDepth) -> ClassicalGraph {
    let statics = StaticTables::new(ground);
    let mut lits = vec![false; 2 * ground.n_fluents];
    for l in init {
        lits[l.index()] = true;
    }
    let mut layers: Vec<CLayer> = Vec::new();
    let mut mutexes: Vec<ClassicalMutexLevel> = Vec::new();
    let mut truncated = false;
    loop {
        let acts: Vec<bool> = (0..ground.action_count())
            .map(|a| ground.pre(a).iter().all(|l| lits[l.index()]))
            .collect();
        let effs: Vec<bool> = (0..ground.effect_count())
            .map(|e| acts[ground.eff_action(e)] && ground.ante(e).iter().all(|l| lits[l.index()]))
            .collect();
        let layer = CLayer { lits: lits.clone(), acts, effs };
        let mux = if depth == MutexDepth::Nx {
            ClassicalMutexLevel::default()
        } else {
            let prev = layers.last().map(|la: &CLayer| (la, mutexes.last().unwrap()));
            mutex::classical_level_mutexes(ground, &statics, depth, &layer, prev)
        };
        let fixpoint = layers.last() == Some(&layer) && mutexes.last().map_or(depth == MutexDepth::Nx, |m| *m == mux);
        layers.push(layer);
        if depth != MutexDepth::Nx {
            mutexes.push(mux);
        }
        if fixpoint {
            break;
        }
        if layers.len() > LEVEL_CAP {
            truncated = true;
            break;
        }
        let mut next = vec![false; 2 * ground.n_fluents];
        let top = layers.last().unwrap();
        for e in 0..ground.effect_count() {
            if top.effs[e] {
                for l in ground.cons(e) {
                    next[l.index()] = true;
                }
            }
        }
        lits = next;
    }
    ClassicalGraph { depth, layers, mutexes, truncated }
}

/// The aggregate literal union S̃(BS): every literal in the canonical
/// representation of `bs`. May be inconsistent as a state; that is allowed
/// (it seeds the optimistic union graph).
pub fn aggregate_state(store: &Store, bs: Formula) -> Vec<Lit> {
    store.aggregate_literals(bs)
}

/// Sample ⌈fraction·|M(bs)|⌉ distinct worlds of `bs` uniformly without
/// replacement, reproducibly under `seed`. The result is in model
/// enumeration order, so `fraction = 1` returns exactly `models(bs)`.
pub fn sample_states(store: &mut Store, bs: Formula, fraction: f64, seed: u64) -> Result<Vec<State>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Invalid(format!("sampling fraction {fraction} outside (0, 1]")));
    }
    if bs.is_false() {
        return Err(Error::Invalid("cannot sample states of an empty belief".into()));
    }
    let worlds = store.models(bs)?;
    let m = worlds.len();
    let k = ((fraction * m as f64).ceil() as usize).clamp(1, m);
    if k == m {
        return Ok(worlds);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, m, k).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| worlds[i].clone()).collect())
}

/// One classical graph per sampled world of `bs_p`.
pub fn build_mg(
    store: &mut Store,
    ground: &GroundSet,
    bs_p: Formula,
    depth: MutexDepth,
    fraction: f64,
    seed: u64,
) -> Result<Vec<(State, ClassicalGraph)>> {
    let worlds = sample_states(store, bs_p, fraction, seed)?;
    Ok(worlds
        .into_iter()
        .map(|s| {
            let lits: Vec<Lit> = s.lits().collect();
            let g = build_single(ground, &lits, depth);
            (s, g)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Labelled graph
// ---------------------------------------------------------------------------

/// One labelled layer: the label of each element, ⊥ meaning absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LugLayer {
    pub lit: Vec<Formula>,
    pub act: Vec<Formula>,
    pub eff: Vec<Formula>,
}

#[derive(Debug)]
pub struct Lug {
    pub scheme: MutexScheme,
    /// The belief the initial layer was seeded from (after sampling).
    pub bs_p: Formula,
    /// Worlds of `bs_p` in enumeration order (used by per-world queries
    /// and cross-world mutexes).
    pub worlds: Vec<State>,
    pub layers: Vec<LugLayer>,
    /// One entry per layer when the scheme computes mutexes, else empty.
    pub mutexes: Vec<LabelledMutexLevel>,
    pub truncated: bool,
}

impl Lug {
    pub fn levels(&self) -> usize {
        self.layers.len()
    }

    fn clamp(&self, k: usize) -> Option<usize> {
        if k < self.layers.len() {
            Some(k)
        } else if self.truncated {
            None
        } else {
            Some(self.layers.len() - 1)
        }
    }

    pub fn lit_label(&self, k: usize, l: Lit) -> Formula {
        match self.clamp(k) {
            Some(k) => self.layers[k].lit[l.index()],
            None => Formula::FALSE,
        }
    }

    pub fn act_label(&self, k: usize, a: usize) -> Formula {
        match self.clamp(k) {
            Some(k) => self.layers[k].act[a],
            None => Formula::FALSE,
        }
    }

    pub fn eff_label(&self, k: usize, e: usize) -> Formula {
        match self.clamp(k) {
            Some(k) => self.layers[k].eff[e],
            None => Formula::FALSE,
        }
    }

    pub fn mutex_level(&self, k: usize) -> Option<&LabelledMutexLevel> {
        if self.mutexes.is_empty() {
            return None;
        }
        if k < self.mutexes.len() {
            Some(&self.mutexes[k])
        } else if self.truncated {
            None
        } else {
            self.mutexes.last()
        }
    }

    /// Extended label ℓ*_k(f): the worlds of `bs_p` from which `f` is
    /// optimistically reachable at level `k`. Computed by structural
    /// recursion over the canonical form of `f`: a decision node on
    /// fluent `v` contributes `(ℓ_k(v) ∧ ℓ*(hi)) ∨ (ℓ_k(¬v) ∧ ℓ*(lo))`;
    /// ⊤ maps to `bs_p`, ⊥ to ⊥. This equals substituting labels for
    /// literals in any NNF of `f` because per-world layers are closed
    /// under the literals a world reaches.
    pub fn extended_label(&self, store: &mut Store, k: usize, f: Formula) -> Formula {
        let k = match self.clamp(k) {
            Some(k) => k,
            None => return Formula::FALSE,
        };
        let mut memo: HashMap<Formula, Formula> = HashMap::new();
        self.ext_rec(store, k, f, &mut memo)
    }

    fn ext_rec(&self, store: &mut Store, k: usize, f: Formula, memo: &mut HashMap<Formula, Formula>) -> Formula {
        if f.is_false() {
            return Formula::FALSE;
        }
        if f.is_true() {
            return self.bs_p;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let v = store.support(f)[0];
        let hi = store.cofactor(f, v, true);
        let lo = store.cofactor(f, v, false);
        let hi_ext = self.ext_rec(store, k, hi, memo);
        let lo_ext = self.ext_rec(store, k, lo, memo);
        let pos = self.layers[k].lit[Lit::pos(v).index()];
        let neg = self.layers[k].lit[Lit::neg(v).index()];
        let a = store.conj(pos, hi_ext);
        let b = store.conj(neg, lo_ext);
        let r = store.disj(a, b);
        memo.insert(f, r);
        r
    }

    /// First level where `bs_p ⊨ ℓ*_k(f)` (label-only reachability).
    pub fn first_reachable(&self, store: &mut Store, f: Formula) -> Option<usize> {
        for k in 0..self.layers.len() {
            let ext = self.extended_label(store, k, f);
            if store.entails(self.bs_p, ext) {
                return Some(k);
            }
        }
        None
    }
}

/// Build the labelled graph for `bs_p` (first replaced by the disjunction
/// of sampled worlds when `fraction < 1`).
pub fn build_lug(
    store: &mut Store,
    ground: &GroundSet,
    bs_p: Formula,
    scheme: MutexScheme,
    fraction: f64,
    seed: u64,
) -> Result<Lug> {
    let worlds = sample_states(store, bs_p, fraction, seed)?;
    let mut seeded = Formula::FALSE;
    for w in &worlds {
        let cube = store.state_cube(w);
        seeded = store.disj(seeded, cube);
    }
    let bs_p = seeded;
    let statics = StaticTables::new(ground);

    let mut lit: Vec<Formula> = (0..2 * ground.n_fluents)
        .map(|li| {
            let lf = store.lit(Lit::from_index(li));
            store.conj(lf, bs_p)
        })
        .collect();
    let mut layers: Vec<LugLayer> = Vec::new();
    let mut mutexes: Vec<LabelledMutexLevel> = Vec::new();
    let mut truncated = false;
    loop {
        let act: Vec<Formula> = (0..ground.action_count())
            .map(|a| {
                let mut acc = bs_p;
                for l in ground.pre(a) {
                    acc = store.conj(acc, lit[l.index()]);
                }
                acc
            })
            .collect();
        let eff: Vec<Formula> = (0..ground.effect_count())
            .map(|e| {
                let mut acc = act[ground.eff_action(e)];
                for l in ground.ante(e) {
                    acc = store.conj(acc, lit[l.index()]);
                }
                acc
            })
            .collect();
        let layer = LugLayer { lit: lit.clone(), act, eff };
        let mux = if scheme.depth == MutexDepth::Nx {
            LabelledMutexLevel::default()
        } else {
            let prev = layers.last().map(|la: &LugLayer| (la, mutexes.last().unwrap()));
            mutex::lug_level_mutexes(store, ground, &statics, scheme, &worlds, &layer, prev)?
        };
        let fixpoint = layers.last() == Some(&layer)
            && mutexes.last().map_or(scheme.depth == MutexDepth::Nx, |m| *m == mux);
        layers.push(layer);
        if scheme.depth != MutexDepth::Nx {
            mutexes.push(mux);
        }
        if fixpoint {
            break;
        }
        if layers.len() > LEVEL_CAP {
            truncated = true;
            break;
        }
        let top = layers.last().unwrap();
        let mut next: Vec<Formula> = vec![Formula::FALSE; 2 * ground.n_fluents];
        for e in 0..ground.effect_count() {
            if top.eff[e].is_false() {
                continue;
            }
            for l in ground.cons(e) {
                next[l.index()] = store.disj(next[l.index()], top.eff[e]);
            }
        }
        lit = next;
    }
    Ok(Lug { scheme, bs_p, worlds, layers, mutexes, truncated })
}

// ---------------------------------------------------------------------------
// Debug dumps
// ---------------------------------------------------------------------------

/// One element per line: `level kind name` (classical graph).
pub fn dump_classical(g: &ClassicalGraph, ground: &GroundSet, problem: &Problem) -> String {
    let mut out = String::new();
    for (k, layer) in g.layers.iter().enumerate() {
        for li in 0..2 * ground.n_fluents {
            if layer.lits[li] {
                out.push_str(&format!("{k} lit {}\n", Lit::from_index(li).display(&problem.universe)));
            }
        }
        for a in 0..ground.action_count() {
            if layer.acts[a] {
                out.push_str(&format!("{k} act {}\n", ground.action_name(a)));
            }
        }
        for e in 0..ground.effect_count() {
            if layer.effs[e] {
                out.push_str(&format!("{k} eff {}\n", ground.eff_name(e)));
            }
        }
    }
    out
}

/// One element per line: `level kind name label` (labelled graph).
pub fn dump_lug(store: &mut Store, g: &Lug, ground: &GroundSet, problem: &Problem) -> Result<String> {
    let mut out = String::new();
    for (k, layer) in g.layers.iter().enumerate() {
        for li in 0..2 * ground.n_fluents {
            if !layer.lit[li].is_false() {
                let label = store.print_formula(layer.lit[li])?;
                out.push_str(&format!(
                    "{k} lit {} {label}\n",
                    Lit::from_index(li).display(&problem.universe)
                ));
            }
        }
        for a in 0..ground.action_count() {
            if !layer.act[a].is_false() {
                let label = store.print_formula(layer.act[a])?;
                out.push_str(&format!("{k} act {} {label}\n", ground.action_name(a)));
            }
        }
        for e in 0..ground.effect_count() {
            if !layer.eff[e].is_false() {
                let label = store.print_formula(layer.eff[e])?;
                out.push_str(&format!("{k} eff {} {label}\n", ground.eff_name(e)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_btc, gen_cbtc};

    #[test]
    fn aggregate_state_examples() {
        let (mut st, p) = gen_cbtc().unwrap();
        let lits = aggregate_state(&st, p.init);
        let uni = &p.universe;
        let mut names: Vec<String> = lits.iter().map(|l| l.display(uni)).collect();
        names.sort();
        assert_eq!(names, vec!["(not inP1)", "(not inP2)", "arm", "clog", "inP1", "inP2"]);
        // A single state aggregates to its own literals.
        let worlds = st.models(p.init).unwrap();
        let cube = st.state_cube(&worlds[0]);
        assert_eq!(aggregate_state(&st, cube).len(), p.universe.len());
    }

    #[test]
    fn sampling_is_deterministic_and_complete_at_one() {
        let (mut st, p) = gen_btc(4).unwrap();
        let all = st.models(p.init).unwrap();
        let full = sample_states(&mut st, p.init, 1.0, 42).unwrap();
        assert_eq!(full, all);
        let half_a = sample_states(&mut st, p.init, 0.5, 7).unwrap();
        let half_b = sample_states(&mut st, p.init, 0.5, 7).unwrap();
        assert_eq!(half_a, half_b);
        assert_eq!(half_a.len(), 2);
        // ceil semantics: tiny fraction still yields one state
        assert_eq!(sample_states(&mut st, p.init, 0.01, 3).unwrap().len(), 1);
        assert!(sample_states(&mut st, p.init, 0.0, 3).is_err());
        assert!(sample_states(&mut st, Formula::FALSE, 0.5, 3).is_err());
    }

    #[test]
    fn union_graph_reaches_goal_of_cbtc_at_two() {
        // The optimistic union graph: level 0 holds the aggregate literals,
        // Dunk appears once ¬clog arrives at level 1, ¬arm at level 2.
        let (mut st, p) = gen_cbtc().unwrap();
        let ground = GroundSet::new(&p);
        let init = aggregate_state(&st, p.init);
        let g = build_single(&ground, &init, MutexDepth::Nx);
        assert!(!g.truncated);
        let narm = Lit::neg(p.universe.id("arm").unwrap());
        let nclog = Lit::neg(p.universe.id("clog").unwrap());
        assert_eq!(g.lit_level(narm), Some(2));
        assert_eq!(g.lit_level(nclog), Some(1));
        assert_eq!(g.cube_level(&[narm, nclog]), Some(2));
        let goal_lits = st.to_constituents(p.goal).unwrap();
        assert_eq!(g.cube_level(&goal_lits[0]), Some(2));
    }

    #[test]
    fn single_state_graph_levels_from_one_world() {
        let (mut st, p) = gen_cbtc().unwrap();
        let ground = GroundSet::new(&p);
        let worlds = st.models(p.init).unwrap();
        // The world where the bomb is in package 1.
        let inp1 = p.universe.id("inP1").unwrap();
        let world = worlds.iter().find(|s| s.get(inp1)).unwrap();
        let lits: Vec<Lit> = world.lits().collect();
        let g = build_single(&ground, &lits, MutexDepth::Nx);
        let l0 = &g.layers[0];
        assert_eq!(l0.lits.iter().filter(|&&b| b).count(), 4);
        assert!(l0.lits[Lit::pos(p.universe.id("inP1").unwrap()).index()]);
        assert!(l0.lits[Lit::neg(p.universe.id("inP2").unwrap()).index()]);
        // In this world only DunkP1's conditional effect can disarm.
        let narm = Lit::neg(p.universe.id("arm").unwrap());
        assert_eq!(g.lit_level(narm), Some(2));
    }

    #[test]
    fn mg_builds_one_graph_per_world() {
        let (mut st, p) = gen_btc(3).unwrap();
        let ground = GroundSet::new(&p);
        let graphs = build_mg(&mut st, &ground, p.init, MutexDepth::Nx, 1.0, 0).unwrap();
        assert_eq!(graphs.len(), 3);
        for (s, g) in &graphs {
            let l0 = &g.layers[0];
            for l in s.lits() {
                assert!(l0.lits[l.index()]);
                assert!(!l0.lits[l.negated().index()]);
            }
        }
    }

    #[test]
    fn lug_labels_on_the_worked_levels() {
        let (mut st, p) = gen_cbtc().unwrap();
        let ground = GroundSet::new(&p);
        let lug = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 1.0, 0).unwrap();
        assert_eq!(lug.bs_p, p.init);
        let uni = &p.universe;
        let inp1 = uni.id("inP1").unwrap();
        let clog = uni.id("clog").unwrap();
        let arm = uni.id("arm").unwrap();

        // ℓ_0(inP1) = BS_P ∧ inP1 = arm ∧ clog ∧ inP1 ∧ ¬inP2
        let expect = st.parse_formula("(and arm clog inP1 (not inP2))").unwrap();
        assert_eq!(lug.lit_label(0, Lit::pos(inp1)), expect);
        // ℓ_0(clog) = BS_P
        assert_eq!(lug.lit_label(0, Lit::pos(clog)), p.init);
        // ¬clog absent at 0, present with label BS_P at 1 (Flush)
        assert!(lug.lit_label(0, Lit::neg(clog)).is_false());
        assert_eq!(lug.lit_label(1, Lit::neg(clog)), p.init);
        // ℓ_1(φ¹(DunkP1)) = arm ∧ clog ∧ inP1 ∧ ¬inP2
        let dunk1 = p.action_by_name("DunkP1").unwrap();
        let e = ground.effects_of(dunk1).start + 1;
        assert!(lug.eff_label(0, e).is_false());
        assert_eq!(lug.eff_label(1, e), expect);
        // ℓ_2(¬arm) = BS_P
        assert!(lug.lit_label(1, Lit::neg(arm)).is_false());
        assert_eq!(lug.lit_label(2, Lit::neg(arm)), p.init);
        // goal label-reachable at 2 without mutexes
        assert_eq!(lug.first_reachable(&mut st, p.goal), Some(2));
        // ℓ*_2(¬arm ∧ ¬clog) = BS_P
        assert_eq!(lug.extended_label(&mut st, 2, p.goal), p.init);
        assert!(!lug.truncated);
    }

    #[test]
    fn label_monotonicity_and_level_off() {
        for (mut st, p) in [gen_btc(3).unwrap(), gen_cbtc().unwrap()] {
            let ground = GroundSet::new(&p);
            let lug = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 1.0, 0).unwrap();
            for k in 0..lug.levels() - 1 {
                for li in 0..2 * ground.n_fluents {
                    let a = lug.layers[k].lit[li];
                    let b = lug.layers[k + 1].lit[li];
                    assert!(st.entails(a, b), "label shrank for literal {li} at {k}");
                }
            }
            // Level-off soundness: final two layers agree.
            let n = lug.levels();
            assert_eq!(lug.layers[n - 1], lug.layers[n - 2]);
        }
    }

    #[test]
    fn lug_sampling_fraction_one_is_identical() {
        let (mut st, p) = gen_btc(4).unwrap();
        let ground = GroundSet::new(&p);
        let a = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 1.0, 11).unwrap();
        let b = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 1.0, 99).unwrap();
        assert_eq!(a.bs_p, b.bs_p);
        assert_eq!(a.layers, b.layers);
        assert_eq!(a.bs_p, p.init);

        let c = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 0.5, 11).unwrap();
        assert_eq!(c.worlds.len(), 2);
        assert!(st.entails(c.bs_p, p.init));
    }

    #[test]
    fn dumps_are_nonempty() {
        let (mut st, p) = gen_btc(2).unwrap();
        let ground = GroundSet::new(&p);
        let init = aggregate_state(&st, p.init);
        let g = build_single(&ground, &init, MutexDepth::Nx);
        assert!(dump_classical(&g, &ground, &p).contains("0 lit arm"));
        let lug = build_lug(&mut st, &ground, p.init, MutexScheme::NONE, 1.0, 0).unwrap();
        let dump = dump_lug(&mut st, &lug, &ground, &p).unwrap();
        assert!(dump.contains("0 lit arm"));
        assert!(dump.contains("persist(arm)"));
    }
}
