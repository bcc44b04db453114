//! Mutual-exclusion computation for planning graphs.
//!
//! Depth classes build on each other: `NX` computes nothing, `StX` only
//! static interference between actions/effects, `DyX` adds competing
//! needs, inconsistent support, and complementary-literal pairs, and
//! `FX` adds induced effect mutexes. Orthogonally, labelled graphs can
//! track mutexes within one world (`SX`), across pairs of worlds drawn
//! from the intersection of the element labels (`IX`), or across all
//! world pairs (`CROSS`).
//!
//! Classical graphs record mutexes as pair sets; labelled graphs attach
//! to each pair a formula over the seed worlds (the worlds where the
//! pair is mutex), and cross-world mutexes become world-pair relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::formula::{Formula, Lit, State, Store};
use crate::graphs::{norm_pair, CLayer, GroundSet, Lug, LugLayer};
use crate::{Error, Result};

/// Cross-world relations are quadratic in the world count; beyond this
/// many worlds the cross schemes refuse to build.
pub const CROSS_WORLD_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutexDepth {
    /// No mutexes.
    Nx,
    /// Static interference between actions and effects only.
    Stx,
    /// StX plus competing needs, inconsistent support, and
    /// complementary-literal pairs.
    Dyx,
    /// DyX plus induced effect mutexes.
    Fx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorldMode {
    /// Mutexes within a single world only.
    Same,
    /// Also across world pairs in the intersection of the element labels.
    Intersect,
    /// Also across all world pairs.
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MutexScheme {
    pub depth: MutexDepth,
    pub worlds: WorldMode,
}

impl MutexScheme {
    pub const NONE: MutexScheme = MutexScheme { depth: MutexDepth::Nx, worlds: WorldMode::Same };

    pub fn same(depth: MutexDepth) -> MutexScheme {
        MutexScheme { depth, worlds: WorldMode::Same }
    }
}

impl Default for MutexScheme {
    fn default() -> Self {
        MutexScheme::NONE
    }
}

impl FromStr for MutexScheme {
    type Err = Error;

    /// `nx | stx | dyx | fx`, optionally suffixed `-sx | -ix | -cross`.
    fn from_str(s: &str) -> Result<MutexScheme> {
        let lower = s.to_ascii_lowercase();
        let (d, w) = match lower.split_once('-') {
            Some((d, w)) => (d, Some(w)),
            None => (lower.as_str(), None),
        };
        let depth = match d {
            "nx" => MutexDepth::Nx,
            "stx" => MutexDepth::Stx,
            "dyx" => MutexDepth::Dyx,
            "fx" => MutexDepth::Fx,
            _ => return Err(Error::Invalid(format!("unknown mutex scheme `{s}`"))),
        };
        let worlds = match w {
            None | Some("sx") => WorldMode::Same,
            Some("ix") => WorldMode::Intersect,
            Some("cross") => WorldMode::Cross,
            Some(other) => {
                return Err(Error::Invalid(format!("unknown world mode `{other}` in mutex scheme `{s}`")))
            }
        };
        Ok(MutexScheme { depth, worlds })
    }
}

impl fmt::Display for MutexScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.depth {
            MutexDepth::Nx => "nx",
            MutexDepth::Stx => "stx",
            MutexDepth::Dyx => "dyx",
            MutexDepth::Fx => "fx",
        };
        let w = match self.worlds {
            WorldMode::Same => "",
            WorldMode::Intersect => "-ix",
            WorldMode::Cross => "-cross",
        };
        if self.depth == MutexDepth::Nx {
            write!(f, "nx")
        } else {
            write!(f, "{d}{w}")
        }
    }
}

// ---------------------------------------------------------------------------
// Static tables
// ---------------------------------------------------------------------------

fn cubes_clash(a: &[Lit], b: &[Lit]) -> bool {
    a.iter().any(|l| b.contains(&l.negated()))
}

/// Level-independent facts: which action pairs and effect pairs
/// statically interfere, and which same-action effect pairs may
/// co-execute (consistent antecedents), the precondition of induction.
pub struct StaticTables {
    n_act: usize,
    n_eff: usize,
    act: Vec<bool>,
    eff: Vec<bool>,
    induce: Vec<bool>,
}

impl StaticTables {
    pub fn new(ground: &GroundSet) -> StaticTables {
        let n_act = ground.action_count();
        let n_eff = ground.effect_count();
        let mut act = vec![false; n_act * n_act];
        for a1 in 0..n_act {
            let e0_1 = ground.cons(ground.effects_of(a1).start);
            let p1 = ground.pre(a1);
            for a2 in a1..n_act {
                let e0_2 = ground.cons(ground.effects_of(a2).start);
                let p2 = ground.pre(a2);
                let clash = cubes_clash(e0_1, p2)
                    || cubes_clash(p1, e0_2)
                    || cubes_clash(e0_1, e0_2)
                    || cubes_clash(p1, p2);
                act[a1 * n_act + a2] = clash;
                act[a2 * n_act + a1] = clash;
            }
        }
        let mut eff = vec![false; n_eff * n_eff];
        let mut induce = vec![false; n_eff * n_eff];
        for e1 in 0..n_eff {
            for e2 in e1..n_eff {
                let clash = cubes_clash(ground.cons(e1), ground.ante(e2))
                    || cubes_clash(ground.ante(e1), ground.cons(e2))
                    || cubes_clash(ground.cons(e1), ground.cons(e2))
                    || cubes_clash(ground.ante(e1), ground.ante(e2));
                eff[e1 * n_eff + e2] = clash;
                eff[e2 * n_eff + e1] = clash;
                let co = e1 != e2
                    && ground.eff_action(e1) == ground.eff_action(e2)
                    && !cubes_clash(ground.ante(e1), ground.ante(e2));
                induce[e1 * n_eff + e2] = co;
                induce[e2 * n_eff + e1] = co;
            }
        }
        StaticTables { n_act, n_eff, act, eff, induce }
    }

    pub fn act_interfere(&self, a1: usize, a2: usize) -> bool {
        self.act[a1 * self.n_act + a2]
    }

    pub fn eff_interfere(&self, e1: usize, e2: usize) -> bool {
        self.eff[e1 * self.n_eff + e2]
    }

    /// True when `e1` and `e2` are distinct effects of one action that
    /// may fire together; each then induces the other's mutexes.
    pub fn may_coexecute(&self, e1: usize, e2: usize) -> bool {
        self.induce[e1 * self.n_eff + e2]
    }
}

// ---------------------------------------------------------------------------
// Classical mutexes
// ---------------------------------------------------------------------------

/// Pair sets for one level of a classical graph; keys are normalized
/// `(min, max)` dense ids (literal index, action id, effect id).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassicalMutexLevel {
    pub lits: BTreeSet<(u32, u32)>,
    pub acts: BTreeSet<(u32, u32)>,
    pub effs: BTreeSet<(u32, u32)>,
}

pub(crate) fn classical_level_mutexes(
    ground: &GroundSet,
    statics: &StaticTables,
    depth: MutexDepth,
    cur: &CLayer,
    prev: Option<(&CLayer, &ClassicalMutexLevel)>,
) -> ClassicalMutexLevel {
    let mut m = ClassicalMutexLevel::default();
    let nl = 2 * ground.n_fluents;

    if depth >= MutexDepth::Dyx {
        for li1 in 0..nl {
            if !cur.lits[li1] {
                continue;
            }
            for li2 in li1 + 1..nl {
                if !cur.lits[li2] {
                    continue;
                }
                let mut mux = li2 == li1 ^ 1; // complementary pair
                if !mux {
                    if let Some((pl, pm)) = prev {
                        let sup1: Vec<u32> = ground
                            .supporters(Lit::from_index(li1))
                            .iter()
                            .copied()
                            .filter(|&e| pl.effs[e as usize])
                            .collect();
                        let sup2: Vec<u32> = ground
                            .supporters(Lit::from_index(li2))
                            .iter()
                            .copied()
                            .filter(|&e| pl.effs[e as usize])
                            .collect();
                        mux = !sup1.is_empty()
                            && !sup2.is_empty()
                            && sup1.iter().all(|&e1| {
                                sup2.iter().all(|&e2| e1 != e2 && pm.effs.contains(&norm_pair(e1, e2)))
                            });
                    }
                }
                if mux {
                    m.lits.insert((li1 as u32, li2 as u32));
                }
            }
        }
    }

    let na = ground.action_count();
    for a1 in 0..na {
        if !cur.acts[a1] {
            continue;
        }
        for a2 in a1 + 1..na {
            if !cur.acts[a2] {
                continue;
            }
            let mut mux = depth >= MutexDepth::Stx && statics.act_interfere(a1, a2);
            if !mux && depth >= MutexDepth::Dyx {
                mux = lit_pair_hit(&m.lits, ground.pre(a1), ground.pre(a2));
            }
            if mux {
                m.acts.insert((a1 as u32, a2 as u32));
            }
        }
    }

    let ne = ground.effect_count();
    for e1 in 0..ne {
        if !cur.effs[e1] {
            continue;
        }
        let a1 = ground.eff_action(e1);
        for e2 in e1 + 1..ne {
            if !cur.effs[e2] {
                continue;
            }
            let a2 = ground.eff_action(e2);
            let mut mux = a1 != a2 && m.acts.contains(&norm_pair(a1 as u32, a2 as u32));
            mux = mux || (depth >= MutexDepth::Stx && statics.eff_interfere(e1, e2));
            if !mux && depth >= MutexDepth::Dyx {
                mux = lit_pair_hit(&m.lits, ground.ante(e1), ground.ante(e2));
            }
            if mux {
                m.effs.insert((e1 as u32, e2 as u32));
            }
        }
    }

    if depth >= MutexDepth::Fx {
        // Induced: an effect inherits the mutexes of any sibling it may
        // co-execute with; iterate to a fixpoint within the level.
        loop {
            let mut added = Vec::new();
            for &(x, y) in &m.effs {
                for (ej, eh) in [(x as usize, y as usize), (y as usize, x as usize)] {
                    for ei in ground.effects_of(ground.eff_action(ej)) {
                        if ei == eh || !cur.effs[ei] || !statics.may_coexecute(ei, ej) {
                            continue;
                        }
                        let key = norm_pair(ei as u32, eh as u32);
                        if !m.effs.contains(&key) {
                            added.push(key);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            m.effs.extend(added);
        }
    }
    m
}

fn lit_pair_hit(lits: &BTreeSet<(u32, u32)>, c1: &[Lit], c2: &[Lit]) -> bool {
    c1.iter().any(|l1| {
        c2.iter()
            .any(|l2| l1 != l2 && lits.contains(&norm_pair(l1.index() as u32, l2.index() as u32)))
    })
}

// ---------------------------------------------------------------------------
// Labelled mutexes
// ---------------------------------------------------------------------------

/// World-pair relation: bit `(i, j)` set means the first element in
/// world `i` is mutex with the second element in world `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldRel {
    n: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl WorldRel {
    fn empty(n: usize) -> WorldRel {
        let wpr = n.div_ceil(64);
        WorldRel { n, wpr, bits: vec![0; n * wpr] }
    }

    fn full(n: usize) -> WorldRel {
        let mut r = WorldRel::empty(n);
        for i in 0..n {
            for w in 0..r.wpr {
                r.bits[i * r.wpr + w] = !0;
            }
            r.trim_row(i);
        }
        r
    }

    fn trim_row(&mut self, i: usize) {
        let extra = self.wpr * 64 - self.n;
        if extra > 0 {
            self.bits[i * self.wpr + self.wpr - 1] &= !0 >> extra;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.wpr + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.wpr + j / 64] |= 1 << (j % 64);
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn or_assign(&mut self, o: &WorldRel) {
        for (a, b) in self.bits.iter_mut().zip(&o.bits) {
            *a |= b;
        }
    }

    fn transposed(&self) -> WorldRel {
        let mut t = WorldRel::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }

    fn remove_diagonal(&mut self) {
        for i in 0..self.n {
            self.bits[i * self.wpr + i / 64] &= !(1 << (i % 64));
        }
    }

    /// Keep only pairs inside `rows × cols`.
    fn and_rect(&mut self, rows: &Mask, cols: &Mask) {
        for i in 0..self.n {
            for w in 0..self.wpr {
                let c = if rows.get(i) { cols.words[w] } else { 0 };
                self.bits[i * self.wpr + w] &= c;
            }
        }
    }

    /// One supporter-pair constraint of inconsistent support:
    /// `R ∩= ¬(m1 × m2) ∪ rel` — either the pair cannot deliver in
    /// these worlds, or it is itself cross-mutex there.
    fn and_supporter(&mut self, m1: &Mask, m2: &Mask, rel: Option<&WorldRel>) {
        for i in 0..self.n {
            if !m1.get(i) {
                continue;
            }
            for w in 0..self.wpr {
                let mut keep = !m2.words[w];
                if let Some(r) = rel {
                    keep |= r.bits[i * self.wpr + w];
                }
                self.bits[i * self.wpr + w] &= keep;
            }
            self.trim_row(i);
        }
    }

    fn restrict_rows(&mut self, rows: &Mask) {
        for i in 0..self.n {
            if !rows.get(i) {
                for w in 0..self.wpr {
                    self.bits[i * self.wpr + w] = 0;
                }
            }
        }
    }
}

/// Per-world presence bitset of one element.
#[derive(Clone, Debug)]
struct Mask {
    words: Vec<u64>,
}

impl Mask {
    fn new(n: usize) -> Mask {
        Mask { words: vec![0; n.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Mask) -> Mask {
        Mask { words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect() }
    }

    fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }
}

/// Cross-world mutexes for one level: relations over world indices of
/// the graph's seed belief, keyed by normalized element-id pairs (equal
/// ids are allowed — the same element can be mutex with itself across
/// two different worlds).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossLevel {
    pub lits: BTreeMap<(u32, u32), WorldRel>,
    pub acts: BTreeMap<(u32, u32), WorldRel>,
    pub effs: BTreeMap<(u32, u32), WorldRel>,
}

impl CrossLevel {
    /// Oriented query: element `x1` in world `i` against `x2` in world `j`.
    pub fn hit(map: &BTreeMap<(u32, u32), WorldRel>, x1: u32, i: usize, x2: u32, j: usize) -> bool {
        if x1 <= x2 {
            map.get(&(x1, x2)).is_some_and(|r| r.get(i, j))
        } else {
            map.get(&(x2, x1)).is_some_and(|r| r.get(j, i))
        }
    }
}

/// Labelled mutexes for one level. Same-world labels give the worlds
/// where the pair is jointly forbidden; interference labels are the
/// whole seed belief by definition. Pairs absent from a map are not
/// mutex anywhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelledMutexLevel {
    pub lits: BTreeMap<(u32, u32), Formula>,
    pub acts: BTreeMap<(u32, u32), Formula>,
    pub effs: BTreeMap<(u32, u32), Formula>,
    pub cross: Option<CrossLevel>,
}

impl LabelledMutexLevel {
    pub fn lit_label(&self, l1: Lit, l2: Lit) -> Formula {
        self.lits
            .get(&norm_pair(l1.index() as u32, l2.index() as u32))
            .copied()
            .unwrap_or(Formula::FALSE)
    }

    pub fn act_label(&self, a1: usize, a2: usize) -> Formula {
        self.acts.get(&norm_pair(a1 as u32, a2 as u32)).copied().unwrap_or(Formula::FALSE)
    }

    pub fn eff_label(&self, e1: usize, e2: usize) -> Formula {
        self.effs.get(&norm_pair(e1 as u32, e2 as u32)).copied().unwrap_or(Formula::FALSE)
    }
}

/// Convert one world-pair relation to label pairs `(f, g)`: the pair is
/// mutex between world `S ⊨ f` and world `S' ⊨ g` (one entry per
/// first-side world with any partners).
pub fn cross_label_pairs(store: &mut Store, worlds: &[State], rel: &WorldRel) -> Vec<(Formula, Formula)> {
    let mut out = Vec::new();
    for (i, s) in worlds.iter().enumerate() {
        let mut g = Formula::FALSE;
        for (j, t) in worlds.iter().enumerate() {
            if rel.get(i, j) {
                let cube = store.state_cube(t);
                g = store.disj(g, cube);
            }
        }
        if !g.is_false() {
            let f = store.state_cube(s);
            out.push((f, g));
        }
    }
    out
}

pub(crate) fn lug_level_mutexes(
    store: &mut Store,
    ground: &GroundSet,
    statics: &StaticTables,
    scheme: MutexScheme,
    worlds: &[State],
    cur: &LugLayer,
    prev: Option<(&LugLayer, &LabelledMutexLevel)>,
) -> Result<LabelledMutexLevel> {
    let mut m = LabelledMutexLevel::default();
    let depth = scheme.depth;
    let nl = 2 * ground.n_fluents;
    let na = ground.action_count();
    let ne = ground.effect_count();

    // --- Literals: complementary pairs and inconsistent support.
    if depth >= MutexDepth::Dyx {
        for li1 in 0..nl {
            if cur.lit[li1].is_false() {
                continue;
            }
            for li2 in li1 + 1..nl {
                if cur.lit[li2].is_false() {
                    continue;
                }
                let both = store.conj(cur.lit[li1], cur.lit[li2]);
                let mut label = if li2 == li1 ^ 1 { both } else { Formula::FALSE };
                if let Some((pl, pm)) = prev {
                    if !both.is_false() {
                        let mut acc = both;
                        'pairs: for &e1 in ground.supporters(Lit::from_index(li1)) {
                            let f1 = pl.eff[e1 as usize];
                            if f1.is_false() {
                                continue;
                            }
                            for &e2 in ground.supporters(Lit::from_index(li2)) {
                                let f2 = pl.eff[e2 as usize];
                                if f2.is_false() {
                                    continue;
                                }
                                // delivered jointly and not mutex ⇒ not blocked
                                let pair_mux = if e1 == e2 { Formula::FALSE } else { pm.eff_label(e1 as usize, e2 as usize) };
                                let joint = store.conj(f1, f2);
                                let free = store.neg(joint);
                                let term = store.disj(free, pair_mux);
                                acc = store.conj(acc, term);
                                if acc.is_false() {
                                    break 'pairs;
                                }
                            }
                        }
                        label = store.disj(label, acc);
                    }
                }
                if !label.is_false() {
                    m.lits.insert((li1 as u32, li2 as u32), label);
                }
            }
        }
    }

    // --- Actions: interference and competing needs. A mutex only exists
    //     between elements of a world's graph, so every label is bounded
    //     by the pair's co-presence label.
    for a1 in 0..na {
        if cur.act[a1].is_false() {
            continue;
        }
        for a2 in a1 + 1..na {
            if cur.act[a2].is_false() {
                continue;
            }
            let present = store.conj(cur.act[a1], cur.act[a2]);
            let mut label = Formula::FALSE;
            if depth >= MutexDepth::Stx && statics.act_interfere(a1, a2) {
                label = present;
            }
            if depth >= MutexDepth::Dyx && label != present {
                let needs = lit_pair_label(store, &m, ground.pre(a1), ground.pre(a2));
                if !needs.is_false() {
                    let cn = store.conj(present, needs);
                    label = store.disj(label, cn);
                }
            }
            if !label.is_false() {
                m.acts.insert((a1 as u32, a2 as u32), label);
            }
        }
    }

    // --- Effects: inherited, interference, competing needs, induced.
    for e1 in 0..ne {
        if cur.eff[e1].is_false() {
            continue;
        }
        let a1 = ground.eff_action(e1);
        for e2 in e1 + 1..ne {
            if cur.eff[e2].is_false() {
                continue;
            }
            let a2 = ground.eff_action(e2);
            let present = store.conj(cur.eff[e1], cur.eff[e2]);
            let mut label = if a1 != a2 {
                store.conj(m.act_label(a1, a2), present)
            } else {
                Formula::FALSE
            };
            if depth >= MutexDepth::Stx && statics.eff_interfere(e1, e2) {
                label = present;
            }
            if depth >= MutexDepth::Dyx && label != present {
                let needs = lit_pair_label(store, &m, ground.ante(e1), ground.ante(e2));
                if !needs.is_false() {
                    let cn = store.conj(present, needs);
                    label = store.disj(label, cn);
                }
            }
            if !label.is_false() {
                m.effs.insert((e1 as u32, e2 as u32), label);
            }
        }
    }
    if depth >= MutexDepth::Fx {
        // Induced: the inducing sibling eᵢ picks up each mutex of the
        // sibling eⱼ it may co-execute with, in the worlds where eⱼ is
        // both mutex and present. Fixpoint within the level.
        loop {
            let snapshot: Vec<((u32, u32), Formula)> = m.effs.iter().map(|(k, v)| (*k, *v)).collect();
            let mut changed = false;
            for ((x, y), lbl) in snapshot {
                for (ej, eh) in [(x as usize, y as usize), (y as usize, x as usize)] {
                    for ei in ground.effects_of(ground.eff_action(ej)) {
                        if ei == eh || cur.eff[ei].is_false() || !statics.may_coexecute(ei, ej) {
                            continue;
                        }
                        let mut add = store.conj(lbl, cur.eff[ej]);
                        add = store.conj(add, cur.eff[ei]);
                        if add.is_false() {
                            continue;
                        }
                        let key = norm_pair(ei as u32, eh as u32);
                        let old = m.effs.get(&key).copied().unwrap_or(Formula::FALSE);
                        let new = store.disj(old, add);
                        if new != old {
                            m.effs.insert(key, new);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    if scheme.worlds != WorldMode::Same && depth >= MutexDepth::Stx {
        m.cross = Some(cross_level_mutexes(store, ground, statics, scheme, worlds, cur, prev)?);
    }
    Ok(m)
}

/// ⋁ over literal pairs of the two cubes of the current literal mutex
/// labels (the "competing needs" core).
fn lit_pair_label(store: &mut Store, m: &LabelledMutexLevel, c1: &[Lit], c2: &[Lit]) -> Formula {
    let mut acc = Formula::FALSE;
    for l1 in c1 {
        for l2 in c2 {
            if l1 != l2 {
                acc = store.disj(acc, m.lit_label(*l1, *l2));
            }
        }
    }
    acc
}

fn presence_mask(store: &Store, worlds: &[State], label: Formula) -> Mask {
    let mut mask = Mask::new(worlds.len());
    for (i, s) in worlds.iter().enumerate() {
        if store.eval(label, s) {
            mask.set(i);
        }
    }
    mask
}

fn cross_level_mutexes(
    store: &mut Store,
    ground: &GroundSet,
    statics: &StaticTables,
    scheme: MutexScheme,
    worlds: &[State],
    cur: &LugLayer,
    prev: Option<(&LugLayer, &LabelledMutexLevel)>,
) -> Result<CrossLevel> {
    let n = worlds.len();
    if n > CROSS_WORLD_CAP {
        return Err(Error::CapExceeded(format!(
            "cross-world mutexes over {n} worlds exceed cap {CROSS_WORLD_CAP}"
        )));
    }
    let depth = scheme.depth;
    let ix = scheme.worlds == WorldMode::Intersect;
    let mut cl = CrossLevel::default();
    let nl = 2 * ground.n_fluents;
    let na = ground.action_count();
    let ne = ground.effect_count();

    let lit_mask: Vec<Mask> = (0..nl).map(|li| presence_mask(store, worlds, cur.lit[li])).collect();
    let act_mask: Vec<Mask> = (0..na).map(|a| presence_mask(store, worlds, cur.act[a])).collect();
    let eff_mask: Vec<Mask> = (0..ne).map(|e| presence_mask(store, worlds, cur.eff[e])).collect();

    // A cross mutex pairs an element of one world's graph with an element
    // of another's, so every relation is bounded by the presence masks.
    let finish = |rel: &mut WorldRel, m1: &Mask, m2: &Mask| {
        rel.and_rect(m1, m2);
        rel.remove_diagonal();
        if ix {
            let mm = m1.and(m2);
            rel.and_rect(&mm, &mm);
        }
    };

    // --- Literals: cross-world inconsistent support (complementary
    //     literals do not clash across distinct worlds).
    if depth >= MutexDepth::Dyx {
        if let Some((pl, pm)) = prev {
            let prev_cross = pm.cross.as_ref();
            let prev_eff_mask: Vec<Mask> =
                (0..ne).map(|e| presence_mask(store, worlds, pl.eff[e])).collect();
            for li1 in 0..nl {
                if !lit_mask[li1].any() {
                    continue;
                }
                for li2 in li1..nl {
                    if !lit_mask[li2].any() {
                        continue;
                    }
                    let mut rel = WorldRel::full(n);
                    'sup: for &e1 in ground.supporters(Lit::from_index(li1)) {
                        if pl.eff[e1 as usize].is_false() {
                            continue;
                        }
                        for &e2 in ground.supporters(Lit::from_index(li2)) {
                            if pl.eff[e2 as usize].is_false() {
                                continue;
                            }
                            let pair_rel = prev_cross.and_then(|c| oriented(&c.effs, e1, e2));
                            rel.and_supporter(
                                &prev_eff_mask[e1 as usize],
                                &prev_eff_mask[e2 as usize],
                                pair_rel.as_ref(),
                            );
                            if rel.is_empty() {
                                break 'sup;
                            }
                        }
                    }
                    finish(&mut rel, &lit_mask[li1], &lit_mask[li2]);
                    if !rel.is_empty() {
                        cl.lits.insert((li1 as u32, li2 as u32), rel);
                    }
                }
            }
        }
    }

    // --- Actions.
    for a1 in 0..na {
        if !act_mask[a1].any() {
            continue;
        }
        for a2 in a1..na {
            if !act_mask[a2].any() {
                continue;
            }
            let mut rel = if statics.act_interfere(a1, a2) { WorldRel::full(n) } else { WorldRel::empty(n) };
            if depth >= MutexDepth::Dyx {
                for l1 in ground.pre(a1) {
                    for l2 in ground.pre(a2) {
                        if let Some(r) = oriented(&cl.lits, l1.index() as u32, l2.index() as u32) {
                            rel.or_assign(&r);
                        }
                    }
                }
            }
            finish(&mut rel, &act_mask[a1], &act_mask[a2]);
            if !rel.is_empty() {
                cl.acts.insert((a1 as u32, a2 as u32), rel);
            }
        }
    }

    // --- Effects.
    for e1 in 0..ne {
        if !eff_mask[e1].any() {
            continue;
        }
        let a1 = ground.eff_action(e1) as u32;
        for e2 in e1..ne {
            if !eff_mask[e2].any() {
                continue;
            }
            let a2 = ground.eff_action(e2) as u32;
            let mut rel = match oriented(&cl.acts, a1, a2) {
                Some(r) => r,
                None => WorldRel::empty(n),
            };
            if statics.eff_interfere(e1, e2) {
                rel.or_assign(&WorldRel::full(n));
            }
            if depth >= MutexDepth::Dyx {
                for l1 in ground.ante(e1) {
                    for l2 in ground.ante(e2) {
                        if let Some(r) = oriented(&cl.lits, l1.index() as u32, l2.index() as u32) {
                            rel.or_assign(&r);
                        }
                    }
                }
            }
            finish(&mut rel, &eff_mask[e1], &eff_mask[e2]);
            if !rel.is_empty() {
                cl.effs.insert((e1 as u32, e2 as u32), rel);
            }
        }
    }
    if depth >= MutexDepth::Fx {
        loop {
            let snapshot: Vec<((u32, u32), WorldRel)> = cl.effs.iter().map(|(k, v)| (*k, v.clone())).collect();
            let mut changed = false;
            for ((x, y), rel) in &snapshot {
                for (ej, eh, r) in [
                    (*x as usize, *y as usize, rel.clone()),
                    (*y as usize, *x as usize, rel.transposed()),
                ] {
                    for ei in ground.effects_of(ground.eff_action(ej)) {
                        if ei == eh || !eff_mask[ei].any() || !statics.may_coexecute(ei, ej) {
                            continue;
                        }
                        // first side: worlds of the existing mutex's ej
                        // side, narrowed to where the inducer exists
                        let mut add = r.clone();
                        add.restrict_rows(&eff_mask[ei]);
                        if ix {
                            let mm = eff_mask[ei].and(&eff_mask[eh]);
                            add.and_rect(&mm, &mm);
                        }
                        add.remove_diagonal();
                        if add.is_empty() {
                            continue;
                        }
                        let (key, add) = if ei as u32 <= eh as u32 {
                            ((ei as u32, eh as u32), add)
                        } else {
                            ((eh as u32, ei as u32), add.transposed())
                        };
                        let entry = cl.effs.entry(key).or_insert_with(|| WorldRel::empty(n));
                        let before = entry.clone();
                        entry.or_assign(&add);
                        if *entry != before {
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        cl.effs.retain(|_, r| !r.is_empty());
    }
    Ok(cl)
}

/// Fetch a relation oriented as `(x1, x2)` regardless of key order.
fn oriented(map: &BTreeMap<(u32, u32), WorldRel>, x1: u32, x2: u32) -> Option<WorldRel> {
    if x1 <= x2 {
        map.get(&(x1, x2)).cloned()
    } else {
        map.get(&(x2, x1)).map(|r| r.transposed())
    }
}

// ---------------------------------------------------------------------------
// Mutex-aware reachability on the labelled graph
// ---------------------------------------------------------------------------

/// First level where `f` is reachable from every world of the graph's
/// seed belief, honoring the graph's mutex scheme: the extended label
/// must cover the seed, every world needs a constituent of `f` whose
/// literals are jointly supported there without a same-world mutex, and
/// under cross-world schemes every world pair needs such a constituent
/// pair free of cross-world mutexes. `None` means never (∞).
pub fn lug_first_reachable(store: &mut Store, lug: &Lug, f: Formula) -> Result<Option<usize>> {
    let constituents = store.to_constituents(f)?;
    if constituents.is_empty() {
        return Ok(None);
    }
    let nw = lug.worlds.len();
    let nc = constituents.len();
    'levels: for k in 0..lug.levels() {
        let ext = lug.extended_label(store, k, f);
        if !store.entails(lug.bs_p, ext) {
            continue;
        }
        let mux = match lug.mutex_level(k) {
            None => return Ok(Some(k)),
            Some(m) => m,
        };
        // Per world: which constituents are supported and internally
        // mutex-free there.
        let mut ok = vec![vec![false; nc]; nw];
        for (i, s) in lug.worlds.iter().enumerate() {
            for (c, cube) in constituents.iter().enumerate() {
                let supported = cube.iter().all(|l| store.eval(lug.lit_label(k, *l), s));
                if !supported {
                    continue;
                }
                let mut clean = true;
                'cube: for (x, l1) in cube.iter().enumerate() {
                    for l2 in &cube[x + 1..] {
                        let lbl = mux.lit_label(*l1, *l2);
                        if !lbl.is_false() && store.eval(lbl, s) {
                            clean = false;
                            break 'cube;
                        }
                    }
                }
                ok[i][c] = clean;
            }
            if !ok[i].iter().any(|&b| b) {
                continue 'levels;
            }
        }
        if let Some(cross) = &mux.cross {
            for i in 0..nw {
                for j in 0..nw {
                    if i == j {
                        continue;
                    }
                    let mut found = false;
                    'outer: for c1 in 0..nc {
                        if !ok[i][c1] {
                            continue;
                        }
                        for c2 in 0..nc {
                            if !ok[j][c2] {
                                continue;
                            }
                            if cross_cube_ok(cross, &constituents[c1], &constituents[c2], i, j) {
                                found = true;
                                break 'outer;
                            }
                        }
                    }
                    if !found {
                        continue 'levels;
                    }
                }
            }
        }
        return Ok(Some(k));
    }
    Ok(None)
}

fn cross_cube_ok(cross: &CrossLevel, cube1: &[Lit], cube2: &[Lit], i: usize, j: usize) -> bool {
    for l1 in cube1 {
        for l2 in cube2 {
            if CrossLevel::hit(&cross.lits, l1.index() as u32, i, l2.index() as u32, j) {
                return false;
            }
        }
    }
    true
}
