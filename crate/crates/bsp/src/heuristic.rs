//! Belief-state distance estimators.
//!
//! A [`HeuristicSpec`] names a substrate (none, a single classical graph
//! seeded from the literal union or one sampled world, one classical
//! graph per world, or the labelled graph), a value kind (zero,
//! cardinality, max, sum, level, relaxed plan, unioned relaxed plans),
//! an optional aggregation across worlds/graphs (`max` assumes positive
//! interaction, `sum` assumes independence), and a mutex scheme. Specs
//! parse from strings such as `lug:rp`, `mg:rp:sum`, `sg1:level:dyx`,
//! `lug:level:fx-sx`.
//!
//! An [`Evaluator`] binds a spec to a problem and a search direction.
//! Regression seeds the substrate once from the initial belief and
//! evaluates each regressed subgoal against it; progression seeds a
//! fresh substrate from every evaluated belief (values memoized by
//! canonical handle) and measures the distance to the goal.
//!
//! Clause costs take the cheapest literal of a clause; max/sum range
//! over the clause cover κ(BS_i); level is the first mutex-free level
//! of the cheapest constituent. Relaxed plans chain chosen effects
//! backwards from that level, prefer persistence, and count distinct
//! non-persistence actions per layer. `f64::INFINITY` means "not
//! reachable on this substrate".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Lit, State, Store};
use crate::graphs::{aggregate_state, build_lug, build_mg, build_single, ClassicalGraph, GroundSet, Lug};
use crate::model::Problem;
use crate::mutex::{lug_first_reachable, MutexScheme, WorldMode};
use crate::{Error, Result};

/// Which way the search moves; decides which side of the evaluation the
/// moving belief sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Graphs grow from the initial belief; the evaluated formula is the
    /// regressed subgoal.
    Regression,
    /// Graphs grow from the evaluated belief; the target is the goal.
    Progression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Substrate {
    /// No graph (zero and cardinality).
    None,
    /// One classical graph seeded with the union of all worlds' literals.
    SgUnion,
    /// One classical graph seeded with a single sampled world.
    SgSample,
    /// One classical graph per sampled world.
    Mg,
    /// One labelled graph over all sampled worlds.
    Lug,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Zero,
    Card,
    Max,
    Sum,
    Level,
    Rp,
    /// Layer-aligned union of the per-graph relaxed plans (MG only).
    RpUnion,
}

/// Aggregation across graphs (MG) or worlds (LUG).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Agg {
    /// Positive interaction: the costliest graph/world dominates.
    Max,
    /// Independence: costs add up across graphs/worlds.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicSpec {
    pub substrate: Substrate,
    pub kind: Kind,
    /// `None` on single-graph substrates. On the labelled graph `None`
    /// means the worlds are handled jointly (the default); `Some(Sum)`
    /// selects the per-world summed variant.
    pub agg: Option<Agg>,
    pub scheme: MutexScheme,
}

impl HeuristicSpec {
    pub const ZERO: HeuristicSpec = HeuristicSpec {
        substrate: Substrate::None,
        kind: Kind::Zero,
        agg: None,
        scheme: MutexScheme::NONE,
    };

    /// Checks substrate/kind/aggregation compatibility. Parsing only
    /// produces valid combinations; hand-built specs go through this in
    /// [`Evaluator::new`].
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadHeuristicSpec { spec: self.to_string(), msg: msg.into() });
        match self.substrate {
            Substrate::None => {
                if !matches!(self.kind, Kind::Zero | Kind::Card) || self.agg.is_some() || self.scheme != MutexScheme::NONE {
                    return bad("zero/card take no substrate options");
                }
            }
            Substrate::SgUnion | Substrate::SgSample => {
                if !matches!(self.kind, Kind::Max | Kind::Sum | Kind::Level | Kind::Rp) {
                    return bad("single graphs support max|sum|level|rp");
                }
                if self.agg.is_some() {
                    return bad("single graphs take no aggregation");
                }
            }
            Substrate::Mg => match self.kind {
                Kind::RpUnion => {
                    if self.agg.is_some() {
                        return bad("rpu aggregates by union; no max|sum");
                    }
                }
                Kind::Max | Kind::Sum | Kind::Level | Kind::Rp => {
                    if self.agg.is_none() {
                        return bad("multiple graphs need an aggregation max|sum");
                    }
                }
                _ => return bad("mg supports max|sum|level|rp|rpu"),
            },
            Substrate::Lug => {
                if !matches!(self.kind, Kind::Max | Kind::Sum | Kind::Level | Kind::Rp) {
                    return bad("lug supports max|sum|level|rp");
                }
                if self.kind == Kind::Rp && self.agg.is_some() {
                    return bad("lug:rp takes no aggregation");
                }
            }
        }
        if self.scheme.worlds != WorldMode::Same && self.substrate != Substrate::Lug {
            return bad("cross-world mutexes need the labelled graph");
        }
        Ok(())
    }
}

fn bad_spec(spec: &str, msg: impl Into<String>) -> Error {
    Error::BadHeuristicSpec { spec: spec.to_string(), msg: msg.into() }
}

fn parse_kind(spec: &str, tok: &str) -> Result<Kind> {
    Ok(match tok {
        "max" => Kind::Max,
        "sum" => Kind::Sum,
        "level" => Kind::Level,
        "rp" => Kind::Rp,
        "rpu" => Kind::RpUnion,
        _ => return Err(bad_spec(spec, format!("unknown value kind `{tok}`"))),
    })
}

impl FromStr for HeuristicSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<HeuristicSpec> {
        let scheme_of = |tok: &str| -> Result<MutexScheme> {
            tok.parse::<MutexScheme>().map_err(|_| bad_spec(s, format!("unknown mutex scheme `{tok}`")))
        };
        let toks: Vec<&str> = s.split(':').collect();
        let spec = match toks.as_slice() {
            ["zero"] => HeuristicSpec::ZERO,
            ["card"] => HeuristicSpec { substrate: Substrate::None, kind: Kind::Card, agg: None, scheme: MutexScheme::NONE },
            [sub @ ("sg" | "sg1"), rest @ ..] => {
                let substrate = if *sub == "sg" { Substrate::SgUnion } else { Substrate::SgSample };
                let (kind_tok, scheme_tok) = match rest {
                    [k] => (*k, None),
                    [k, m] => (*k, Some(*m)),
                    _ => return Err(bad_spec(s, "expected KIND[:SCHEME]")),
                };
                let kind = parse_kind(s, kind_tok)?;
                if kind == Kind::RpUnion {
                    return Err(bad_spec(s, "rpu needs multiple graphs; use mg:rpu"));
                }
                let scheme = match scheme_tok {
                    Some(m) => scheme_of(m)?,
                    None => MutexScheme::NONE,
                };
                HeuristicSpec { substrate, kind, agg: None, scheme }
            }
            ["mg", rest @ ..] => match rest {
                ["rpu"] => HeuristicSpec { substrate: Substrate::Mg, kind: Kind::RpUnion, agg: None, scheme: MutexScheme::NONE },
                ["rpu", m] => HeuristicSpec { substrate: Substrate::Mg, kind: Kind::RpUnion, agg: None, scheme: scheme_of(m)? },
                [k, a, rest2 @ ..] => {
                    let kind = parse_kind(s, k)?;
                    if kind == Kind::RpUnion {
                        return Err(bad_spec(s, "mg:rpu takes no aggregation"));
                    }
                    let agg = match *a {
                        "max" => Agg::Max,
                        "sum" => Agg::Sum,
                        _ => return Err(bad_spec(s, format!("mg needs an aggregation max|sum, got `{a}`"))),
                    };
                    let scheme = match rest2 {
                        [] => MutexScheme::NONE,
                        [m] => scheme_of(m)?,
                        _ => return Err(bad_spec(s, "too many components")),
                    };
                    HeuristicSpec { substrate: Substrate::Mg, kind, agg: Some(agg), scheme }
                }
                _ => return Err(bad_spec(s, "expected mg:KIND:(max|sum)[:SCHEME] or mg:rpu[:SCHEME]")),
            },
            ["lug", rest @ ..] => match rest {
                ["rp"] => HeuristicSpec { substrate: Substrate::Lug, kind: Kind::Rp, agg: None, scheme: MutexScheme::NONE },
                ["rp", m] => HeuristicSpec { substrate: Substrate::Lug, kind: Kind::Rp, agg: None, scheme: scheme_of(m)? },
                [k, rest2 @ ..] => {
                    let kind = parse_kind(s, k)?;
                    if !matches!(kind, Kind::Max | Kind::Sum | Kind::Level) {
                        return Err(bad_spec(s, format!("lug supports max|sum|level|rp, got `{k}`")));
                    }
                    // A third token is an aggregation when it reads as
                    // one, otherwise a mutex scheme. Joint handling is
                    // the default, so an explicit `max` normalizes away.
                    let (agg, scheme) = match rest2 {
                        [] => (None, MutexScheme::NONE),
                        ["max"] => (None, MutexScheme::NONE),
                        ["sum"] => (Some(Agg::Sum), MutexScheme::NONE),
                        ["max", m] => (None, scheme_of(m)?),
                        ["sum", m] => (Some(Agg::Sum), scheme_of(m)?),
                        [m] => (None, scheme_of(m)?),
                        _ => return Err(bad_spec(s, "too many components")),
                    };
                    HeuristicSpec { substrate: Substrate::Lug, kind, agg, scheme }
                }
                _ => return Err(bad_spec(s, "expected lug:KIND[...]")),
            },
            _ => return Err(bad_spec(s, "unknown heuristic; try zero, card, sg:…, sg1:…, mg:…, lug:…")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn kind_str(k: Kind) -> &'static str {
            match k {
                Kind::Zero => "zero",
                Kind::Card => "card",
                Kind::Max => "max",
                Kind::Sum => "sum",
                Kind::Level => "level",
                Kind::Rp => "rp",
                Kind::RpUnion => "rpu",
            }
        }
        match self.substrate {
            Substrate::None => write!(f, "{}", kind_str(self.kind))?,
            Substrate::SgUnion => write!(f, "sg:{}", kind_str(self.kind))?,
            Substrate::SgSample => write!(f, "sg1:{}", kind_str(self.kind))?,
            Substrate::Mg => {
                write!(f, "mg:{}", kind_str(self.kind))?;
                if let Some(a) = self.agg {
                    write!(f, ":{}", if a == Agg::Max { "max" } else { "sum" })?;
                }
            }
            Substrate::Lug => {
                write!(f, "lug:{}", kind_str(self.kind))?;
                if self.agg == Some(Agg::Sum) {
                    write!(f, ":sum")?;
                }
            }
        }
        if self.scheme != MutexScheme::NONE {
            write!(f, ":{}", self.scheme)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Classical-graph values
// ---------------------------------------------------------------------------

/// A relaxed plan over one or more classical graphs. Layer `j` holds the
/// elements chosen between levels `j` and `j+1`; `subgoals[k]` the
/// literals the plan must provide at level `k`.
#[derive(Debug, Clone, Default)]
pub struct RelaxedPlan {
    pub acts: Vec<BTreeSet<usize>>,
    pub effs: Vec<BTreeSet<usize>>,
    pub subgoals: Vec<BTreeSet<Lit>>,
    /// Distinct non-persistence actions summed over layers.
    pub value: f64,
}

fn count_value(ground: &GroundSet, acts: &[BTreeSet<usize>]) -> f64 {
    acts.iter()
        .map(|layer| layer.iter().filter(|&&a| !ground.is_persist(a)).count())
        .sum::<usize>() as f64
}

/// Cheapest first level among the clause's literals; `None` if no
/// literal ever appears.
pub fn clause_cost(g: &ClassicalGraph, clause: &[Lit]) -> Option<usize> {
    clause.iter().filter_map(|&l| g.lit_level(l)).min()
}

/// First level where some constituent of `bs` is present and mutex-free.
pub fn constituent_level(store: &mut Store, g: &ClassicalGraph, bs: Formula) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for c in store.to_constituents(bs)? {
        if let Some(k) = g.cube_level(&c) {
            best = Some(best.map_or(k, |b| b.min(k)));
        }
    }
    Ok(best)
}

/// The constituent reachable earliest, with its level.
fn best_constituent(store: &mut Store, g: &ClassicalGraph, bs: Formula) -> Result<Option<(Vec<Lit>, usize)>> {
    let mut best: Option<(Vec<Lit>, usize)> = None;
    for c in store.to_constituents(bs)? {
        if let Some(k) = g.cube_level(&c) {
            if best.as_ref().map_or(true, |(_, bk)| k < *bk) {
                best = Some((c, k));
            }
        }
    }
    Ok(best)
}

/// Extracts a relaxed plan for the cheapest constituent of `bs`, or
/// `None` when no constituent is reachable. Per subgoal literal the
/// chosen effect is persistence when present, otherwise the supporter
/// whose action enters the graph earliest, ties broken by smallest
/// (action id, effect index).
pub fn classical_relaxed_plan(
    store: &mut Store,
    ground: &GroundSet,
    g: &ClassicalGraph,
    bs: Formula,
) -> Result<Option<RelaxedPlan>> {
    let Some((cube, b)) = best_constituent(store, g, bs)? else {
        return Ok(None);
    };
    let mut plan = RelaxedPlan {
        acts: vec![BTreeSet::new(); b],
        effs: vec![BTreeSet::new(); b],
        subgoals: vec![BTreeSet::new(); b + 1],
        value: 0.0,
    };
    plan.subgoals[b] = cube.into_iter().collect();
    for r in (1..=b).rev() {
        let goals: Vec<Lit> = plan.subgoals[r].iter().copied().collect();
        for l in goals {
            let pe = ground.persist_effect(l);
            let e = if g.eff_at(r - 1, pe) {
                pe
            } else {
                let cand = ground
                    .supporters(l)
                    .iter()
                    .map(|&e| e as usize)
                    .filter(|&e| !ground.is_persist(ground.eff_action(e)) && g.eff_at(r - 1, e))
                    .min_by_key(|&e| {
                        let a = ground.eff_action(e);
                        (g.act_level(a).unwrap_or(usize::MAX), a, ground.eff_index(e))
                    });
                match cand {
                    Some(e) => e,
                    None => {
                        return Err(Error::Invalid(format!(
                            "relaxed plan: no supporter for a level-{r} subgoal; graph and extraction disagree"
                        )))
                    }
                }
            };
            let a = ground.eff_action(e);
            plan.effs[r - 1].insert(e);
            plan.acts[r - 1].insert(a);
            for &l2 in ground.pre(a).iter().chain(ground.ante(e)) {
                plan.subgoals[r - 1].insert(l2);
            }
        }
    }
    plan.value = count_value(ground, &plan.acts);
    Ok(Some(plan))
}

/// Kind dispatch on one classical graph. Infinite when `bs` is
/// unreachable on the graph.
pub fn sg_heuristic(store: &mut Store, ground: &GroundSet, g: &ClassicalGraph, kind: Kind, bs: Formula) -> Result<f64> {
    if bs.is_false() {
        return Ok(f64::INFINITY);
    }
    Ok(match kind {
        Kind::Zero => 0.0,
        Kind::Card => store.count_models(bs)? as f64,
        Kind::Max | Kind::Sum => {
            let costs = store
                .to_clauses(bs)?
                .into_iter()
                .map(|c| clause_cost(g, &c).map_or(f64::INFINITY, |k| k as f64));
            if kind == Kind::Max {
                costs.fold(0.0, f64::max)
            } else {
                costs.sum()
            }
        }
        Kind::Level => constituent_level(store, g, bs)?.map_or(f64::INFINITY, |k| k as f64),
        Kind::Rp => classical_relaxed_plan(store, ground, g, bs)?.map_or(f64::INFINITY, |p| p.value),
        Kind::RpUnion => return Err(Error::Invalid("rpu needs multiple graphs".into())),
    })
}

/// Layer-wise union of relaxed plans. `end_aligned` pads shorter plans
/// at the front so all plans share their last layer (regression);
/// otherwise they share layer 0 (progression).
pub fn union_relaxed_plans(ground: &GroundSet, plans: &[RelaxedPlan], end_aligned: bool) -> RelaxedPlan {
    let b = plans.iter().map(|p| p.acts.len()).max().unwrap_or(0);
    let mut u = RelaxedPlan {
        acts: vec![BTreeSet::new(); b],
        effs: vec![BTreeSet::new(); b],
        subgoals: vec![BTreeSet::new(); b + 1],
        value: 0.0,
    };
    for p in plans {
        let off = if end_aligned { b - p.acts.len() } else { 0 };
        for (j, layer) in p.acts.iter().enumerate() {
            u.acts[j + off].extend(layer.iter().copied());
        }
        for (j, layer) in p.effs.iter().enumerate() {
            u.effs[j + off].extend(layer.iter().copied());
        }
        for (k, layer) in p.subgoals.iter().enumerate() {
            if k + off < u.subgoals.len() {
                u.subgoals[k + off].extend(layer.iter().copied());
            }
        }
    }
    u.value = count_value(ground, &u.acts);
    u
}

/// Aggregated kind value over per-world graphs.
pub fn mg_heuristic(
    store: &mut Store,
    ground: &GroundSet,
    graphs: &[ClassicalGraph],
    kind: Kind,
    agg: Agg,
    bs: Formula,
) -> Result<f64> {
    let mut total = 0.0f64;
    for g in graphs {
        let v = sg_heuristic(store, ground, g, kind, bs)?;
        total = match agg {
            Agg::Max => total.max(v),
            Agg::Sum => total + v,
        };
    }
    Ok(total)
}

/// Union of the per-graph relaxed plans; `None` when any graph cannot
/// reach `bs` (a conformant plan must cover every world).
pub fn mg_rp_union(
    store: &mut Store,
    ground: &GroundSet,
    graphs: &[ClassicalGraph],
    bs: Formula,
    end_aligned: bool,
) -> Result<Option<RelaxedPlan>> {
    let mut plans = Vec::with_capacity(graphs.len());
    for g in graphs {
        match classical_relaxed_plan(store, ground, g, bs)? {
            Some(p) => plans.push(p),
            None => return Ok(None),
        }
    }
    Ok(Some(union_relaxed_plans(ground, &plans, end_aligned)))
}

// ---------------------------------------------------------------------------
// Labelled-graph values
// ---------------------------------------------------------------------------

/// First level whose extended label of the clause covers all of `bs_p`.
pub fn lug_clause_cost(store: &mut Store, lug: &Lug, clause: &[Lit]) -> Option<usize> {
    let f = store.clause(clause);
    for k in 0..lug.levels() {
        let ext = lug.extended_label(store, k, f);
        if store.entails(lug.bs_p, ext) {
            return Some(k);
        }
    }
    None
}

/// Per-world clause cost: first level whose extended label holds in `w`.
fn lug_world_clause_cost(store: &mut Store, lug: &Lug, f_clause: Formula, w: &State) -> Option<usize> {
    for k in 0..lug.levels() {
        let ext = lug.extended_label(store, k, f_clause);
        if store.eval(ext, w) {
            return Some(k);
        }
    }
    None
}

/// Per-world level: first level where some constituent is supported in
/// `w` with no same-world literal mutex active in `w`.
fn lug_world_level(store: &Store, lug: &Lug, constituents: &[Vec<Lit>], w: &State) -> Option<usize> {
    for k in 0..lug.levels() {
        'cons: for c in constituents {
            for &l in c {
                if !store.eval(lug.lit_label(k, l), w) {
                    continue 'cons;
                }
            }
            if let Some(m) = lug.mutex_level(k) {
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        let lab = m.lit_label(c[i], c[j]);
                        if !lab.is_false() && store.eval(lab, w) {
                            continue 'cons;
                        }
                    }
                }
            }
            return Some(k);
        }
    }
    None
}

/// Max/sum/level on the labelled graph. `agg: None` treats the worlds
/// jointly (entailment by `bs_p`, mutex-aware level); `Some(Sum)` sums
/// per-world costs; `Some(Max)` equals the joint handling.
pub fn lug_heuristic(store: &mut Store, lug: &Lug, kind: Kind, agg: Option<Agg>, bs: Formula) -> Result<f64> {
    if bs.is_false() {
        return Ok(f64::INFINITY);
    }
    let joint = !matches!(agg, Some(Agg::Sum));
    Ok(match kind {
        Kind::Max | Kind::Sum => {
            let clauses = store.to_clauses(bs)?;
            if joint {
                let costs = clauses
                    .iter()
                    .map(|c| lug_clause_cost(store, lug, c).map_or(f64::INFINITY, |k| k as f64));
                if kind == Kind::Max {
                    costs.fold(0.0, f64::max)
                } else {
                    costs.sum()
                }
            } else {
                let fs: Vec<Formula> = clauses.iter().map(|c| store.clause(c)).collect();
                let mut total = 0.0f64;
                for w in &lug.worlds {
                    let costs = fs
                        .iter()
                        .map(|&f| lug_world_clause_cost(store, lug, f, w).map_or(f64::INFINITY, |k| k as f64));
                    total += if kind == Kind::Max { costs.fold(0.0, f64::max) } else { costs.sum() };
                }
                total
            }
        }
        Kind::Level => {
            if joint {
                lug_first_reachable(store, lug, bs)?.map_or(f64::INFINITY, |k| k as f64)
            } else {
                let cs = store.to_constituents(bs)?;
                let mut total = 0.0f64;
                for w in &lug.worlds {
                    total += lug_world_level(store, lug, &cs, w).map_or(f64::INFINITY, |k| k as f64);
                }
                total
            }
        }
        _ => return Err(Error::Invalid("lug_heuristic handles max|sum|level".into())),
    })
}

/// A relaxed plan on the labelled graph. Chosen effects and open
/// subgoal clauses carry *need* labels: the worlds of `bs_p` they are
/// chosen for. Needs entail the element labels at their level.
#[derive(Debug, Clone, Default)]
pub struct LugRelaxedPlan {
    pub acts: Vec<BTreeSet<usize>>,
    pub effs: Vec<BTreeMap<usize, Formula>>,
    pub subgoals: Vec<BTreeMap<Vec<Lit>, Formula>>,
    /// Distinct non-persistence actions summed over layers.
    pub value: f64,
}

/// Extracts a relaxed plan covering every world of `bs_p`, or `None`
/// when `bs` is not reachable under the graph's mutex scheme. Each
/// subgoal clause is covered world-wise: all useful persistences first,
/// then greedily the effect covering the most uncovered worlds, ties
/// broken by smallest (action id, effect index).
pub fn lug_relaxed_plan(store: &mut Store, ground: &GroundSet, lug: &Lug, bs: Formula) -> Result<Option<LugRelaxedPlan>> {
    let Some(b) = lug_first_reachable(store, lug, bs)? else {
        return Ok(None);
    };
    let mut plan = LugRelaxedPlan {
        acts: vec![BTreeSet::new(); b],
        effs: vec![BTreeMap::new(); b],
        subgoals: vec![BTreeMap::new(); b + 1],
        value: 0.0,
    };
    for mut c in store.to_clauses(bs)? {
        c.sort();
        plan.subgoals[b].insert(c, lug.bs_p);
    }
    for r in (1..=b).rev() {
        let goals: Vec<(Vec<Lit>, Formula)> = plan.subgoals[r].iter().map(|(c, &n)| (c.clone(), n)).collect();
        for (clause, need) in goals {
            let mut rem = need;
            let mut chosen: Vec<(usize, Formula)> = Vec::new();
            for &l in &clause {
                if rem.is_false() {
                    break;
                }
                let pe = ground.persist_effect(l);
                let lab = lug.eff_label(r - 1, pe);
                if lab.is_false() {
                    continue;
                }
                if store.conj(lab, rem).is_false() {
                    continue;
                }
                chosen.push((pe, store.conj(lab, need)));
                let miss = store.neg(lab);
                rem = store.conj(rem, miss);
            }
            while !rem.is_false() {
                // Candidate effects giving some literal of the clause.
                let mut cands: BTreeSet<usize> = BTreeSet::new();
                for &l in &clause {
                    for &e in ground.supporters(l) {
                        let e = e as usize;
                        if !ground.is_persist(ground.eff_action(e)) {
                            cands.insert(e);
                        }
                    }
                }
                let mut best: Option<(u128, usize, usize, usize)> = None;
                for e in cands {
                    let lab = lug.eff_label(r - 1, e);
                    if lab.is_false() {
                        continue;
                    }
                    let covered = store.conj(lab, rem);
                    let gain = store.count_models(covered)?;
                    if gain == 0 {
                        continue;
                    }
                    let a = ground.eff_action(e);
                    let key = (gain, usize::MAX - a, usize::MAX - ground.eff_index(e), e);
                    if best.as_ref().map_or(true, |b| key > (b.0, b.1, b.2, b.3)) {
                        best = Some(key);
                    }
                }
                let Some((_, _, _, e)) = best else {
                    return Err(Error::Invalid(
                        "relaxed plan: open worlds with no covering effect; graph and extraction disagree".into(),
                    ));
                };
                let lab = lug.eff_label(r - 1, e);
                chosen.push((e, store.conj(lab, need)));
                let miss = store.neg(lab);
                rem = store.conj(rem, miss);
            }
            for (e, contrib) in chosen {
                let a = ground.eff_action(e);
                plan.acts[r - 1].insert(a);
                let prev = plan.effs[r - 1].get(&e).copied().unwrap_or(Formula::FALSE);
                let merged = store.disj(prev, contrib);
                plan.effs[r - 1].insert(e, merged);
                for &l2 in ground.pre(a).iter().chain(ground.ante(e)) {
                    let key = vec![l2];
                    let prev = plan.subgoals[r - 1].get(&key).copied().unwrap_or(Formula::FALSE);
                    let merged = store.disj(prev, contrib);
                    plan.subgoals[r - 1].insert(key, merged);
                }
            }
        }
    }
    plan.value = count_value(ground, &plan.acts);
    Ok(Some(plan))
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

pub fn h_zero() -> f64 {
    0.0
}

/// Number of worlds in the belief.
pub fn h_card(store: &mut Store, bs: Formula) -> Result<f64> {
    Ok(store.count_models(bs)? as f64)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalStats {
    pub evals: u64,
    pub nanos: u128,
}

enum Built {
    Sg(ClassicalGraph),
    Mg(Vec<ClassicalGraph>),
    Lug(Lug),
}

/// A heuristic bound to a problem and direction. Owns the grounded
/// action table; graphs are built on demand — once for regression,
/// per evaluated belief for progression (values memoized by handle).
pub struct Evaluator {
    spec: HeuristicSpec,
    direction: Direction,
    fraction: f64,
    seed: u64,
    ground: GroundSet,
    init: Formula,
    goal: Formula,
    built: Option<Built>,
    memo: HashMap<Formula, f64>,
    stats: EvalStats,
}

impl Evaluator {
    pub fn new(problem: &Problem, direction: Direction, spec: HeuristicSpec) -> Result<Evaluator> {
        spec.validate()?;
        Ok(Evaluator {
            spec,
            direction,
            fraction: 1.0,
            seed: 0,
            ground: GroundSet::new(problem),
            init: problem.init,
            goal: problem.goal,
            built: None,
            memo: HashMap::new(),
            stats: EvalStats::default(),
        })
    }

    /// Sample a fraction of the worlds (rounded up) with a seeded RNG
    /// instead of using all of them. Fraction 1 keeps every world and
    /// makes the seed irrelevant.
    pub fn with_sampling(mut self, fraction: f64, seed: u64) -> Evaluator {
        self.fraction = fraction;
        self.seed = seed;
        self
    }

    pub fn spec(&self) -> HeuristicSpec {
        self.spec
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    /// The estimate for one belief, in the bound direction. Infinity
    /// signals a dead end the search may prune.
    pub fn evaluate(&mut self, store: &mut Store, bs: Formula) -> Result<f64> {
        let t0 = Instant::now();
        let r = self.eval_inner(store, bs);
        self.stats.evals += 1;
        self.stats.nanos += t0.elapsed().as_nanos();
        r
    }

    fn eval_inner(&mut self, store: &mut Store, bs: Formula) -> Result<f64> {
        match self.spec.kind {
            Kind::Zero => return Ok(0.0),
            Kind::Card => return h_card(store, bs),
            _ => {}
        }
        match self.direction {
            Direction::Regression => {
                if self.built.is_none() {
                    self.built = Some(self.build(store, self.init)?);
                }
                let built = self.built.as_ref().unwrap();
                Self::value_of(store, &self.ground, self.spec, self.direction, built, bs)
            }
            Direction::Progression => {
                if let Some(&v) = self.memo.get(&bs) {
                    return Ok(v);
                }
                let built = self.build(store, bs)?;
                let v = Self::value_of(store, &self.ground, self.spec, self.direction, &built, self.goal)?;
                self.memo.insert(bs, v);
                Ok(v)
            }
        }
    }

    fn build(&self, store: &mut Store, bs_p: Formula) -> Result<Built> {
        Ok(match self.spec.substrate {
            Substrate::None => return Err(Error::Invalid("no substrate to build".into())),
            Substrate::SgUnion => {
                let lits = aggregate_state(store, bs_p);
                Built::Sg(build_single(&self.ground, &lits, self.spec.scheme.depth))
            }
            Substrate::SgSample => {
                let w = sample_world(store, bs_p, self.seed)?;
                let lits: Vec<Lit> = w.lits().collect();
                Built::Sg(build_single(&self.ground, &lits, self.spec.scheme.depth))
            }
            Substrate::Mg => {
                let gs = build_mg(store, &self.ground, bs_p, self.spec.scheme.depth, self.fraction, self.seed)?;
                Built::Mg(gs.into_iter().map(|(_, g)| g).collect())
            }
            Substrate::Lug => Built::Lug(build_lug(store, &self.ground, bs_p, self.spec.scheme, self.fraction, self.seed)?),
        })
    }

    fn value_of(
        store: &mut Store,
        ground: &GroundSet,
        spec: HeuristicSpec,
        direction: Direction,
        built: &Built,
        bs_i: Formula,
    ) -> Result<f64> {
        match built {
            Built::Sg(g) => sg_heuristic(store, ground, g, spec.kind, bs_i),
            Built::Mg(gs) => {
                if spec.kind == Kind::RpUnion {
                    let end_aligned = direction == Direction::Regression;
                    Ok(mg_rp_union(store, ground, gs, bs_i, end_aligned)?.map_or(f64::INFINITY, |p| p.value))
                } else {
                    mg_heuristic(store, ground, gs, spec.kind, spec.agg.expect("validated"), bs_i)
                }
            }
            Built::Lug(l) => {
                if spec.kind == Kind::Rp {
                    Ok(lug_relaxed_plan(store, ground, l, bs_i)?.map_or(f64::INFINITY, |p| p.value))
                } else {
                    lug_heuristic(store, l, spec.kind, spec.agg, bs_i)
                }
            }
        }
    }
}

/// One world of the belief, chosen by a seeded draw over the model
/// enumeration.
fn sample_world(store: &mut Store, bs: Formula, seed: u64) -> Result<State> {
    let mut ms = store.models(bs)?;
    if ms.is_empty() {
        return Err(Error::Invalid("cannot sample a world from an empty belief".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i = rand::seq::index::sample(&mut rng, ms.len(), 1).index(0);
    Ok(ms.swap_remove(i))
}
