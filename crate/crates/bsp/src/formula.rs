//! Canonical propositional formulas over a fixed fluent universe.
//!
//! Formulas live in a [`Store`] that keeps them in reduced ordered BDD form
//! (variable order = fluent id). Canonicity makes semantic equality a handle
//! comparison: two formulas built in the same store are equivalent iff their
//! [`Formula`] handles are equal. The empty conjunction is ⊤ and the empty
//! disjunction is ⊥.
//!
//! Beyond the boolean connectives the store offers the views the planner
//! needs: model enumeration/counting, a prime-implicate clause cover
//! (`to_clauses`), a dual cover by *constituents* — minimal consistent
//! conjunctions entailing the formula (`to_constituents`) — and the
//! aggregate literal set of the canonical representation.

use std::collections::HashMap;
use std::fmt;

use crate::sexpr::{self, Sexpr};
use crate::{Error, Result};

/// Index of a fluent (propositional variable) in a [`Universe`].
pub type FluentId = u32;

/// The fixed set of fluents a store's formulas range over.
#[derive(Debug, Clone)]
pub struct Universe {
    names: Vec<String>,
    index: HashMap<String, FluentId>,
}

impl Universe {
    /// Build a universe from distinct fluent names. Order is significant:
    /// it fixes both the BDD variable order and state bit layout.
    pub fn new<I, S>(names: I) -> Result<Universe>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Invalid("empty fluent name".into()));
            }
            if index.insert(n.clone(), i as FluentId).is_some() {
                return Err(Error::Invalid(format!("duplicate fluent `{n}`")));
            }
        }
        Ok(Universe { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: FluentId) -> &str {
        &self.names[id as usize]
    }

    pub fn id(&self, name: &str) -> Option<FluentId> {
        self.index.get(name).copied()
    }

    pub fn fluents(&self) -> impl Iterator<Item = FluentId> {
        0..self.len() as FluentId
    }
}

/// A literal: a fluent or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    fluent: FluentId,
    positive: bool,
}

impl Lit {
    pub fn new(fluent: FluentId, positive: bool) -> Lit {
        Lit { fluent, positive }
    }

    pub fn pos(fluent: FluentId) -> Lit {
        Lit { fluent, positive: true }
    }

    pub fn neg(fluent: FluentId) -> Lit {
        Lit { fluent, positive: false }
    }

    pub fn fluent(self) -> FluentId {
        self.fluent
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Lit {
        Lit { fluent: self.fluent, positive: !self.positive }
    }

    /// Dense index: positive literal of fluent f is 2f, negative is 2f+1.
    pub fn index(self) -> usize {
        (self.fluent as usize) * 2 + usize::from(!self.positive)
    }

    pub fn from_index(i: usize) -> Lit {
        Lit { fluent: (i / 2) as FluentId, positive: i % 2 == 0 }
    }

    pub fn display(self, uni: &Universe) -> String {
        if self.positive {
            uni.name(self.fluent).to_string()
        } else {
            format!("(not {})", uni.name(self.fluent))
        }
    }
}

/// Normalize a conjunction of literals: sort, dedup, detect `l ∧ ¬l`.
/// Returns `None` if the cube is contradictory.
pub fn normalize_cube(mut lits: Vec<Lit>) -> Option<Vec<Lit>> {
    lits.sort();
    lits.dedup();
    for w in lits.windows(2) {
        if w[0].fluent == w[1].fluent {
            return None;
        }
    }
    Some(lits)
}

/// A complete truth assignment to every fluent of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    bits: Vec<u64>,
    n: u32,
}

impl State {
    /// All-false state over `n` fluents.
    pub fn new(n: usize) -> State {
        State { bits: vec![0; n.div_ceil(64)], n: n as u32 }
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, f: FluentId) -> bool {
        debug_assert!(f < self.n);
        self.bits[f as usize / 64] >> (f % 64) & 1 == 1
    }

    pub fn set(&mut self, f: FluentId, v: bool) {
        debug_assert!(f < self.n);
        let mask = 1u64 << (f % 64);
        if v {
            self.bits[f as usize / 64] |= mask;
        } else {
            self.bits[f as usize / 64] &= !mask;
        }
    }

    pub fn holds(&self, l: Lit) -> bool {
        self.get(l.fluent) == l.positive
    }

    /// The literals of this state, one per fluent, in fluent order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        (0..self.n).map(|f| Lit::new(f, self.get(f)))
    }

    pub fn display(&self, uni: &Universe) -> String {
        let parts: Vec<String> = self.lits().map(|l| l.display(uni)).collect();
        format!("(and {})", parts.join(" "))
    }
}

/// Handle to a canonical formula in a specific [`Store`]. Handles from the
/// same store are equal iff the formulas are logically equivalent; handles
/// from different stores must not be mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(u32);

impl Formula {
    pub const FALSE: Formula = Formula(0);
    pub const TRUE: Formula = Formula(1);

    pub fn is_false(self) -> bool {
        self == Formula::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Formula::TRUE
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Safety caps for operations whose output can blow up.
#[derive(Debug, Clone)]
pub struct Caps {
    /// `count_models` errors above this many models.
    pub model_count: u128,
    /// `models` errors above this many states.
    pub enumeration: usize,
    /// `to_clauses` / `to_constituents` error above this many raw paths.
    pub cover_paths: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { model_count: 1 << 20, enumeration: 1 << 16, cover_paths: 1 << 16 }
    }
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

/// Shared store of canonical formulas over one universe.
pub struct Store {
    uni: Universe,
    caps: Caps,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    and_cache: HashMap<(u32, u32), u32>,
    or_cache: HashMap<(u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
}

impl Store {
    pub fn new(uni: Universe) -> Store {
        Store::with_caps(uni, Caps::default())
    }

    pub fn with_caps(uni: Universe, caps: Caps) -> Store {
        // Slots 0 and 1 are the ⊥ and ⊤ sentinels.
        let nodes = vec![
            Node { var: TERMINAL_VAR, lo: 0, hi: 0 },
            Node { var: TERMINAL_VAR, lo: 1, hi: 1 },
        ];
        Store { uni, caps, nodes, unique: HashMap::new(), and_cache: HashMap::new(), or_cache: HashMap::new(), not_cache: HashMap::new() }
    }

    pub fn universe(&self) -> &Universe {
        &self.uni
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    /// Number of live BDD nodes (diagnostic).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn var(&self, f: u32) -> u32 {
        self.nodes[f as usize].var
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    pub fn lit(&mut self, l: Lit) -> Formula {
        assert!(
            (l.fluent as usize) < self.uni.len(),
            "literal fluent {} outside universe of {} fluents",
            l.fluent,
            self.uni.len()
        );
        let f = if l.positive { self.mk(l.fluent, 0, 1) } else { self.mk(l.fluent, 1, 0) };
        Formula(f)
    }

    /// Conjunction of literals; ⊥ if contradictory, ⊤ if empty.
    pub fn cube(&mut self, lits: &[Lit]) -> Formula {
        let mut sorted: Vec<Lit> = lits.to_vec();
        sorted.sort();
        // Build bottom-up (highest var first) so each conj is O(1)-ish.
        let mut acc = 1u32;
        for l in sorted.iter().rev() {
            let unit = self.lit(*l).0;
            acc = self.apply_and(unit, acc);
        }
        Formula(acc)
    }

    /// Disjunction of literals; ⊤ if tautological, ⊥ if empty.
    pub fn clause(&mut self, lits: &[Lit]) -> Formula {
        let mut sorted: Vec<Lit> = lits.to_vec();
        sorted.sort();
        let mut acc = 0u32;
        for l in sorted.iter().rev() {
            let unit = self.lit(*l).0;
            acc = self.apply_or(unit, acc);
        }
        Formula(acc)
    }

    /// The cube naming every fluent of a complete state.
    pub fn state_cube(&mut self, s: &State) -> Formula {
        assert_eq!(s.len(), self.uni.len(), "state universe mismatch");
        let mut acc = 1u32;
        for f in (0..s.len() as FluentId).rev() {
            let unit = self.lit(Lit::new(f, s.get(f))).0;
            acc = self.apply_and(unit, acc);
        }
        Formula(acc)
    }

    pub fn conj(&mut self, a: Formula, b: Formula) -> Formula {
        Formula(self.apply_and(a.0, b.0))
    }

    pub fn disj(&mut self, a: Formula, b: Formula) -> Formula {
        Formula(self.apply_or(a.0, b.0))
    }

    pub fn neg(&mut self, a: Formula) -> Formula {
        Formula(self.apply_not(a.0))
    }

    pub fn conj_all<I: IntoIterator<Item = Formula>>(&mut self, fs: I) -> Formula {
        let mut acc = Formula::TRUE;
        for f in fs {
            acc = self.conj(acc, f);
        }
        acc
    }

    pub fn disj_all<I: IntoIterator<Item = Formula>>(&mut self, fs: I) -> Formula {
        let mut acc = Formula::FALSE;
        for f in fs {
            acc = self.disj(acc, f);
        }
        acc
    }

    pub fn iff(&mut self, a: Formula, b: Formula) -> Formula {
        let both = self.conj(a, b);
        let na = self.neg(a);
        let nb = self.neg(b);
        let neither = self.conj(na, nb);
        self.disj(both, neither)
    }

    /// `a ⊨ b`, i.e. every model of `a` satisfies `b`.
    pub fn entails(&mut self, a: Formula, b: Formula) -> bool {
        let nb = self.neg(b);
        self.conj(a, nb).is_false()
    }

    /// `a` and `b` have no common model.
    pub fn disjoint(&mut self, a: Formula, b: Formula) -> bool {
        self.conj(a, b).is_false()
    }

    fn apply_and(&mut self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if a == 1 {
            return b;
        }
        if b == 1 {
            return a;
        }
        if a == b {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.and_cache.get(&key) {
            return r;
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let v = na.var.min(nb.var);
        let (alo, ahi) = if na.var == v { (na.lo, na.hi) } else { (a, a) };
        let (blo, bhi) = if nb.var == v { (nb.lo, nb.hi) } else { (b, b) };
        let lo = self.apply_and(alo, blo);
        let hi = self.apply_and(ahi, bhi);
        let r = self.mk(v, lo, hi);
        self.and_cache.insert(key, r);
        r
    }

    fn apply_or(&mut self, a: u32, b: u32) -> u32 {
        if a == 1 || b == 1 {
            return 1;
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        if a == b {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.or_cache.get(&key) {
            return r;
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let v = na.var.min(nb.var);
        let (alo, ahi) = if na.var == v { (na.lo, na.hi) } else { (a, a) };
        let (blo, bhi) = if nb.var == v { (nb.lo, nb.hi) } else { (b, b) };
        let lo = self.apply_or(alo, blo);
        let hi = self.apply_or(ahi, bhi);
        let r = self.mk(v, lo, hi);
        self.or_cache.insert(key, r);
        r
    }

    fn apply_not(&mut self, a: u32) -> u32 {
        match a {
            0 => return 1,
            1 => return 0,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let n = self.nodes[a as usize];
        let lo = self.apply_not(n.lo);
        let hi = self.apply_not(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.not_cache.insert(a, r);
        r
    }

    /// Restrict `f` by fixing `fluent := value`.
    pub fn cofactor(&mut self, f: Formula, fluent: FluentId, value: bool) -> Formula {
        let mut memo = HashMap::new();
        Formula(self.cofactor_rec(f.0, fluent, value, &mut memo))
    }

    fn cofactor_rec(&mut self, f: u32, fluent: FluentId, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        if f <= 1 {
            return f;
        }
        let n = self.nodes[f as usize];
        if n.var > fluent {
            return f; // ordered: `fluent` cannot appear below
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let r = if n.var == fluent {
            if value {
                n.hi
            } else {
                n.lo
            }
        } else {
            let lo = self.cofactor_rec(n.lo, fluent, value, memo);
            let hi = self.cofactor_rec(n.hi, fluent, value, memo);
            self.mk(n.var, lo, hi)
        };
        memo.insert(f, r);
        r
    }

    /// Existentially quantify one fluent out of `f`.
    pub fn exists(&mut self, f: Formula, fluent: FluentId) -> Formula {
        let lo = self.cofactor(f, fluent, false);
        let hi = self.cofactor(f, fluent, true);
        self.disj(lo, hi)
    }

    /// Existentially quantify several fluents out of `f`.
    pub fn exists_many(&mut self, f: Formula, fluents: &[FluentId]) -> Formula {
        let mut acc = f;
        for &v in fluents {
            acc = self.exists(acc, v);
        }
        acc
    }

    /// Fluents that appear in the canonical form of `f`, sorted.
    pub fn support(&self, f: Formula) -> Vec<FluentId> {
        let mut seen = std::collections::HashSet::new();
        let mut vars = Vec::new();
        let mut stack = vec![f.0];
        while let Some(x) = stack.pop() {
            if x <= 1 || !seen.insert(x) {
                continue;
            }
            let n = self.nodes[x as usize];
            vars.push(n.var);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Literals appearing in the canonical representation of `f`: literal
    /// `l` is included iff some satisfying path of `f` passes through the
    /// `l` branch of a decision node. Don't-care fluents contribute nothing.
    pub fn aggregate_literals(&self, f: Formula) -> Vec<Lit> {
        let mut seen = std::collections::HashSet::new();
        let mut lits = std::collections::HashSet::new();
        let mut stack = vec![f.0];
        while let Some(x) = stack.pop() {
            if x <= 1 || !seen.insert(x) {
                continue;
            }
            let n = self.nodes[x as usize];
            // In a reduced BDD every non-⊥ child reaches ⊤.
            if n.hi != 0 {
                lits.insert(Lit::pos(n.var));
                stack.push(n.hi);
            }
            if n.lo != 0 {
                lits.insert(Lit::neg(n.var));
                stack.push(n.lo);
            }
        }
        let mut out: Vec<Lit> = lits.into_iter().collect();
        out.sort();
        out
    }

    /// Evaluate `f` under a complete state. O(depth).
    pub fn eval(&self, f: Formula, s: &State) -> bool {
        let mut x = f.0;
        while x > 1 {
            let n = self.nodes[x as usize];
            x = if s.get(n.var) { n.hi } else { n.lo };
        }
        x == 1
    }

    /// Exact model count of `f` over the whole universe.
    /// Errors if the count exceeds `caps.model_count`.
    pub fn count_models(&mut self, f: Formula) -> Result<u128> {
        let n = self.count_models_unchecked(f);
        if n > self.caps.model_count {
            return Err(Error::CapExceeded(format!(
                "model count {n} exceeds cap {}",
                self.caps.model_count
            )));
        }
        Ok(n)
    }

    /// Model count without the cap check, saturating at `u128::MAX`.
    pub fn count_models_unchecked(&self, f: Formula) -> u128 {
        fn pow2(e: u32) -> u128 {
            if e >= 128 {
                u128::MAX
            } else {
                1u128 << e
            }
        }
        let nvars = self.uni.len() as u32;
        let mut memo: HashMap<u32, u128> = HashMap::new();
        // count(x) = models below node x over vars [var(x)..n)
        fn rec(st: &Store, x: u32, memo: &mut HashMap<u32, u128>, nvars: u32) -> u128 {
            if x == 0 {
                return 0;
            }
            if x == 1 {
                return 1;
            }
            if let Some(&c) = memo.get(&x) {
                return c;
            }
            let n = st.nodes[x as usize];
            let scale = |st: &Store, child: u32, memo: &mut HashMap<u32, u128>| -> u128 {
                let base = rec(st, child, memo, nvars);
                let child_var = if child <= 1 { nvars } else { st.nodes[child as usize].var };
                let skipped = child_var - n.var - 1;
                base.saturating_mul(pow2(skipped))
            };
            let c = scale(st, n.lo, memo).saturating_add(scale(st, n.hi, memo));
            memo.insert(x, c);
            c
        }
        if f.0 <= 1 {
            return if f.0 == 0 { 0 } else { pow2(nvars) };
        }
        let top_var = self.var(f.0);
        rec(self, f.0, &mut memo, nvars).saturating_mul(pow2(top_var))
    }

    /// Enumerate all models of `f` in lexicographic order (fluent 0 most
    /// significant, false before true). Errors above `caps.enumeration`.
    pub fn models(&mut self, f: Formula) -> Result<Vec<State>> {
        let count = self.count_models_unchecked(f);
        if count > self.caps.enumeration as u128 {
            return Err(Error::CapExceeded(format!(
                "model enumeration of {count} states exceeds cap {}",
                self.caps.enumeration
            )));
        }
        let n = self.uni.len();
        let mut out = Vec::with_capacity(count as usize);
        let mut state = State::new(n);
        self.enum_rec(f.0, 0, &mut state, &mut out);
        Ok(out)
    }

    fn enum_rec(&self, x: u32, next_var: u32, state: &mut State, out: &mut Vec<State>) {
        if x == 0 {
            return;
        }
        let n_fluents = self.uni.len() as u32;
        if next_var == n_fluents {
            debug_assert_eq!(x, 1);
            out.push(state.clone());
            return;
        }
        let (var, lo, hi) = if x == 1 {
            (TERMINAL_VAR, 1, 1)
        } else {
            let n = self.nodes[x as usize];
            (n.var, n.lo, n.hi)
        };
        if var == next_var {
            state.set(next_var, false);
            self.enum_rec(lo, next_var + 1, state, out);
            state.set(next_var, true);
            self.enum_rec(hi, next_var + 1, state, out);
        } else {
            // `next_var` is skipped (don't-care): branch on both values.
            state.set(next_var, false);
            self.enum_rec(x, next_var + 1, state, out);
            state.set(next_var, true);
            self.enum_rec(x, next_var + 1, state, out);
        }
        state.set(next_var, false);
    }

    fn paths(&mut self, f: Formula, to_true: bool) -> Result<Vec<Vec<Lit>>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let target = if to_true { 1 } else { 0 };
        self.paths_rec(f.0, target, &mut path, &mut out)?;
        Ok(out)
    }

    fn paths_rec(&self, x: u32, target: u32, path: &mut Vec<Lit>, out: &mut Vec<Vec<Lit>>) -> Result<()> {
        if x <= 1 {
            if x == target {
                if out.len() >= self.caps.cover_paths {
                    return Err(Error::CapExceeded(format!(
                        "clause/constituent extraction exceeds {} paths",
                        self.caps.cover_paths
                    )));
                }
                out.push(path.clone());
            }
            return Ok(());
        }
        let n = self.nodes[x as usize];
        path.push(Lit::neg(n.var));
        self.paths_rec(n.lo, target, path, out)?;
        path.pop();
        path.push(Lit::pos(n.var));
        self.paths_rec(n.hi, target, path, out)?;
        path.pop();
        Ok(())
    }

    /// A minimal clausal cover κ(f): prime implicates whose conjunction is
    /// exactly `f`, each clause literal-minimal, no clause redundant.
    /// Deterministic order: by length, then literal indexes.
    /// κ(⊤) = {} and κ(⊥) = {∅}.
    pub fn to_clauses(&mut self, f: Formula) -> Result<Vec<Vec<Lit>>> {
        if f.is_true() {
            return Ok(Vec::new());
        }
        if f.is_false() {
            return Ok(vec![Vec::new()]);
        }
        // Each path to ⊥ is a falsifying cube; its negation is an implicate.
        let mut clauses: Vec<Vec<Lit>> = self
            .paths(f, false)?
            .into_iter()
            .map(|cube| cube.into_iter().map(Lit::negated).collect())
            .collect();
        // Shrink each clause while f still entails it.
        for clause in &mut clauses {
            let mut i = 0;
            while i < clause.len() && clause.len() > 1 {
                let mut shrunk = clause.clone();
                shrunk.remove(i);
                let cf = self.clause(&shrunk);
                if self.entails(f, cf) {
                    *clause = shrunk;
                } else {
                    i += 1;
                }
            }
            clause.sort();
        }
        clauses.sort();
        clauses.dedup();
        clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        // Drop clauses implied by the remaining ones.
        let mut kept: Vec<Vec<Lit>> = Vec::new();
        for i in 0..clauses.len() {
            let mut rest = Formula::TRUE;
            for (j, c) in clauses.iter().enumerate() {
                if j == i || kept.iter().any(|k| k == c) {
                    continue;
                }
                // candidate set = kept ∪ not-yet-decided (j > i)
                if j > i {
                    let cf = self.clause(c);
                    rest = self.conj(rest, cf);
                }
            }
            for k in &kept {
                let cf = self.clause(k);
                rest = self.conj(rest, cf);
            }
            let ci = self.clause(&clauses[i]);
            if !self.entails(rest, ci) {
                kept.push(clauses[i].clone());
            }
        }
        Ok(kept)
    }

    /// The dual cover ξ̂(f): minimal consistent cubes (constituents) whose
    /// disjunction is exactly `f`, each cube literal-minimal, none redundant.
    /// ξ̂(⊤) = {∅} and ξ̂(⊥) = {}.
    pub fn to_constituents(&mut self, f: Formula) -> Result<Vec<Vec<Lit>>> {
        if f.is_true() {
            return Ok(vec![Vec::new()]);
        }
        if f.is_false() {
            return Ok(Vec::new());
        }
        let mut cubes: Vec<Vec<Lit>> = self.paths(f, true)?;
        // Widen each cube while it still entails f.
        for cube in &mut cubes {
            let mut i = 0;
            while i < cube.len() {
                let mut wide = cube.clone();
                wide.remove(i);
                let cf = self.cube(&wide);
                if self.entails(cf, f) {
                    *cube = wide;
                } else {
                    i += 1;
                }
            }
            cube.sort();
        }
        cubes.sort();
        cubes.dedup();
        cubes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        // Drop cubes covered by the remaining ones.
        let mut kept_idx: Vec<usize> = (0..cubes.len()).collect();
        let mut i = 0;
        while i < kept_idx.len() {
            let cand = self.cube(&cubes[kept_idx[i]]);
            let mut rest = Formula::FALSE;
            for (pos, &j) in kept_idx.iter().enumerate() {
                if pos == i {
                    continue;
                }
                let cf = self.cube(&cubes[j]);
                rest = self.disj(rest, cf);
            }
            if self.entails(cand, rest) {
                kept_idx.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(kept_idx.into_iter().map(|j| cubes[j].clone()).collect())
    }

    /// Parse the textual debug syntax:
    /// `name | (not F) | (and F*) | (or F*) | (oneof F+)`.
    pub fn parse_formula(&mut self, text: &str) -> Result<Formula> {
        let node = sexpr::parse_one(text)?;
        self.formula_from_sexpr(&node)
    }

    pub(crate) fn formula_from_sexpr(&mut self, node: &Sexpr) -> Result<Formula> {
        match node {
            Sexpr::Atom { text, line, col } => match self.uni.id(text) {
                Some(f) => Ok(self.lit(Lit::pos(f))),
                None => Err(Error::Syntax {
                    line: *line,
                    col: *col,
                    msg: format!("unknown fluent `{text}`"),
                }),
            },
            Sexpr::List { items, line, col } => {
                let head = node.head().ok_or(Error::Syntax {
                    line: *line,
                    col: *col,
                    msg: "expected a connective (and/or/not/oneof)".into(),
                })?;
                let args = &items[1..];
                match head.as_str() {
                    "and" => {
                        let mut acc = Formula::TRUE;
                        for a in args {
                            let f = self.formula_from_sexpr(a)?;
                            acc = self.conj(acc, f);
                        }
                        Ok(acc)
                    }
                    "or" => {
                        let mut acc = Formula::FALSE;
                        for a in args {
                            let f = self.formula_from_sexpr(a)?;
                            acc = self.disj(acc, f);
                        }
                        Ok(acc)
                    }
                    "not" => {
                        if args.len() != 1 {
                            return Err(sexpr::err_at(node, "`not` takes exactly one argument"));
                        }
                        let f = self.formula_from_sexpr(&args[0])?;
                        Ok(self.neg(f))
                    }
                    "oneof" => {
                        if args.is_empty() {
                            return Err(sexpr::err_at(node, "`oneof` needs at least one argument"));
                        }
                        let fs: Vec<Formula> =
                            args.iter().map(|a| self.formula_from_sexpr(a)).collect::<Result<_>>()?;
                        let mut acc = Formula::FALSE;
                        for i in 0..fs.len() {
                            let mut term = fs[i];
                            for (j, &g) in fs.iter().enumerate() {
                                if j != i {
                                    let ng = self.neg(g);
                                    term = self.conj(term, ng);
                                }
                            }
                            acc = self.disj(acc, term);
                        }
                        Ok(acc)
                    }
                    other => Err(sexpr::err_at(node, format!("unknown connective `{other}`"))),
                }
            }
        }
    }

    /// Render `f` in the debug syntax as a minimized DNF. ⊤ prints as
    /// `(and)` and ⊥ as `(or)`; round-trips through `parse_formula`.
    pub fn print_formula(&mut self, f: Formula) -> Result<String> {
        if f.is_true() {
            return Ok("(and)".into());
        }
        if f.is_false() {
            return Ok("(or)".into());
        }
        let cubes = self.to_constituents(f)?;
        let cube_str = |c: &Vec<Lit>| -> String {
            match c.len() {
                1 => c[0].display(&self.uni),
                _ => {
                    let parts: Vec<String> = c.iter().map(|l| l.display(&self.uni)).collect();
                    format!("(and {})", parts.join(" "))
                }
            }
        };
        if cubes.len() == 1 {
            return Ok(cube_str(&cubes[0]));
        }
        let parts: Vec<String> = cubes.iter().map(cube_str).collect();
        Ok(format!("(or {})", parts.join(" ")))
    }
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store")
            .field("fluents", &self.uni.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}
