//! Plan search in both directions, plan validation, and a blind oracle.
//!
//! [`astar_regress`] runs weighted A\* backwards from the goal belief,
//! regressing over relevant causative actions until a subgoal is
//! entailed by the initial belief; the reversed path is a conformant
//! plan. [`aostar_progress`] runs weighted AO\* forwards: actions are
//! hyper-edges whose children are the sensor-reading branches of the
//! successor belief, node costs revise to the best action's cost 1 plus
//! the average of its children's costs, and each round expands every
//! unexpanded non-terminal leaf of the current best solution. The
//! search graph stays acyclic: self-loop successors and edges back into
//! an ancestor are rejected.
//!
//! [`validate`] replays a plan from every world of the initial belief
//! and reports failures instead of erroring. [`bfs_oracle`] computes
//! the exact optimal max-path length by value iteration over the
//! reachable belief space — the reference for optimality tests.

use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use crate::formula::{Formula, Store};
use crate::heuristic::{Direction, Evaluator};
use crate::model::Problem;
use crate::transition::{is_relevant, progress, progress_state, regress};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub expanded: u64,
    pub generated: u64,
    pub heuristic_nanos: u128,
    pub search_nanos: u128,
}

#[derive(Debug)]
pub enum Outcome {
    Solved(Plan),
    Unsolvable,
    Timeout,
}

#[derive(Debug)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: Stats,
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

/// A branch out of an action node. Causative actions have one branch
/// with no reading; sensors have one branch per consistent reading.
#[derive(Debug, Clone)]
pub struct PlanBranch {
    pub reading: Option<Formula>,
    pub next: usize,
}

#[derive(Debug, Clone)]
pub enum PlanStep {
    /// The belief here satisfies the goal.
    Goal,
    Act { action: usize, branches: Vec<PlanBranch> },
}

#[derive(Debug, Clone)]
pub struct PlanNode {
    /// Progression: the belief on reaching this node. Regression: the
    /// subgoal guaranteed to hold at this point of the execution.
    pub belief: Formula,
    pub step: PlanStep,
}

/// A rooted DAG of action applications; node 0 is the root. Conformant
/// plans are chains.
#[derive(Debug, Clone)]
pub struct Plan {
    pub nodes: Vec<PlanNode>,
}

impl Plan {
    fn empty(belief: Formula) -> Plan {
        Plan { nodes: vec![PlanNode { belief, step: PlanStep::Goal }] }
    }

    pub fn is_conditional(&self) -> bool {
        self.nodes.iter().any(|n| match &n.step {
            PlanStep::Goal => false,
            PlanStep::Act { branches, .. } => branches.len() > 1 || branches.iter().any(|b| b.reading.is_some()),
        })
    }

    /// Action ids in order, when the plan is an unconditional chain.
    pub fn steps(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        let mut at = 0;
        loop {
            match &self.nodes[at].step {
                PlanStep::Goal => return Some(out),
                PlanStep::Act { action, branches } => {
                    if branches.len() != 1 || branches[0].reading.is_some() {
                        return None;
                    }
                    out.push(*action);
                    at = branches[0].next;
                }
            }
        }
    }

    /// The plan quality metric: the longest root-to-goal path, counting
    /// actions.
    pub fn max_path_len(&self) -> usize {
        fn rec(plan: &Plan, at: usize, memo: &mut [Option<usize>]) -> usize {
            if let Some(v) = memo[at] {
                return v;
            }
            let v = match &plan.nodes[at].step {
                PlanStep::Goal => 0,
                PlanStep::Act { branches, .. } => {
                    1 + branches.iter().map(|b| rec(plan, b.next, memo)).max().unwrap_or(0)
                }
            };
            memo[at] = Some(v);
            v
        }
        let mut memo = vec![None; self.nodes.len()];
        rec(self, 0, &mut memo)
    }

    /// One action name per line for chains; an indented tree with
    /// `obs <reading>:` guards and `done` leaves for branching plans.
    pub fn render(&self, store: &mut Store, problem: &Problem) -> Result<String> {
        if let Some(seq) = self.steps() {
            let mut s = String::new();
            for a in seq {
                s.push_str(&problem.actions[a].name);
                s.push('\n');
            }
            return Ok(s);
        }
        fn rec(plan: &Plan, store: &mut Store, problem: &Problem, at: usize, indent: usize, out: &mut String) -> Result<()> {
            let pad = "  ".repeat(indent);
            match &plan.nodes[at].step {
                PlanStep::Goal => {
                    out.push_str(&pad);
                    out.push_str("done\n");
                }
                PlanStep::Act { action, branches } => {
                    out.push_str(&pad);
                    out.push_str(&problem.actions[*action].name);
                    out.push('\n');
                    for b in branches {
                        match b.reading {
                            None => rec(plan, store, problem, b.next, indent, out)?,
                            Some(r) => {
                                out.push_str(&pad);
                                out.push_str("obs ");
                                out.push_str(&store.print_formula(r)?);
                                out.push_str(":\n");
                                rec(plan, store, problem, b.next, indent + 1, out)?;
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        let mut s = String::new();
        rec(self, store, problem, 0, 0, &mut s)?;
        Ok(s)
    }
}

// ---------------------------------------------------------------------------
// Weighted A* regression
// ---------------------------------------------------------------------------

struct OpenEntry {
    f: f64,
    g: u32,
    seq: u64,
    node: Formula,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for OpenEntry {}
impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenEntry {
    // BinaryHeap pops the maximum, so "pop first" must compare greater:
    // lower f, then higher g, then earlier insertion.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.cmp(&other.g))
            .then(other.seq.cmp(&self.seq))
    }
}

fn over(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Weighted A\* over regressed subgoals, `f = g + w·h`. Terminates when
/// a subgoal is entailed by the initial belief; duplicate subgoals keep
/// their best g (worse re-encounters are dropped, better ones reopen).
/// Subgoals with infinite heuristic are pruned. All actions must be
/// observation-free.
pub fn astar_regress(
    store: &mut Store,
    problem: &Problem,
    eval: &mut Evaluator,
    weight: f64,
    deadline: Option<Instant>,
) -> Result<SearchResult> {
    if eval.direction() != Direction::Regression {
        return Err(Error::Invalid("regression search needs a regression-direction evaluator".into()));
    }
    if let Some(a) = problem.actions.iter().find(|a| a.has_observations()) {
        return Err(Error::SensorNotSupported(a.name.clone()));
    }
    let t0 = Instant::now();
    let h_nanos0 = eval.stats().nanos;
    let mut stats = Stats::default();
    let finish = |outcome: Outcome, mut stats: Stats, eval: &Evaluator| {
        stats.heuristic_nanos = eval.stats().nanos - h_nanos0;
        stats.search_nanos = t0.elapsed().as_nanos();
        Ok(SearchResult { outcome, stats })
    };

    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut best_g: HashMap<Formula, u32> = HashMap::new();
    let mut parent: HashMap<Formula, (usize, Formula)> = HashMap::new();
    let mut dead: HashSet<Formula> = HashSet::new();
    let mut seq = 0u64;

    if store.entails(problem.init, problem.goal) {
        return finish(Outcome::Solved(Plan::empty(problem.goal)), stats, eval);
    }
    let h0 = eval.evaluate(store, problem.goal)?;
    if h0.is_finite() {
        best_g.insert(problem.goal, 0);
        open.push(OpenEntry { f: weight * h0, g: 0, seq, node: problem.goal });
    }

    while let Some(e) = open.pop() {
        if over(deadline) {
            return finish(Outcome::Timeout, stats, eval);
        }
        if best_g.get(&e.node).is_some_and(|&bg| e.g > bg) {
            continue; // stale entry superseded by a reopening
        }
        if store.entails(problem.init, e.node) {
            // Walking parent links from the terminal subgoal back to the
            // goal yields the execution order directly (regression
            // discovered the plan back-to-front).
            let mut actions = Vec::new();
            let mut beliefs = vec![e.node];
            let mut cur = e.node;
            while let Some(&(ai, p)) = parent.get(&cur) {
                actions.push(ai);
                beliefs.push(p);
                cur = p;
            }
            let mut nodes = Vec::with_capacity(actions.len() + 1);
            for (i, &a) in actions.iter().enumerate() {
                nodes.push(PlanNode {
                    belief: beliefs[i],
                    step: PlanStep::Act { action: a, branches: vec![PlanBranch { reading: None, next: i + 1 }] },
                });
            }
            nodes.push(PlanNode { belief: *beliefs.last().unwrap(), step: PlanStep::Goal });
            return finish(Outcome::Solved(Plan { nodes }), stats, eval);
        }
        stats.expanded += 1;
        for (ai, action) in problem.actions.iter().enumerate() {
            if !is_relevant(store, action, e.node)? {
                continue;
            }
            let child = regress(store, action, e.node)?;
            if child.is_false() || dead.contains(&child) {
                continue;
            }
            let g2 = e.g + 1;
            if best_g.get(&child).is_some_and(|&bg| bg <= g2) {
                continue;
            }
            let h = eval.evaluate(store, child)?;
            if h.is_infinite() {
                dead.insert(child);
                continue;
            }
            best_g.insert(child, g2);
            parent.insert(child, (ai, e.node));
            seq += 1;
            stats.generated += 1;
            open.push(OpenEntry { f: g2 as f64 + weight * h, g: g2, seq, node: child });
        }
    }
    finish(Outcome::Unsolvable, stats, eval)
}

// ---------------------------------------------------------------------------
// Weighted AO* progression
// ---------------------------------------------------------------------------

struct AoEdge {
    action: usize,
    children: Vec<(Option<Formula>, usize)>,
}

struct AoNode {
    belief: Formula,
    terminal: bool,
    expanded: bool,
    /// `w·h` while the node is an unexpanded leaf.
    leaf_cost: f64,
    edges: Vec<AoEdge>,
    /// Best edge per the last revision.
    best: Option<usize>,
    cost: f64,
}

struct AoGraph {
    nodes: Vec<AoNode>,
    index: HashMap<Formula, usize>,
}

impl AoGraph {
    fn add(&mut self, store: &mut Store, eval: &mut Evaluator, goal: Formula, belief: Formula) -> Result<usize> {
        if let Some(&i) = self.index.get(&belief) {
            return Ok(i);
        }
        let terminal = store.entails(belief, goal);
        let leaf_cost = if terminal { 0.0 } else { eval.evaluate(store, belief)? };
        let i = self.nodes.len();
        self.nodes.push(AoNode { belief, terminal, expanded: false, leaf_cost, edges: Vec::new(), best: None, cost: 0.0 });
        self.index.insert(belief, i);
        Ok(i)
    }

    /// Does `from` reach `to` along hyper-edges? Used to keep the graph
    /// acyclic when an expansion would link to an existing node.
    fn reaches(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(n) = stack.pop() {
            for e in &self.nodes[n].edges {
                for &(_, c) in &e.children {
                    if c == to {
                        return true;
                    }
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        false
    }

    /// Recomputes every node's cost and best edge from scratch. A
    /// node's cost is 0 when terminal, `w·h` while a leaf, else the
    /// minimum over hyper-edges of 1 + the average of the children's
    /// costs. Ties prefer the edge whose newest child was created last,
    /// then the smallest action id. Idempotent, so termination leaves a
    /// revision fixpoint by construction.
    fn revise(&mut self, root: usize) {
        fn cost_of(g: &AoGraph, n: usize, memo: &mut [Option<(f64, Option<usize>)>]) -> f64 {
            if let Some((c, _)) = memo[n] {
                return c;
            }
            memo[n] = Some((f64::INFINITY, None)); // DAG: no cycles, placeholder never read back
            let node = &g.nodes[n];
            let r = if node.terminal {
                (0.0, None)
            } else if !node.expanded {
                (node.leaf_cost, None)
            } else {
                let mut best: Option<(f64, usize, usize, usize)> = None;
                for (ei, e) in node.edges.iter().enumerate() {
                    let mut sum = 0.0;
                    for &(_, c) in &e.children {
                        sum += cost_of(g, c, memo);
                    }
                    let cost = 1.0 + sum / e.children.len() as f64;
                    let newest = e.children.iter().map(|&(_, c)| c).max().unwrap_or(0);
                    let better = match &best {
                        None => true,
                        Some((bc, bnewest, baction, _)) => {
                            cost < *bc
                                || (cost == *bc
                                    && (newest > *bnewest || (newest == *bnewest && e.action < *baction)))
                        }
                    };
                    if better {
                        best = Some((cost, newest, e.action, ei));
                    }
                }
                match best {
                    Some((c, _, _, ei)) => (c, Some(ei)),
                    None => (f64::INFINITY, None),
                }
            };
            memo[n] = Some(r);
            r.0
        }
        let mut memo: Vec<Option<(f64, Option<usize>)>> = vec![None; self.nodes.len()];
        cost_of(self, root, &mut memo);
        // Nodes outside the root's cone keep consistent values too.
        for n in 0..self.nodes.len() {
            cost_of(self, n, &mut memo);
        }
        for (n, m) in memo.into_iter().enumerate() {
            let (c, b) = m.unwrap();
            self.nodes[n].cost = c;
            self.nodes[n].best = b;
        }
    }

    /// Unexpanded non-terminal nodes of the best solution subgraph.
    fn frontier(&self, root: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.terminal {
                continue;
            }
            if !node.expanded {
                out.insert(n);
                continue;
            }
            if let Some(b) = node.best {
                for &(_, c) in &node.edges[b].children {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        out
    }
}

/// Weighted AO\* over progressed beliefs. Each round revises costs,
/// takes the best solution subgraph, and expands all of its unexpanded
/// non-terminal leaves; it terminates when that solution has none left.
/// Hyper-edges that would close a cycle (including self-loops) are
/// rejected, keeping the graph — and hence every plan — acyclic.
pub fn aostar_progress(
    store: &mut Store,
    problem: &Problem,
    eval: &mut Evaluator,
    weight: f64,
    deadline: Option<Instant>,
) -> Result<SearchResult> {
    if eval.direction() != Direction::Progression {
        return Err(Error::Invalid("progression search needs a progression-direction evaluator".into()));
    }
    let t0 = Instant::now();
    let h_nanos0 = eval.stats().nanos;
    let mut stats = Stats::default();
    let finish = |outcome: Outcome, mut stats: Stats, eval: &Evaluator| {
        stats.heuristic_nanos = eval.stats().nanos - h_nanos0;
        stats.search_nanos = t0.elapsed().as_nanos();
        Ok(SearchResult { outcome, stats })
    };

    let mut g = AoGraph { nodes: Vec::new(), index: HashMap::new() };
    let root = g.add(store, eval, problem.goal, problem.init)?;
    // Scale leaf costs by the weight once at creation.
    g.nodes[root].leaf_cost *= weight;

    loop {
        g.revise(root);
        if g.nodes[root].cost.is_infinite() {
            return finish(Outcome::Unsolvable, stats, eval);
        }
        let frontier = g.frontier(root);
        if frontier.is_empty() {
            return finish(Outcome::Solved(extract_plan(&g, root)), stats, eval);
        }
        if over(deadline) {
            return finish(Outcome::Timeout, stats, eval);
        }
        for n in frontier {
            stats.expanded += 1;
            g.nodes[n].expanded = true;
            let belief = g.nodes[n].belief;
            for (ai, action) in problem.actions.iter().enumerate() {
                let succs = progress(store, action, belief)?;
                if succs.is_empty() {
                    continue; // not applicable
                }
                // Reject the edge if any existing successor closes a cycle.
                let mut ok = true;
                for s in &succs {
                    if s.belief == belief {
                        ok = false;
                        break;
                    }
                    if let Some(&ci) = g.index.get(&s.belief) {
                        if g.reaches(ci, n) {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mut children = Vec::with_capacity(succs.len());
                for s in succs {
                    let created = !g.index.contains_key(&s.belief);
                    let ci = g.add(store, eval, problem.goal, s.belief)?;
                    if created {
                        g.nodes[ci].leaf_cost *= weight;
                        stats.generated += 1;
                    }
                    children.push((s.reading, ci));
                }
                g.nodes[n].edges.push(AoEdge { action: ai, children });
            }
        }
    }
}

fn extract_plan(g: &AoGraph, root: usize) -> Plan {
    fn rec(g: &AoGraph, n: usize, map: &mut HashMap<usize, usize>, nodes: &mut Vec<PlanNode>) -> usize {
        if let Some(&p) = map.get(&n) {
            return p;
        }
        let p = nodes.len();
        map.insert(n, p);
        nodes.push(PlanNode { belief: g.nodes[n].belief, step: PlanStep::Goal });
        let node = &g.nodes[n];
        if !node.terminal {
            let e = &node.edges[node.best.expect("solution node has a best edge")];
            let branches = e
                .children
                .iter()
                .map(|&(r, c)| PlanBranch { reading: r, next: rec(g, c, map, nodes) })
                .collect();
            nodes[p].step = PlanStep::Act { action: e.action, branches };
        }
        p
    }
    let mut nodes = Vec::new();
    let mut map = HashMap::new();
    rec(g, root, &mut map, &mut nodes);
    Plan { nodes }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct ValidationReport {
    pub valid: bool,
    /// Static plan metric: longest action path in the DAG.
    pub max_path_len: usize,
    /// Worlds of the initial belief the plan was replayed from.
    pub worlds: usize,
    pub failures: Vec<String>,
}

/// Replays the plan from every world of the initial belief: actions
/// must be applicable state-wise, observation nodes follow the branch
/// whose reading holds, and every trajectory must end in a goal state.
/// Failures are report content, not errors.
pub fn validate(store: &mut Store, problem: &Problem, plan: &Plan) -> Result<ValidationReport> {
    let worlds = store.models(problem.init)?;
    let mut failures = Vec::new();
    'world: for w in &worlds {
        let mut cur = w.clone();
        let mut at = 0usize;
        loop {
            match &plan.nodes[at].step {
                PlanStep::Goal => {
                    if !store.eval(problem.goal, &cur) {
                        failures.push(format!(
                            "from {}: trajectory ends in non-goal state {}",
                            w.display(&problem.universe),
                            cur.display(&problem.universe)
                        ));
                    }
                    continue 'world;
                }
                PlanStep::Act { action, branches } => {
                    let a = &problem.actions[*action];
                    if !a.precondition.iter().all(|&l| cur.holds(l)) {
                        failures.push(format!(
                            "from {}: `{}` inapplicable in {}",
                            w.display(&problem.universe),
                            a.name,
                            cur.display(&problem.universe)
                        ));
                        continue 'world;
                    }
                    match progress_state(a, &cur) {
                        Ok(next) => cur = next,
                        Err(e) => {
                            failures.push(format!("from {}: {}", w.display(&problem.universe), e));
                            continue 'world;
                        }
                    }
                    let next = if branches.len() == 1 && branches[0].reading.is_none() {
                        Some(branches[0].next)
                    } else {
                        branches
                            .iter()
                            .find(|b| b.reading.is_some_and(|r| store.eval(r, &cur)))
                            .map(|b| b.next)
                    };
                    match next {
                        Some(n) => at = n,
                        None => {
                            failures.push(format!(
                                "from {}: no observation branch matches {}",
                                w.display(&problem.universe),
                                cur.display(&problem.universe)
                            ));
                            continue 'world;
                        }
                    }
                }
            }
        }
    }
    Ok(ValidationReport {
        valid: failures.is_empty(),
        max_path_len: plan.max_path_len(),
        worlds: worlds.len(),
        failures,
    })
}

// ---------------------------------------------------------------------------
// Blind oracle
// ---------------------------------------------------------------------------

/// Exact optimal max-path length by value iteration over the reachable
/// belief space (breadth-first closure, then `V(B) = min over actions
/// of 1 + max over branches V(B')`). `None` means unsolvable; more than
/// `cap` reachable beliefs is an error.
pub fn bfs_oracle(store: &mut Store, problem: &Problem, cap: usize) -> Result<Option<usize>> {
    bfs_oracle_from(store, problem, problem.init, cap)
}

/// [`bfs_oracle`] started from an arbitrary belief instead of the
/// problem's initial one; gives `h*` of any reachable belief state.
pub fn bfs_oracle_from(
    store: &mut Store,
    problem: &Problem,
    start: Formula,
    cap: usize,
) -> Result<Option<usize>> {
    let mut index: HashMap<Formula, usize> = HashMap::new();
    let mut beliefs: Vec<Formula> = Vec::new();
    let mut moves: Vec<Vec<Vec<usize>>> = Vec::new();
    index.insert(start, 0);
    beliefs.push(start);
    let mut at = 0;
    while at < beliefs.len() {
        let b = beliefs[at];
        let mut outs = Vec::new();
        for action in &problem.actions {
            let succs = progress(store, action, b)?;
            if succs.is_empty() {
                continue;
            }
            let mut children = Vec::with_capacity(succs.len());
            for s in succs {
                let ci = *index.entry(s.belief).or_insert_with(|| {
                    beliefs.push(s.belief);
                    beliefs.len() - 1
                });
                children.push(ci);
            }
            outs.push(children);
        }
        moves.push(outs);
        if beliefs.len() > cap {
            return Err(Error::CapExceeded(format!("belief-space oracle: more than {cap} reachable beliefs")));
        }
        at += 1;
    }
    let mut v: Vec<f64> = beliefs
        .iter()
        .map(|&b| if store.entails(b, problem.goal) { 0.0 } else { f64::INFINITY })
        .collect();
    loop {
        let mut changed = false;
        for i in 0..beliefs.len() {
            for children in &moves[i] {
                let worst = children.iter().map(|&c| v[c]).fold(0.0, f64::max);
                let cand = 1.0 + worst;
                if cand < v[i] {
                    v[i] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(if v[0].is_finite() { Some(v[0] as usize) } else { None })
}
