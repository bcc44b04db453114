//! Belief-space planning under initial-state uncertainty.
//!
//! A *belief state* is the set of world states an agent considers possible,
//! represented here as a canonical propositional formula over the problem's
//! fluents. This crate plans over belief states in two directions:
//!
//! * **regression** (A\*) from the goal belief back to the initial belief,
//!   producing conformant (unconditional) plans, and
//! * **progression** (AO\*) from the initial belief forward, producing
//!   conditional plans that branch on sensor readings.
//!
//! Search is guided by heuristics drawn from planning graphs built over the
//! belief state: a single classical graph seeded with one sampled world or
//! with the union of all worlds' literals, a set of per-world graphs, or a
//! single *labelled* graph whose elements carry formulas describing the
//! worlds that reach them. Graph mutexes (same-world and cross-world) refine
//! the reachability estimates.
//!
//! ```
//! use bsp::model::gen_btc;
//! use bsp::heuristic::{Direction, Evaluator, HeuristicSpec};
//! use bsp::search::{astar_regress, Outcome};
//!
//! let (mut store, problem) = gen_btc(2).unwrap();
//! let spec: HeuristicSpec = "lug:rp".parse().unwrap();
//! let mut eval = Evaluator::new(&problem, Direction::Regression, spec).unwrap();
//! let res = astar_regress(&mut store, &problem, &mut eval, 5.0, None).unwrap();
//! match res.outcome {
//!     Outcome::Solved(plan) => assert_eq!(plan.max_path_len(), 3),
//!     _ => panic!("btc(2) is solvable"),
//! }
//! ```

pub mod cli;
pub mod formula;
pub mod graphs;
pub mod heuristic;
pub mod model;
pub mod mutex;
pub mod search;
mod sexpr;
pub mod transition;

/// Unified error type for the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed textual input (problem files, formula syntax, suite files).
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    /// A fluent name not declared in the problem's universe.
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    /// Structurally invalid input that is not a pure syntax issue
    /// (inconsistent initial belief, bad generator size, bad suite row...).
    #[error("{0}")]
    Invalid(String),
    /// A configured safety cap was exceeded (model counting/enumeration,
    /// clause extraction, oracle state space).
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    /// Two effects of one action assert contradictory literals in a world
    /// where both fire. The model is ill-formed; this is never resolved
    /// silently.
    #[error("action `{0}` has conflicting effect consequents in a reachable world")]
    EffectConflict(String),
    /// Disjunction in an effect consequent (only conjunctions are allowed).
    #[error("action `{0}` has a disjunctive effect consequent")]
    DisjunctiveConsequent(String),
    /// A heuristic spec string that does not name a valid combination.
    #[error("invalid heuristic spec `{spec}`: {msg}")]
    BadHeuristicSpec { spec: String, msg: String },
    /// Operation applied to an action with observations where only
    /// causative actions are allowed (e.g. regression).
    #[error("action `{0}` has observations; not supported in this direction")]
    SensorNotSupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
