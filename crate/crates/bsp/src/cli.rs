//! Command-line front end: solve a single problem, run a benchmark suite,
//! or dump a table of heuristic values at one belief state.
//!
//! Exit codes: 0 solved, 1 unsolvable, 2 timeout, 3 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formula::{Formula, Store};
use crate::heuristic::{Direction, Evaluator, HeuristicSpec};
use crate::model::{gen_by_name, parse_problem, Problem};
use crate::mutex::{MutexScheme, WorldMode};
use crate::search::{
    aostar_progress, astar_regress, bfs_oracle, bfs_oracle_from, validate, Outcome, Plan,
};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bsp",
    version,
    about = "Belief-space planner: conformant and conditional planning over symbolic belief states"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one problem; print the plan and a final machine-readable STATS line.
    Solve(SolveArgs),
    /// Run every row of a suite file; print one CSV row per run.
    Bench(BenchArgs),
    /// Print every heuristic's value at one belief state, plus exact h* when cheap.
    Hsnapshot(SnapArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dir {
    /// A* backward from the goal; conformant plans only.
    Regress,
    /// AO* forward from the initial belief; branches on sensor readings.
    Progress,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Direction {
        match d {
            Dir::Regress => Direction::Regression,
            Dir::Progress => Direction::Progression,
        }
    }
}

/// Problem source: exactly one of a built-in generator or a file.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProblemSel {
    /// Built-in family instance: bt:N, btc:N, cbtc, btcs, cube:N, ring:N.
    #[arg(long, value_name = "NAME[:N]")]
    gen: Option<String>,
    /// Problem file in the s-expression problem format.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

impl ProblemSel {
    fn label(&self) -> String {
        match (&self.gen, &self.file) {
            (Some(g), _) => g.clone(),
            (_, Some(f)) => f.display().to_string(),
            _ => unreachable!("clap group requires one"),
        }
    }

    fn load(&self) -> Result<(Store, Problem)> {
        match (&self.gen, &self.file) {
            (Some(g), _) => gen_by_name(g),
            (_, Some(f)) => parse_problem(&fs::read_to_string(f)?),
            _ => unreachable!("clap group requires one"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemSel,
    /// Search direction.
    #[arg(long, value_enum, default_value_t = Dir::Regress)]
    dir: Dir,
    /// Heuristic spec, e.g. zero, card, sg:rp, mg:level:max, lug:rp:fx-ix.
    #[arg(long = "h", value_name = "SPEC", default_value = "lug:rp")]
    heuristic: String,
    /// Weight multiplying h in f = g + w*h.
    #[arg(long = "w", value_name = "FLOAT", default_value_t = 5.0)]
    weight: f64,
    /// Fraction of worlds sampled into graph substrates, in (0, 1].
    #[arg(long, value_name = "FLOAT", default_value_t = 1.0)]
    frac: f64,
    /// RNG seed for world sampling [default: $BSP_SEED or 0].
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Mutex scheme overriding the spec's: nx|stx|dyx|fx, optional -sx|-ix.
    #[arg(long, value_name = "SCHEME")]
    mutex: Option<String>,
    /// Wall-clock limit in seconds [default: $BSP_TIMEOUT_S or 1200].
    #[arg(long, value_name = "SECS")]
    timeout: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite file: one run per line, `PROBLEM SPEC [WEIGHT] [TIMEOUT_S]`.
    #[arg(value_name = "SUITE")]
    suite: PathBuf,
    /// Search direction for every row.
    #[arg(long, value_enum, default_value_t = Dir::Regress)]
    dir: Dir,
    /// Worker threads; each row runs in its own formula store.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Fraction of worlds sampled into graph substrates, in (0, 1].
    #[arg(long, value_name = "FLOAT", default_value_t = 1.0)]
    frac: f64,
    /// RNG seed for world sampling [default: $BSP_SEED or 0].
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Mutex scheme override applied to every row's spec.
    #[arg(long, value_name = "SCHEME")]
    mutex: Option<String>,
}

#[derive(Args)]
struct SnapArgs {
    #[command(flatten)]
    problem: ProblemSel,
    /// Direction the values are measured in.
    #[arg(long, value_enum, default_value_t = Dir::Regress)]
    dir: Dir,
    /// Belief state to evaluate, as formula text
    /// [default: the goal in regression, the initial belief in progression].
    #[arg(long, value_name = "FORMULA")]
    bs: Option<String>,
    /// Fraction of worlds sampled into graph substrates, in (0, 1].
    #[arg(long, value_name = "FLOAT", default_value_t = 1.0)]
    frac: f64,
    /// RNG seed for world sampling [default: $BSP_SEED or 0].
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Reachable-belief cap for the exact h* oracle; `h* ?` above it.
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    cap: usize,
}

/// Parse argv and run; the binary's whole behavior. Returns the exit code.
pub fn run_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { 0 } else { 3 };
        }
    };
    let r = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Hsnapshot(a) => cmd_hsnapshot(a),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn env_seed() -> u64 {
    std::env::var("BSP_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

fn env_timeout_s() -> f64 {
    std::env::var("BSP_TIMEOUT_S").ok().and_then(|s| s.parse().ok()).unwrap_or(1200.0)
}

/// Parse a spec string and, if given, replace its mutex scheme. The
/// command line only exposes same-world and intersection pairing.
/// Returns the spec and its canonical printed form.
fn apply_mutex(spec: &str, mutex: &Option<String>) -> Result<(HeuristicSpec, String)> {
    let mut parsed: HeuristicSpec = spec.parse()?;
    if let Some(m) = mutex {
        let scheme: MutexScheme = m.parse()?;
        if scheme.worlds == WorldMode::Cross {
            return Err(Error::Invalid(format!(
                "--mutex {m}: cross-world pairing is not exposed on the command line (use -sx or -ix)"
            )));
        }
        parsed.scheme = scheme;
        parsed.validate()?;
    }
    Ok((parsed, parsed.to_string()))
}

// ---------------------------------------------------------------------------
// One run, and its machine-readable summary
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    Unsat,
    Timeout,
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "OK",
            RunStatus::Unsat => "UNSAT",
            RunStatus::Timeout => "TO",
            RunStatus::Error => "ERR",
        }
    }

    fn parse(s: &str) -> Option<RunStatus> {
        Some(match s {
            "OK" => RunStatus::Ok,
            "UNSAT" => RunStatus::Unsat,
            "TO" => RunStatus::Timeout,
            "ERR" => RunStatus::Error,
            _ => return None,
        })
    }
}

/// Everything one run reports; the source of both the `STATS` line and
/// a bench CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsLine {
    pub problem: String,
    pub spec: String,
    pub status: RunStatus,
    /// Longest root-to-leaf action count of the plan; absent unless solved.
    pub plan_len: Option<usize>,
    pub expanded: u64,
    pub generated: u64,
    pub heuristic_ms: u128,
    pub total_ms: u128,
}

/// Final stdout line of `solve`; `parse_stats_line` inverts it.
pub fn format_stats_line(l: &StatsLine) -> String {
    let plan_len = l.plan_len.map_or_else(|| "-".to_string(), |n| n.to_string());
    format!(
        "STATS problem={} spec={} status={} plan_len={} expanded={} generated={} heuristic_ms={} total_ms={}",
        l.problem,
        l.spec,
        l.status.as_str(),
        plan_len,
        l.expanded,
        l.generated,
        l.heuristic_ms,
        l.total_ms
    )
}

/// Parse a `STATS` line back into its fields; `None` if the line is not
/// one or any field is malformed.
pub fn parse_stats_line(line: &str) -> Option<StatsLine> {
    let rest = line.trim_end().strip_prefix("STATS ")?;
    let mut problem = None;
    let mut spec = None;
    let mut status = None;
    let mut plan_len: Option<Option<usize>> = None;
    let mut expanded = None;
    let mut generated = None;
    let mut heuristic_ms = None;
    let mut total_ms = None;
    for tok in rest.split_whitespace() {
        let (k, v) = tok.split_once('=')?;
        match k {
            "problem" => problem = Some(v.to_string()),
            "spec" => spec = Some(v.to_string()),
            "status" => status = Some(RunStatus::parse(v)?),
            "plan_len" => {
                plan_len = Some(if v == "-" { None } else { Some(v.parse().ok()?) })
            }
            "expanded" => expanded = Some(v.parse().ok()?),
            "generated" => generated = Some(v.parse().ok()?),
            "heuristic_ms" => heuristic_ms = Some(v.parse().ok()?),
            "total_ms" => total_ms = Some(v.parse().ok()?),
            _ => return None,
        }
    }
    Some(StatsLine {
        problem: problem?,
        spec: spec?,
        status: status?,
        plan_len: plan_len?,
        expanded: expanded?,
        generated: generated?,
        heuristic_ms: heuristic_ms?,
        total_ms: total_ms?,
    })
}

pub const CSV_HEADER: &str = "problem,spec,total_ms,heuristic_ms,expanded,plan_len,status";

/// One bench CSV row; `plan_len` is empty unless the run solved.
pub fn csv_row(l: &StatsLine) -> String {
    let plan_len = l.plan_len.map_or_else(String::new, |n| n.to_string());
    format!(
        "{},{},{},{},{},{},{}",
        l.problem,
        l.spec,
        l.total_ms,
        l.heuristic_ms,
        l.expanded,
        plan_len,
        l.status.as_str()
    )
}

/// Run one search and validate any plan it returns. A plan that fails
/// validation is a planner bug and is reported as an error, never as OK.
#[allow(clippy::too_many_arguments)]
fn run_one(
    store: &mut Store,
    problem: &Problem,
    label: (&str, &str),
    dir: Direction,
    spec: HeuristicSpec,
    weight: f64,
    frac: f64,
    seed: u64,
    timeout_s: f64,
) -> Result<(StatsLine, Option<Plan>)> {
    let mut eval = Evaluator::new(problem, dir, spec)?.with_sampling(frac, seed);
    let deadline = if timeout_s.is_finite() && timeout_s > 0.0 {
        Some(Instant::now() + Duration::from_secs_f64(timeout_s))
    } else {
        None
    };
    let t0 = Instant::now();
    let result = match dir {
        Direction::Regression => astar_regress(store, problem, &mut eval, weight, deadline)?,
        Direction::Progression => aostar_progress(store, problem, &mut eval, weight, deadline)?,
    };
    let total = t0.elapsed();
    let (status, plan_len, plan) = match result.outcome {
        Outcome::Solved(plan) => {
            let report = validate(store, problem, &plan)?;
            if !report.valid {
                return Err(Error::Invalid(format!(
                    "plan failed validation: {}",
                    report.failures.first().map(String::as_str).unwrap_or("no witness")
                )));
            }
            (RunStatus::Ok, Some(plan.max_path_len()), Some(plan))
        }
        Outcome::Unsolvable => (RunStatus::Unsat, None, None),
        Outcome::Timeout => (RunStatus::Timeout, None, None),
    };
    Ok((
        StatsLine {
            problem: label.0.to_string(),
            spec: label.1.to_string(),
            status,
            plan_len,
            expanded: result.stats.expanded,
            generated: result.stats.generated,
            heuristic_ms: result.stats.heuristic_nanos / 1_000_000,
            total_ms: total.as_millis(),
        },
        plan,
    ))
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    let label = a.problem.label();
    let (mut store, problem) = a.problem.load()?;
    let (spec, spec_label) = apply_mutex(&a.heuristic, &a.mutex)?;
    let seed = a.seed.unwrap_or_else(env_seed);
    let timeout = a.timeout.unwrap_or_else(env_timeout_s);
    let (line, plan) = run_one(
        &mut store,
        &problem,
        (&label, &spec_label),
        a.dir.into(),
        spec,
        a.weight,
        a.frac,
        seed,
        timeout,
    )?;
    if let Some(plan) = &plan {
        print!("{}", plan.render(&mut store, &problem)?);
    }
    println!("{}", format_stats_line(&line));
    Ok(match line.status {
        RunStatus::Ok => 0,
        RunStatus::Unsat => 1,
        RunStatus::Timeout => 2,
        RunStatus::Error => 3,
    })
}

// ---------------------------------------------------------------------------
// Benchmark suites
// ---------------------------------------------------------------------------

/// One suite-file row. `problem` is a generator name or (when it contains
/// `/` or ends in `.bsp`) a file path; paths may not contain spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub problem: String,
    pub spec: String,
    pub weight: f64,
    pub timeout_s: f64,
}

/// Parse a suite file: one row per line, `PROBLEM SPEC [WEIGHT] [TIMEOUT_S]`,
/// `#` starts a comment. Weight defaults to 5, timeout to the environment
/// default.
pub fn parse_suite(text: &str) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ln = i as u32 + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 4 {
            return Err(Error::Syntax {
                line: ln,
                col: 1,
                msg: format!(
                    "suite row is `PROBLEM SPEC [WEIGHT] [TIMEOUT_S]`, got {} fields",
                    toks.len()
                ),
            });
        }
        let num = |tok: &str, what: &str| -> Result<f64> {
            tok.parse().map_err(|_| Error::Syntax {
                line: ln,
                col: 1,
                msg: format!("bad {what} `{tok}`"),
            })
        };
        let weight = if toks.len() > 2 { num(toks[2], "weight")? } else { 5.0 };
        let timeout_s = if toks.len() > 3 { num(toks[3], "timeout")? } else { env_timeout_s() };
        rows.push(SuiteRow {
            problem: toks[0].to_string(),
            spec: toks[1].to_string(),
            weight,
            timeout_s,
        });
    }
    Ok(rows)
}

fn load_problem_token(tok: &str) -> Result<(Store, Problem)> {
    if tok.contains('/') || tok.ends_with(".bsp") {
        parse_problem(&fs::read_to_string(tok)?)
    } else {
        gen_by_name(tok)
    }
}

fn bench_row(
    row: &SuiteRow,
    dir: Direction,
    frac: f64,
    seed: u64,
    mutex: &Option<String>,
) -> StatsLine {
    let go = || -> Result<StatsLine> {
        let (mut store, problem) = load_problem_token(&row.problem)?;
        let (spec, spec_label) = apply_mutex(&row.spec, mutex)?;
        let (line, _plan) = run_one(
            &mut store,
            &problem,
            (&row.problem, &spec_label),
            dir,
            spec,
            row.weight,
            frac,
            seed,
            row.timeout_s,
        )?;
        Ok(line)
    };
    go().unwrap_or_else(|e| {
        eprintln!("bench row `{} {}`: {e}", row.problem, row.spec);
        StatsLine {
            problem: row.problem.clone(),
            spec: row.spec.clone(),
            status: RunStatus::Error,
            plan_len: None,
            expanded: 0,
            generated: 0,
            heuristic_ms: 0,
            total_ms: 0,
        }
    })
}

/// Run every suite row and return results in suite order. Each row gets
/// its own formula store, so rows are independent; with `jobs > 1` they
/// run on that many worker threads. A failing row becomes an ERR line
/// and never stops the suite.
pub fn run_suite(
    rows: &[SuiteRow],
    dir: Direction,
    jobs: usize,
    frac: f64,
    seed: u64,
    mutex: &Option<String>,
) -> Vec<StatsLine> {
    let n = rows.len();
    let results: Mutex<Vec<Option<StatsLine>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(n.max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let line = bench_row(&rows[i], dir, frac, seed, mutex);
                results.lock().unwrap()[i] = Some(line);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every row ran")).collect()
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let rows = parse_suite(&fs::read_to_string(&a.suite)?)?;
    let seed = a.seed.unwrap_or_else(env_seed);
    let lines = run_suite(&rows, a.dir.into(), a.jobs, a.frac, seed, &a.mutex);
    println!("{CSV_HEADER}");
    for l in &lines {
        println!("{}", csv_row(l));
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// Heuristic snapshot
// ---------------------------------------------------------------------------

/// The specs the snapshot table reports, covering every substrate and
/// extraction kind (plus the labelled level heuristic under full mutexes,
/// whose value moves when the mutexes do).
pub const SNAPSHOT_SPECS: &[&str] = &[
    "zero",
    "card",
    "sg:max",
    "sg:sum",
    "sg:level",
    "sg:rp",
    "mg:max:max",
    "mg:sum:sum",
    "mg:level:max",
    "mg:rp:max",
    "mg:rp:sum",
    "mg:rpu",
    "lug:max",
    "lug:sum",
    "lug:level",
    "lug:level:fx",
    "lug:rp",
];

/// Evaluate every snapshot spec at `bs` and return `(spec, value)` rows.
pub fn snapshot_table(
    store: &mut Store,
    problem: &Problem,
    dir: Direction,
    bs: Formula,
    frac: f64,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let mut rows = Vec::with_capacity(SNAPSHOT_SPECS.len());
    for name in SNAPSHOT_SPECS {
        let spec: HeuristicSpec = name.parse()?;
        let mut eval = Evaluator::new(problem, dir, spec)?.with_sampling(frac, seed);
        let v = eval.evaluate(store, bs)?;
        rows.push((name.to_string(), v));
    }
    Ok(rows)
}

/// Integral values print bare, infinities as `inf`.
pub fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

fn cmd_hsnapshot(a: SnapArgs) -> Result<i32> {
    let (mut store, problem) = a.problem.load()?;
    let dir: Direction = a.dir.into();
    let bs = match &a.bs {
        Some(text) => store.parse_formula(text)?,
        None => match dir {
            Direction::Regression => problem.goal,
            Direction::Progression => problem.init,
        },
    };
    let seed = a.seed.unwrap_or_else(env_seed);
    for (name, v) in snapshot_table(&mut store, &problem, dir, bs, a.frac, seed)? {
        println!("{name} {}", fmt_value(v));
    }
    // h* is exact cost-to-go, which the forward oracle gives for any
    // progression belief but only for the goal side of a regression.
    let hstar = match dir {
        Direction::Regression if bs == problem.goal => {
            Some(bfs_oracle(&mut store, &problem, a.cap))
        }
        Direction::Progression => Some(bfs_oracle_from(&mut store, &problem, bs, a.cap)),
        _ => None,
    };
    if let Some(r) = hstar {
        match r {
            Ok(Some(v)) => println!("h* {v}"),
            Ok(None) => println!("h* inf"),
            Err(Error::CapExceeded(_)) => println!("h* ?"),
            Err(e) => return Err(e),
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_bt, gen_cbtc};

    #[test]
    fn stats_lines_round_trip() {
        let solved = StatsLine {
            problem: "btc:2".into(),
            spec: "lug:rp:fx-ix".into(),
            status: RunStatus::Ok,
            plan_len: Some(3),
            expanded: 4,
            generated: 9,
            heuristic_ms: 12,
            total_ms: 15,
        };
        let timed_out = StatsLine {
            problem: "domains/btcs.bsp".into(),
            spec: "zero".into(),
            status: RunStatus::Timeout,
            plan_len: None,
            expanded: 100,
            generated: 250,
            heuristic_ms: 0,
            total_ms: 30000,
        };
        for l in [&solved, &timed_out] {
            assert_eq!(parse_stats_line(&format_stats_line(l)).as_ref(), Some(l));
        }
        assert_eq!(
            csv_row(&solved),
            "btc:2,lug:rp:fx-ix,15,12,4,3,OK"
        );
        assert_eq!(
            csv_row(&timed_out),
            "domains/btcs.bsp,zero,30000,0,100,,TO"
        );
        assert!(parse_stats_line("DunkP1").is_none());
        assert!(parse_stats_line("STATS problem=x spec=y").is_none());
        assert!(parse_stats_line("STATS bogus=1").is_none());
    }

    #[test]
    fn suite_rows_parse_with_defaults_and_comments() {
        let text = "# a comment\n\nbt:2 card\nbtc:2 lug:rp 1 30 # trailing\n";
        let rows = parse_suite(text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], SuiteRow {
            problem: "bt:2".into(),
            spec: "card".into(),
            weight: 5.0,
            timeout_s: 1200.0,
        });
        assert_eq!(rows[1], SuiteRow {
            problem: "btc:2".into(),
            spec: "lug:rp".into(),
            weight: 1.0,
            timeout_s: 30.0,
        });
        assert!(parse_suite("bt:2\n").is_err());
        assert!(parse_suite("bt:2 card five\n").is_err());
        assert!(parse_suite("bt:2 card 5 30 extra\n").is_err());
    }

    #[test]
    fn suites_run_in_order_and_survive_bad_rows() {
        let rows = parse_suite("bt:2 card\nbtc:2 zero\nnosuch:1 zero\nbt:2 sg:rp:sum\n").unwrap();
        let key = |ls: &[StatsLine]| -> Vec<(String, RunStatus, Option<usize>, u64)> {
            ls.iter().map(|l| (l.problem.clone(), l.status, l.plan_len, l.expanded)).collect()
        };
        let seq = run_suite(&rows, Direction::Regression, 1, 1.0, 0, &None);
        assert_eq!(seq.len(), 4);
        assert_eq!(seq[0].status, RunStatus::Ok);
        assert_eq!(seq[0].plan_len, Some(2));
        assert_eq!(seq[1].status, RunStatus::Ok);
        assert_eq!(seq[1].plan_len, Some(3));
        assert_eq!(seq[2].status, RunStatus::Error);
        assert_eq!(seq[2].plan_len, None);
        assert_eq!(seq[3].status, RunStatus::Error);
        // Parallel run: identical rows in identical order.
        let par = run_suite(&rows, Direction::Regression, 3, 1.0, 0, &None);
        assert_eq!(key(&seq), key(&par));
    }

    #[test]
    fn snapshot_matches_the_worked_goal_table() {
        let (mut store, problem) = gen_cbtc().unwrap();
        let rows =
            snapshot_table(&mut store, &problem, Direction::Regression, problem.goal, 1.0, 0)
                .unwrap();
        let get = |name: &str| -> f64 {
            rows.iter().find(|(n, _)| n == name).map(|(_, v)| *v).unwrap()
        };
        assert_eq!(get("card"), 4.0);
        assert_eq!(get("sg:rp"), 2.0);
        assert_eq!(get("mg:rp:max"), 2.0);
        assert_eq!(get("mg:rp:sum"), 4.0);
        assert_eq!(get("mg:rpu"), 3.0);
        assert_eq!(get("lug:rp"), 3.0);
        assert_eq!(get("lug:level"), 2.0);
        assert_eq!(get("lug:level:fx"), 3.0);
        assert_eq!(bfs_oracle(&mut store, &problem, 10_000).unwrap(), Some(5));
    }

    #[test]
    fn snapshot_progression_pins_the_greedy_cover_value() {
        let (mut store, problem) = gen_bt(3).unwrap();
        let rows =
            snapshot_table(&mut store, &problem, Direction::Progression, problem.init, 1.0, 0)
                .unwrap();
        let get = |name: &str| -> f64 {
            rows.iter().find(|(n, _)| n == name).map(|(_, v)| *v).unwrap()
        };
        assert_eq!(get("lug:rp"), 3.0);
        assert_eq!(get("mg:rpu"), 3.0);
        assert_eq!(
            bfs_oracle_from(&mut store, &problem, problem.init, 10_000).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn mutex_flag_overrides_and_rejects() {
        assert_eq!(apply_mutex("lug:rp", &Some("fx-ix".into())).unwrap().1, "lug:rp:fx-ix");
        assert_eq!(apply_mutex("sg:max", &Some("fx".into())).unwrap().1, "sg:max:fx");
        assert_eq!(apply_mutex("zero", &Some("nx".into())).unwrap().1, "zero");
        assert!(apply_mutex("lug:rp", &Some("fx-cross".into())).is_err());
        assert!(apply_mutex("zero", &Some("stx".into())).is_err());
        assert!(apply_mutex("sg:rp:sum", &None).is_err());
        assert!(apply_mutex("sg:max", &Some("fx-ix".into())).is_err());
    }

    #[test]
    fn values_format_for_people() {
        assert_eq!(fmt_value(0.0), "0");
        assert_eq!(fmt_value(5.0), "5");
        assert_eq!(fmt_value(2.5), "2.500");
        assert_eq!(fmt_value(f64::INFINITY), "inf");
    }
}
