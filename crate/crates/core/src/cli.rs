//! Drivers behind the command-line tool: checking a constraint file under
//! each solver, tracking implied queries, generating random instances and
//! timing the solvers against each other.

use std::collections::HashSet;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::{closure_implies, Closure};
use crate::lamu::{lamu_check, IncLamu};
use crate::model::{parse_constraints, ParseError, UtvpiConstraint, Var, VarTable};
use crate::scst::{AddOutcome, SolverState, WatchStatus};
use crate::Verdict;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid generator configuration: {0}")]
    Gen(String),
    #[error("invalid bench configuration: {0}")]
    BenchConfig(String),
    #[error("modes disagree: {0}")]
    Disagreement(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown mode '{0}'")]
    UnknownMode(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Scst,
    IncLamu,
    MLamu,
    Closure,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Scst, Mode::IncLamu, Mode::MLamu, Mode::Closure];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Scst => "scst",
            Mode::IncLamu => "inc-lamu",
            Mode::MLamu => "m-lamu",
            Mode::Closure => "closure",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::UnknownMode(s.to_owned()))
    }
}

/// Parses a comma-separated mode list such as `scst,m-lamu`.
pub fn parse_modes(list: &str) -> Result<Vec<Mode>, CliError> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Mode::from_str).collect()
}

/// Result of feeding constraints one at a time to a solver.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    /// Verdict after each asserted constraint; ends at the first rejection.
    pub outcomes: Vec<Verdict>,
    /// For each query, the assertion step after which it was implied
    /// (0 = before any assertion).
    pub implied_at: Vec<Option<usize>>,
    /// Wall-clock time per phase.
    pub phases: Vec<(String, Duration)>,
}

impl RunReport {
    pub fn verdict(&self) -> Verdict {
        self.outcomes.last().copied().unwrap_or(Verdict::Sat)
    }

    /// 1-based index of the rejected constraint.
    pub fn failed_at(&self) -> Option<usize> {
        match self.verdict() {
            Verdict::Sat => None,
            _ => Some(self.outcomes.len()),
        }
    }

    pub fn total_time(&self) -> Duration {
        self.phases.iter().map(|(_, d)| *d).sum()
    }

    /// `SAT` or `UNSAT-Z at constraint 4`.
    pub fn summary(&self) -> String {
        match self.failed_at() {
            None => self.verdict().to_string(),
            Some(k) => format!("{} at constraint {}", self.verdict(), k),
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.verdict())
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Sat => 0,
        Verdict::UnsatQ => 10,
        Verdict::UnsatZ => 11,
    }
}

/// Reads and parses a constraint file into `vars`.
pub fn read_constraints(path: &Path, vars: &mut VarTable) -> Result<Vec<UtvpiConstraint>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_constraints(&text, vars).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Asserts `constraints` in order with the given solver.
pub fn run_check(constraints: &[UtvpiConstraint], num_vars: usize, mode: Mode) -> RunReport {
    let start = Instant::now();
    let mut outcomes = Vec::with_capacity(constraints.len());
    let mut push = |v: Verdict| {
        outcomes.push(v);
        v == Verdict::Sat
    };
    match mode {
        Mode::Scst => {
            let mut s: SolverState<usize> = SolverState::new(num_vars);
            for c in constraints {
                let v = s.add_constraint(c).map(|o| o.verdict()).unwrap_or(Verdict::UnsatQ);
                if !push(v) {
                    break;
                }
            }
        }
        Mode::IncLamu => {
            let mut s = IncLamu::new(num_vars);
            for c in constraints {
                if !push(s.add(c)) {
                    break;
                }
            }
        }
        Mode::MLamu => {
            for k in 1..=constraints.len() {
                if !push(lamu_check(&constraints[..k]).verdict()) {
                    break;
                }
            }
        }
        Mode::Closure => {
            let mut q = Closure::transitive();
            let mut z = Closure::tightened();
            for c in constraints {
                let v = if !q.add(c) {
                    Verdict::UnsatQ
                } else if !z.add(c) {
                    Verdict::UnsatZ
                } else {
                    Verdict::Sat
                };
                if !push(v) {
                    break;
                }
            }
        }
    }
    RunReport {
        outcomes,
        implied_at: Vec::new(),
        phases: vec![("check".to_owned(), start.elapsed())],
    }
}

/// Runs every mode and fails unless all agree on the verdict class.
pub fn run_check_all(constraints: &[UtvpiConstraint], num_vars: usize) -> Result<Vec<(Mode, RunReport)>, CliError> {
    let reports: Vec<(Mode, RunReport)> =
        Mode::ALL.iter().map(|&m| (m, run_check(constraints, num_vars, m))).collect();
    let (first_mode, first) = &reports[0];
    for (m, r) in &reports[1..] {
        if r.outcomes != first.outcomes {
            return Err(CliError::Disagreement(format!(
                "{} says '{}', {} says '{}'",
                first_mode,
                first.summary(),
                m,
                r.summary()
            )));
        }
    }
    Ok(reports)
}

/// Tracks when each query becomes implied as `constraints` are asserted.
///
/// Only `Scst` and `Closure` answer implication questions; other modes fall
/// back to `Scst`.
pub fn run_implies(
    constraints: &[UtvpiConstraint],
    queries: &[UtvpiConstraint],
    num_vars: usize,
    mode: Mode,
) -> RunReport {
    let mut implied_at = vec![None; queries.len()];
    let mut outcomes = Vec::new();
    let start = Instant::now();
    if mode == Mode::Closure {
        let mut q = Closure::transitive();
        let mut z = Closure::tightened();
        let mark = |z: &Closure, step: usize, implied_at: &mut [Option<usize>]| {
            for (i, query) in queries.iter().enumerate() {
                if implied_at[i].is_none() && closure_implies(z.set(), query) {
                    implied_at[i] = Some(step);
                }
            }
        };
        mark(&z, 0, &mut implied_at);
        let register = start.elapsed();
        for (k, c) in constraints.iter().enumerate() {
            let v = if !q.add(c) {
                Verdict::UnsatQ
            } else if !z.add(c) {
                Verdict::UnsatZ
            } else {
                Verdict::Sat
            };
            outcomes.push(v);
            if v != Verdict::Sat {
                break;
            }
            mark(&z, k + 1, &mut implied_at);
        }
        return RunReport {
            outcomes,
            implied_at,
            phases: vec![("register".to_owned(), register), ("assert".to_owned(), start.elapsed() - register)],
        };
    }

    let mut s: SolverState<usize> = SolverState::new(num_vars);
    for (i, query) in queries.iter().enumerate() {
        if s.register_watch(query, i) == WatchStatus::AlreadyImplied {
            implied_at[i] = Some(0);
        }
    }
    let register = start.elapsed();
    for (k, c) in constraints.iter().enumerate() {
        let out = s.add_constraint(c).unwrap_or(AddOutcome::UnsatQ(Vec::new()));
        outcomes.push(out.verdict());
        match out {
            AddOutcome::Sat(fired) => {
                for i in fired {
                    implied_at[i] = Some(k + 1);
                }
            }
            _ => break,
        }
    }
    RunReport {
        outcomes,
        implied_at,
        phases: vec![("register".to_owned(), register), ("assert".to_owned(), start.elapsed() - register)],
    }
}

/// Random instance parameters. Bounds are drawn uniformly from `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(default = "default_lo")]
    pub lo: i64,
    #[serde(default = "default_hi")]
    pub hi: i64,
}

fn default_lo() -> i64 {
    -15
}

fn default_hi() -> i64 {
    100
}

impl GenConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        GenConfig {
            n,
            m,
            seed,
            lo: default_lo(),
            hi: default_hi(),
        }
    }

    /// Number of distinct (variable pair, sign pattern) slots.
    pub fn slots(&self) -> usize {
        4 * self.n * self.n.saturating_sub(1) / 2
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let err = |s: String| Err(CliError::Gen(s));
        if self.lo > self.hi {
            return err(format!("empty bound range {}..={}", self.lo, self.hi));
        }
        if self.n == 1 {
            return err("a single variable cannot appear in a two-variable constraint".into());
        }
        if self.m > self.slots() {
            return err(format!("m = {} exceeds the {} available slots for n = {}", self.m, self.slots(), self.n));
        }
        if self.m < self.n.div_ceil(2) {
            return err(format!("m = {} is too small to cover n = {} variables", self.m, self.n));
        }
        Ok(())
    }
}

fn var_names(n: usize) -> VarTable {
    let mut t = VarTable::new();
    for i in 0..n {
        t.intern(&format!("x{i}"));
    }
    t
}

/// Two-variable constraints on `x0..x{n-1}`: every variable appears, and no
/// variable pair repeats a sign pattern. Deterministic in `seed`.
pub fn generate(cfg: &GenConfig) -> Result<(VarTable, Vec<UtvpiConstraint>), CliError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let mut used: HashSet<(usize, usize, u8)> = HashSet::new();
    let mut slots: Vec<(usize, usize, u8)> = Vec::with_capacity(cfg.m);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut cover: Vec<(usize, usize)> = order.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    if n % 2 == 1 {
        let last = order[n - 1];
        let other = order[rng.gen_range(0..n - 1)];
        cover.push((last, other));
    }
    for (a, b) in cover {
        let slot = (a.min(b), a.max(b), rng.gen_range(0..4u8));
        used.insert(slot);
        slots.push(slot);
    }

    let remaining = cfg.m - slots.len();
    if remaining * 2 > cfg.slots() {
        let mut free: Vec<(usize, usize, u8)> = (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (0..4u8).map(move |p| (i, j, p))))
            .filter(|s| !used.contains(s))
            .collect();
        free.shuffle(&mut rng);
        slots.extend(free.into_iter().take(remaining));
    } else {
        while slots.len() < cfg.m {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let slot = (i.min(j), i.max(j), rng.gen_range(0..4u8));
            if used.insert(slot) {
                slots.push(slot);
            }
        }
    }
    slots.shuffle(&mut rng);

    let constraints = slots
        .into_iter()
        .map(|(i, j, p)| {
            let (x, y) = (Var(i as u32), Var(j as u32));
            let lx = if p & 1 == 0 { x.plus() } else { x.minus() };
            let ly = if p & 2 == 0 { y.plus() } else { y.minus() };
            UtvpiConstraint::binary(lx, ly, rng.gen_range(cfg.lo..=cfg.hi))
        })
        .collect();
    Ok((var_names(n), constraints))
}

/// Checks a generated instance against its configuration.
pub fn audit(cfg: &GenConfig, constraints: &[UtvpiConstraint]) -> Result<(), String> {
    if constraints.len() != cfg.m {
        return Err(format!("expected {} constraints, found {}", cfg.m, constraints.len()));
    }
    let mut seen_vars = HashSet::new();
    let mut seen_slots = HashSet::new();
    for c in constraints {
        let (Some(x), Some(y)) = (c.first, c.second) else {
            return Err(format!("'{c}' does not have two variables"));
        };
        if x.var() == y.var() || x.var() >= y.var() {
            return Err(format!("'{c}' is not canonical"));
        }
        if !(cfg.lo..=cfg.hi).contains(&c.bound) {
            return Err(format!("'{c}' has a bound outside {}..={}", cfg.lo, cfg.hi));
        }
        if !seen_slots.insert((x, y)) {
            return Err(format!("'{c}' repeats a sign pattern on its variable pair"));
        }
        seen_vars.insert(x.var());
        seen_vars.insert(y.var());
    }
    if seen_vars.len() != cfg.n {
        return Err(format!("only {} of {} variables appear", seen_vars.len(), cfg.n));
    }
    Ok(())
}

/// Renders constraints in the file format, one per line.
pub fn format_constraints(vars: &VarTable, constraints: &[UtvpiConstraint]) -> String {
    let mut out = String::new();
    for c in constraints {
        out.push_str(&c.display(vars).to_string());
        out.push('\n');
    }
    out
}

/// Instance classes for the benchmark harness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    #[serde(rename = "class")]
    pub classes: Vec<BenchClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchClass {
    pub name: String,
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_instances() -> usize {
    1
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::BenchConfig(e.to_string()))
    }
}

/// One row of the benchmark table: mean wall time over the instances of a
/// class that ended with `verdict` (or `all`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub class: String,
    pub n: usize,
    pub m: usize,
    pub mode: String,
    pub verdict: String,
    pub mean_ms: f64,
    pub stddev_ms: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Times each mode on every instance of every class. Each measurement
/// repeats the run `reps` times after one discarded warm-up run.
pub fn run_bench(cfg: &BenchConfig, modes: &[Mode], reps: usize) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    if reps == 0 || modes.is_empty() {
        return Ok(rows);
    }
    for class in &cfg.classes {
        // per mode: (verdict, per-instance mean time in ms)
        let mut samples: Vec<Vec<(Verdict, f64)>> = vec![Vec::new(); modes.len()];
        for i in 0..class.instances {
            let gen = GenConfig::new(class.n, class.m, class.seed.wrapping_add(i as u64));
            let (_, constraints) = generate(&gen)?;
            let mut reference: Option<(Mode, String)> = None;
            for (mi, &mode) in modes.iter().enumerate() {
                let warm = run_check(&constraints, class.n, mode);
                let summary = warm.summary();
                match &reference {
                    None => reference = Some((mode, summary)),
                    Some((rm, rs)) if *rs != summary => {
                        return Err(CliError::Disagreement(format!(
                            "{} instance {}: {} says '{}', {} says '{}'",
                            class.name, i, rm, rs, mode, summary
                        )))
                    }
                    Some(_) => {}
                }
                let times: Vec<f64> = (0..reps)
                    .map(|_| run_check(&constraints, class.n, mode).total_time().as_secs_f64() * 1e3)
                    .collect();
                samples[mi].push((warm.verdict(), mean_std(&times).0));
            }
        }
        for (mi, &mode) in modes.iter().enumerate() {
            let groups = [
                ("SAT", Some(Verdict::Sat)),
                ("UNSAT-Z", Some(Verdict::UnsatZ)),
                ("UNSAT-Q", Some(Verdict::UnsatQ)),
                ("all", None),
            ];
            for (label, filter) in groups {
                let xs: Vec<f64> = samples[mi]
                    .iter()
                    .filter(|(v, _)| filter.is_none_or(|f| f == *v))
                    .map(|&(_, t)| t)
                    .collect();
                if xs.is_empty() {
                    continue;
                }
                let (mean_ms, stddev_ms) = mean_std(&xs);
                rows.push(BenchRow {
                    class: class.name.clone(),
                    n: class.n,
                    m: class.m,
                    mode: mode.name().to_owned(),
                    verdict: label.to_owned(),
                    mean_ms,
                    stddev_ms,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// Fixed-width text rendering of the benchmark table.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<16} {:>6} {:>7} {:<9} {:<14} {:>12} {:>12}\n",
        "class", "n", "m", "mode", "verdict", "mean_ms", "stddev_ms"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<16} {:>6} {:>7} {:<9} {:<14} {:>12.3} {:>12.3}\n",
            r.class, r.n, r.m, r.mode, r.verdict, r.mean_ms, r.stddev_ms
        ));
    }
    out
}
