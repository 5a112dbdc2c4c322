//! Incremental satisfiability and implication checking.
//!
//! The solver keeps the constraint graph, a valid potential, and the bounds
//! function `rho(u) = floor(wSP(u, -u) / 2)`. `rho(x-)` is the tightest upper
//! bound on `x` and `rho(x+)` the tightest upper bound on `-x`. Adding a
//! constraint costs two Dijkstra runs over the reduced-cost graph: every new
//! shortest path must cross the first edge `(u, v, d)` of the constraint (or
//! its counter-edge, which yields a mirrored path of equal weight), so
//! `wSP(x, y)` can only have dropped to `delta_to_u(x) + d + delta_from_v(y)`.
//!
//! Watched constraints are checked against the same two distance maps and
//! fire on the first assertion that makes them implied.

use thiserror::Error;

use crate::graph::{dijkstra, path_within, ConstraintGraph, Direction, Dist, DistanceMap, InsertResult, Potential};
use crate::incdiff::{inc_con_diff, Applied, IncOutcome};
use crate::model::{normalize, DiffEdge, NormalizeOutcome, SignedVertex, UtvpiConstraint, Var, MAX_BOUND};
use crate::Verdict;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AddOutcome<T> {
    /// The constraint was committed; carries the tags of watched constraints
    /// that became implied, in registration order.
    Sat(Vec<T>),
    /// Rejected: negative cycle through the new edges (empty for `0 <= d`,
    /// `d < 0`). The state is unchanged.
    UnsatQ(Vec<DiffEdge>),
    /// Rejected: rational but not integer feasible; `rho(v) + rho(-v) < 0`
    /// for the witness. The state is unchanged.
    UnsatZ(SignedVertex),
}

impl<T> AddOutcome<T> {
    pub fn verdict(&self) -> Verdict {
        match self {
            AddOutcome::Sat(_) => Verdict::Sat,
            AddOutcome::UnsatQ(_) => Verdict::UnsatQ,
            AddOutcome::UnsatZ(_) => Verdict::UnsatZ,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WatchStatus {
    AlreadyImplied,
    Watching,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("bound {0} exceeds the supported magnitude 2^40")]
    BoundOutOfRange(i64),
}

#[derive(Clone, Debug)]
struct Watch<T> {
    constraint: UtvpiConstraint,
    edge: DiffEdge,
    tag: T,
}

/// Incremental UTVPI solver state. `T` is the client tag attached to watched
/// constraints.
#[derive(Clone, Debug)]
pub struct SolverState<T = u64> {
    graph: ConstraintGraph,
    pi: Potential,
    rho: Vec<Dist>,
    watch: Vec<Watch<T>>,
}

impl<T: Clone> Default for SolverState<T> {
    fn default() -> Self {
        Self::new(0)
    }
}

impl<T: Clone> SolverState<T> {
    /// Empty state over variables `0..num_vars`.
    pub fn new(num_vars: usize) -> Self {
        SolverState {
            graph: ConstraintGraph::new(num_vars),
            pi: Potential::zero(num_vars * 2),
            rho: vec![Dist::Infinite; num_vars * 2],
            watch: Vec::new(),
        }
    }

    /// Empty state sized for the given variables.
    pub fn init(vars: &[Var]) -> Self {
        Self::new(vars.iter().map(|v| v.index() + 1).max().unwrap_or(0))
    }

    /// Grows the state to cover variables `0..num_vars`.
    pub fn ensure_vars(&mut self, num_vars: usize) {
        self.graph.ensure_vars(num_vars);
        self.pi.ensure_len(num_vars * 2);
        if self.rho.len() < num_vars * 2 {
            self.rho.resize(num_vars * 2, Dist::Infinite);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.graph.num_vars()
    }

    pub fn graph(&self) -> &ConstraintGraph {
        &self.graph
    }

    pub fn potential(&self) -> &Potential {
        &self.pi
    }

    /// `rho(u) = floor(wSP(u, -u) / 2)`.
    pub fn rho(&self, u: SignedVertex) -> Dist {
        self.rho.get(u.index()).copied().unwrap_or(Dist::Infinite)
    }

    /// Tightest implied `x <= d`.
    pub fn upper_bound(&self, x: Var) -> Option<i64> {
        self.rho(x.minus()).finite()
    }

    /// Tightest implied `x >= d`.
    pub fn lower_bound(&self, x: Var) -> Option<i64> {
        self.rho(x.plus()).finite().map(|d| -d)
    }

    /// Constraints still being watched, with their tags.
    pub fn watched(&self) -> impl Iterator<Item = (&UtvpiConstraint, &T)> {
        self.watch.iter().map(|w| (&w.constraint, &w.tag))
    }

    /// Asserts `c`. On `UnsatQ`/`UnsatZ` nothing is committed and the state
    /// keeps answering queries for the previous assertions.
    pub fn add_constraint(&mut self, c: &UtvpiConstraint) -> Result<AddOutcome<T>, SolverError> {
        if c.bound.abs() > MAX_BOUND {
            return Err(SolverError::BoundOutOfRange(c.bound));
        }
        let c = match normalize(*c) {
            NormalizeOutcome::Normal(n) => n,
            NormalizeOutcome::Tautology => return Ok(AddOutcome::Sat(Vec::new())),
            NormalizeOutcome::Contradiction => return Ok(AddOutcome::UnsatQ(Vec::new())),
        };
        let max_var = c.vars().map(|v| v.index() + 1).max().unwrap_or(0);
        self.ensure_vars(max_var);

        // An implied constraint leaves the integer solutions, hence rho and
        // every watch, unchanged; only the graph and potential need it.
        let implied = self.check_implied(&c);

        let edges = c.edges().expect("normalized constraint has literals");
        let mut applied: Vec<Applied> = Vec::with_capacity(edges.len());
        for &e in &edges {
            match inc_con_diff(&mut self.graph, &mut self.pi, e) {
                IncOutcome::NewPotential(a) => applied.push(a),
                IncOutcome::Unsat { cycle } => {
                    self.rollback(applied);
                    return Ok(AddOutcome::UnsatQ(cycle));
                }
            }
        }
        if implied || applied.iter().all(|a| a.insert == InsertResult::Dominated) {
            return Ok(AddOutcome::Sat(Vec::new()));
        }

        let DiffEdge { from: u, to: v, weight: d } = edges[0];
        let to_u = dijkstra(&self.graph, &self.pi, u, Direction::Backward);
        let from_v = dijkstra(&self.graph, &self.pi, v, Direction::Forward);
        let via = |x: SignedVertex, y: SignedVertex| to_u.get(x) + d + from_v.get(y);

        let mut updates: Vec<(SignedVertex, Dist)> = Vec::new();
        for x in self.graph.vertices() {
            let cand = via(x, -x).half_floor();
            if cand < self.rho(x) {
                updates.push((x, cand));
            }
        }
        let mut rho = self.rho.clone();
        for &(x, r) in &updates {
            rho[x.index()] = r;
        }
        let infeasible = updates
            .iter()
            .map(|&(x, _)| x)
            .filter(|&x| (rho[x.index()] + rho[(-x).index()]).at_most(-1))
            .min();
        if let Some(x) = infeasible {
            // report the lower-indexed vertex of the pair
            let x = x.min(-x);
            self.rollback(applied);
            return Ok(AddOutcome::UnsatZ(x));
        }
        self.rho = rho;

        Ok(AddOutcome::Sat(self.filter_watches(&to_u, d, &from_v)))
    }

    fn filter_watches(&mut self, to_u: &DistanceMap, d: i64, from_v: &DistanceMap) -> Vec<T> {
        let mut fired = Vec::new();
        let rho = &self.rho;
        self.watch.retain(|w| {
            let DiffEdge { from: x, to: y, weight: bound } = w.edge;
            let implied = (to_u.get(x) + d + from_v.get(y)).at_most(bound)
                || (to_u.get(-y) + d + from_v.get(-x)).at_most(bound)
                || (rho[x.index()] + rho[(-y).index()]).at_most(bound);
            if implied {
                fired.push(w.tag.clone());
            }
            !implied
        });
        fired
    }

    fn rollback(&mut self, applied: Vec<Applied>) {
        for a in applied.into_iter().rev() {
            a.undo(&mut self.graph, &mut self.pi);
        }
    }

    /// Whether the asserted constraints entail `c`.
    pub fn check_implied(&self, c: &UtvpiConstraint) -> bool {
        match normalize(*c) {
            NormalizeOutcome::Tautology => true,
            NormalizeOutcome::Contradiction => false,
            // the counter-edge is implied exactly when the first edge is
            NormalizeOutcome::Normal(n) => n.first_edge().map(|e| self.edge_implied(e)).unwrap_or(false),
        }
    }

    fn edge_implied(&self, e: DiffEdge) -> bool {
        if (self.rho(e.from) + self.rho(-e.to)).at_most(e.weight) {
            return true;
        }
        if e.from.index() >= self.graph.vertex_count() || e.to.index() >= self.graph.vertex_count() {
            return false;
        }
        path_within(&self.graph, &self.pi, e.from, e.to, e.weight)
    }

    /// Registers `c` for implication tracking under `tag`.
    ///
    /// Constraints implied by the current assertions are reported at once and
    /// not stored. A constant contradiction is never implied by a satisfiable
    /// state, so it is accepted but can never fire.
    pub fn register_watch(&mut self, c: &UtvpiConstraint, tag: T) -> WatchStatus {
        let n = match normalize(*c) {
            NormalizeOutcome::Tautology => return WatchStatus::AlreadyImplied,
            NormalizeOutcome::Contradiction => return WatchStatus::Watching,
            NormalizeOutcome::Normal(n) => n,
        };
        if self.check_implied(&n) {
            return WatchStatus::AlreadyImplied;
        }
        let edge = n.first_edge().expect("normalized constraint has literals");
        self.watch.push(Watch { constraint: n, edge, tag });
        WatchStatus::Watching
    }

    /// An integer assignment satisfying every asserted constraint.
    ///
    /// Variables are fixed one at a time to a value inside their current
    /// bounds; each fix is asserted on a scratch copy of the state.
    pub fn model(&self) -> Vec<i64> {
        let mut scratch: SolverState<()> = SolverState {
            graph: self.graph.clone(),
            pi: self.pi.clone(),
            rho: self.rho.clone(),
            watch: Vec::new(),
        };
        let mut values = Vec::with_capacity(self.num_vars());
        for i in 0..self.num_vars() {
            let x = Var(i as u32);
            let value = match (scratch.lower_bound(x), scratch.upper_bound(x)) {
                (Some(lo), _) => lo,
                (None, Some(hi)) => hi,
                (None, None) => 0,
            };
            for c in [UtvpiConstraint::unary(x.plus(), value), UtvpiConstraint::unary(x.minus(), -value)] {
                let out = scratch.add_constraint(&c).expect("bounds stay in range");
                assert_eq!(out.verdict(), Verdict::Sat, "fixing a variable inside its bounds must stay satisfiable");
            }
            values.push(value);
        }
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: Var = Var(0);
    const Y: Var = Var(1);
    const Z: Var = Var(2);

    fn phi() -> Vec<UtvpiConstraint> {
        vec![
            UtvpiConstraint::binary(X.plus(), Y.minus(), 2),
            UtvpiConstraint::binary(X.plus(), Y.plus(), -1),
            UtvpiConstraint::binary(X.minus(), Z.minus(), -4),
        ]
    }

    fn phi_state() -> SolverState<u64> {
        let mut s = SolverState::init(&[X, Y, Z]);
        for c in phi() {
            assert_eq!(s.add_constraint(&c).unwrap(), AddOutcome::Sat(vec![]));
        }
        s
    }

    #[test]
    fn init_states() {
        let s: SolverState = SolverState::init(&[X]);
        assert_eq!(s.rho(X.plus()), Dist::Infinite);
        assert_eq!(s.rho(X.minus()), Dist::Infinite);
        let s: SolverState = SolverState::init(&[]);
        assert_eq!(s.num_vars(), 0);
        assert!(s.check_implied(&UtvpiConstraint::constant(0)));
        assert_eq!(s.model(), Vec::<i64>::new());
    }

    #[test]
    fn example_bounds() {
        let s = phi_state();
        assert_eq!(s.rho(X.minus()), Dist::Finite(0));
        assert_eq!(s.rho(Z.plus()), Dist::Finite(-4));
        assert_eq!(s.rho(X.plus()), Dist::Infinite);
        assert_eq!(s.upper_bound(X), Some(0));
        assert_eq!(s.lower_bound(Z), Some(4));
    }

    #[test]
    fn example_integer_infeasibility_rolls_back() {
        let mut s = phi_state();
        let before = (s.graph.edges().collect::<Vec<_>>(), s.pi.clone(), s.rho.clone());
        let out = s.add_constraint(&UtvpiConstraint::binary(X.minus(), Z.plus(), 3)).unwrap();
        assert_eq!(out, AddOutcome::UnsatZ(X.plus()));
        assert_eq!((s.graph.edges().collect::<Vec<_>>(), s.pi.clone(), s.rho.clone()), before);
    }

    #[test]
    fn example_implications() {
        let s = phi_state();
        assert!(s.check_implied(&UtvpiConstraint::unary(Z.minus(), -3)));
        assert!(s.check_implied(&UtvpiConstraint::binary(Y.plus(), Z.minus(), 0)));
        assert!(s.check_implied(&UtvpiConstraint::unary(X.plus(), 0)));
        assert!(!s.check_implied(&UtvpiConstraint::unary(X.plus(), -1)));
        assert!(s.check_implied(&UtvpiConstraint::constant(0)));
        assert!(!s.check_implied(&UtvpiConstraint::constant(-1)));
    }

    #[test]
    fn watches_register_and_fire() {
        let mut s = phi_state();
        assert_eq!(s.register_watch(&UtvpiConstraint::unary(Z.minus(), -3), 1), WatchStatus::AlreadyImplied);
        assert_eq!(
            s.register_watch(&UtvpiConstraint::binary(Y.plus(), Z.minus(), 0), 2),
            WatchStatus::AlreadyImplied
        );

        let mut e: SolverState<u64> = SolverState::new(3);
        assert_eq!(e.register_watch(&UtvpiConstraint::unary(Y.plus(), 100), 7), WatchStatus::Watching);
        assert_eq!(e.register_watch(&UtvpiConstraint::unary(Z.minus(), -3), 8), WatchStatus::Watching);
        assert_eq!(e.register_watch(&UtvpiConstraint::unary(Z.minus(), -3), 9), WatchStatus::Watching);
        let cs = phi();
        assert_eq!(e.add_constraint(&cs[0]).unwrap(), AddOutcome::Sat(vec![]));
        assert_eq!(e.add_constraint(&cs[1]).unwrap(), AddOutcome::Sat(vec![]));
        assert_eq!(e.add_constraint(&cs[2]).unwrap(), AddOutcome::Sat(vec![8, 9]));
        assert_eq!(e.watched().count(), 1);
    }

    #[test]
    fn dominated_and_tautological_adds_change_nothing() {
        let mut s = phi_state();
        let rho = s.rho.clone();
        assert_eq!(s.add_constraint(&UtvpiConstraint::constant(3)).unwrap(), AddOutcome::Sat(vec![]));
        assert_eq!(
            s.add_constraint(&UtvpiConstraint::binary(X.plus(), Y.minus(), 9)).unwrap(),
            AddOutcome::Sat(vec![])
        );
        assert_eq!(s.rho, rho);
        assert_eq!(s.add_constraint(&UtvpiConstraint::constant(-3)).unwrap(), AddOutcome::UnsatQ(vec![]));
    }

    #[test]
    fn rational_infeasibility_reports_cycle() {
        let mut s: SolverState = SolverState::new(2);
        s.add_constraint(&UtvpiConstraint::binary(X.plus(), Y.minus(), 0)).unwrap();
        let out = s.add_constraint(&UtvpiConstraint::binary(Y.plus(), X.minus(), -1)).unwrap();
        let AddOutcome::UnsatQ(cycle) = out else { panic!("{out:?}") };
        assert!(cycle.iter().map(|e| e.weight).sum::<i64>() < 0);
        assert_eq!(s.graph.edge_count(), 2);
    }

    #[test]
    fn bound_range_is_checked() {
        let mut s: SolverState = SolverState::new(1);
        assert_eq!(
            s.add_constraint(&UtvpiConstraint::unary(X.plus(), MAX_BOUND + 1)),
            Err(SolverError::BoundOutOfRange(MAX_BOUND + 1))
        );
    }

    #[test]
    fn variables_grow_on_demand() {
        let mut s: SolverState = SolverState::new(0);
        s.add_constraint(&UtvpiConstraint::unary(Var(4).plus(), 3)).unwrap();
        assert_eq!(s.num_vars(), 5);
        assert_eq!(s.upper_bound(Var(4)), Some(3));
        assert!(!s.check_implied(&UtvpiConstraint::unary(Var(9).plus(), 3)));
    }

    #[test]
    fn model_satisfies_example() {
        let s = phi_state();
        let m = s.model();
        for c in phi() {
            assert!(c.satisfied_by(|v| m[v.index()]));
        }
    }
}
