//! Non-incremental integer satisfiability: negative-cycle detection on the
//! constraint graph, then a parity test on zero-weight cycles.

use crate::graph::{bellman_ford, scc, tight_edges, BellmanFord, ConstraintGraph, Potential};
use crate::incdiff::{inc_con_diff, IncOutcome};
use crate::model::{normalize, DiffEdge, NormalizeOutcome, SignedVertex, UtvpiConstraint};
use crate::Verdict;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatVerdict {
    Sat(Potential),
    /// Negative cycle in the constraint graph. Empty for a constant
    /// contradiction `0 <= d`, `d < 0`.
    UnsatQ(Vec<DiffEdge>),
    /// `u` and `-u` share a zero-weight cycle with `pi(-u) - pi(u)` odd.
    UnsatZ(SignedVertex),
}

impl SatVerdict {
    pub fn verdict(&self) -> Verdict {
        match self {
            SatVerdict::Sat(_) => Verdict::Sat,
            SatVerdict::UnsatQ(_) => Verdict::UnsatQ,
            SatVerdict::UnsatZ(_) => Verdict::UnsatZ,
        }
    }
}

/// Builds the constraint graph, or `None` if some constraint is a constant
/// contradiction.
pub fn build_graph(constraints: &[UtvpiConstraint]) -> Option<ConstraintGraph> {
    let num_vars = constraints
        .iter()
        .flat_map(|c| c.vars())
        .map(|v| v.index() + 1)
        .max()
        .unwrap_or(0);
    let mut g = ConstraintGraph::new(num_vars);
    for c in constraints {
        match normalize(*c) {
            NormalizeOutcome::Normal(n) => {
                for e in n.edges().expect("normalized constraint has literals") {
                    g.insert_or_tighten(e);
                }
            }
            NormalizeOutcome::Tautology => {}
            NormalizeOutcome::Contradiction => return None,
        }
    }
    Some(g)
}

/// Lowest-indexed vertex `u` with `-u` in its tight strongly connected
/// component and `pi(-u) - pi(u)` odd.
pub fn parity_witness(g: &ConstraintGraph, pi: &Potential) -> Option<SignedVertex> {
    let comp = scc(g.vertex_count(), &tight_edges(g, pi));
    g.vertices()
        .find(|&u| comp[u.index()] == comp[(-u).index()] && (pi.get(-u) - pi.get(u)).rem_euclid(2) == 1)
}

pub fn lamu_check(constraints: &[UtvpiConstraint]) -> SatVerdict {
    let Some(g) = build_graph(constraints) else {
        return SatVerdict::UnsatQ(Vec::new());
    };
    match bellman_ford(&g) {
        BellmanFord::NegativeCycle(cycle) => SatVerdict::UnsatQ(cycle),
        BellmanFord::Valid(pi) => match parity_witness(&g, &pi) {
            Some(u) => SatVerdict::UnsatZ(u),
            None => SatVerdict::Sat(pi),
        },
    }
}

/// The incremental variant: potentials are repaired edge by edge, and the
/// parity phase reruns over the whole graph after every constraint.
///
/// Once a constraint is rejected the checker stays unsatisfiable.
#[derive(Clone, Debug, Default)]
pub struct IncLamu {
    graph: ConstraintGraph,
    pi: Potential,
    failed: Option<Verdict>,
}

impl IncLamu {
    pub fn new(num_vars: usize) -> Self {
        IncLamu {
            graph: ConstraintGraph::new(num_vars),
            pi: Potential::zero(num_vars * 2),
            failed: None,
        }
    }

    pub fn add(&mut self, c: &UtvpiConstraint) -> Verdict {
        if let Some(v) = self.failed {
            return v;
        }
        let verdict = self.add_inner(c);
        if verdict != Verdict::Sat {
            self.failed = Some(verdict);
        }
        verdict
    }

    fn add_inner(&mut self, c: &UtvpiConstraint) -> Verdict {
        let n = match normalize(*c) {
            NormalizeOutcome::Normal(n) => n,
            NormalizeOutcome::Tautology => return Verdict::Sat,
            NormalizeOutcome::Contradiction => return Verdict::UnsatQ,
        };
        for e in n.edges().expect("normalized constraint has literals") {
            if let IncOutcome::Unsat { .. } = inc_con_diff(&mut self.graph, &mut self.pi, e) {
                return Verdict::UnsatQ;
            }
        }
        match parity_witness(&self.graph, &self.pi) {
            Some(_) => Verdict::UnsatZ,
            None => Verdict::Sat,
        }
    }

    pub fn graph(&self) -> &ConstraintGraph {
        &self.graph
    }

    pub fn potential(&self) -> &Potential {
        &self.pi
    }
}
