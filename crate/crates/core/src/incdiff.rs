//! Incremental insertion of a difference edge with potential repair.
//!
//! Given a valid potential for the graph, adding an edge `u -> v` only forces
//! potentials down along vertices reachable from `v`. Those are settled in
//! order of their (negative) decrease; if `u` itself would have to decrease,
//! the new edge closes a negative cycle.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::graph::{ConstraintGraph, InsertResult, Potential};
use crate::model::{DiffEdge, SignedVertex};

/// A committed insertion, with enough information to undo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub edge: DiffEdge,
    pub insert: InsertResult,
    /// Vertices whose potential decreased, with their previous value.
    pub changed: Vec<(SignedVertex, i64)>,
}

impl Applied {
    /// Restores graph and potential to their state before the insertion.
    /// Multiple `Applied` values must be undone in reverse order.
    pub fn undo(self, g: &mut ConstraintGraph, pi: &mut Potential) {
        for (v, old) in self.changed {
            pi.set(v, old);
        }
        g.undo_insert(self.edge, self.insert);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncOutcome {
    NewPotential(Applied),
    /// The edge closes a negative cycle. `cycle` starts with the new edge.
    Unsat { cycle: Vec<DiffEdge> },
}

impl IncOutcome {
    pub fn is_unsat(&self) -> bool {
        matches!(self, IncOutcome::Unsat { .. })
    }
}

#[derive(Copy, Clone)]
struct Pending {
    gamma: i64,
    /// Predecessor edge `(from, weight)`; `None` for the head of the new edge.
    pred: Option<(SignedVertex, i64)>,
}

/// Adds `e` to `g` and repairs `pi` in place.
///
/// On success `pi` is valid for the extended graph. On `Unsat`, `g` and `pi`
/// are left exactly as they were.
pub fn inc_con_diff(g: &mut ConstraintGraph, pi: &mut Potential, e: DiffEdge) -> IncOutcome {
    let insert = g.insert_or_tighten(e);
    pi.ensure_len(g.vertex_count());
    let mut applied = Applied {
        edge: e,
        insert,
        changed: Vec::new(),
    };
    if insert == InsertResult::Dominated {
        return IncOutcome::NewPotential(applied);
    }
    let (u, v) = (e.from, e.to);
    let start = pi.reduced_cost(u, v, e.weight);
    if start >= 0 {
        return IncOutcome::NewPotential(applied);
    }

    let mut pending: HashMap<SignedVertex, Pending> = HashMap::new();
    let mut settled: HashSet<SignedVertex> = HashSet::new();
    let mut heap = BinaryHeap::new();
    pending.insert(v, Pending { gamma: start, pred: None });
    heap.push(Reverse((start, v)));

    while let Some(Reverse((gamma, s))) = heap.pop() {
        if settled.contains(&s) || pending[&s].gamma != gamma {
            continue;
        }
        let old = pi.get(s);
        let new = old + gamma;
        pi.set(s, new);
        settled.insert(s);
        applied.changed.push((s, old));

        let out: Vec<_> = g.out_edges(s).collect();
        for (t, w) in out {
            if settled.contains(&t) {
                continue;
            }
            let cand = new + w - pi.get(t);
            let cur = pending.get(&t).map_or(0, |p| p.gamma);
            if cand < cur {
                pending.insert(
                    t,
                    Pending {
                        gamma: cand,
                        pred: Some((s, w)),
                    },
                );
                if t == u {
                    let cycle = witness(e, &pending);
                    applied.undo(g, pi);
                    return IncOutcome::Unsat { cycle };
                }
                heap.push(Reverse((cand, t)));
            }
        }
    }
    IncOutcome::NewPotential(applied)
}

fn witness(e: DiffEdge, pending: &HashMap<SignedVertex, Pending>) -> Vec<DiffEdge> {
    let mut path = Vec::new();
    let mut cur = e.from;
    while let Some((p, w)) = pending[&cur].pred {
        path.push(DiffEdge::new(p, cur, w));
        cur = p;
    }
    debug_assert_eq!(cur, e.to);
    path.push(e);
    path.reverse();
    path
}
