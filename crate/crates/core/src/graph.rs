//! The constraint graph over signed vertices: edge store, potentials,
//! Bellman-Ford, reduced-cost Dijkstra and strongly connected components.

use std::cmp::{Ordering, Reverse};
use radix_heap::RadixHeapMap;
use std::fmt;
use std::ops::Add;

use crate::model::{DiffEdge, SignedVertex, VarTable};

/// An integer or `+inf`. Addition saturates at `+inf`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Dist {
    Finite(i64),
    Infinite,
}

impl Dist {
    pub fn finite(self) -> Option<i64> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// `floor(self / 2)`, rounding toward negative infinity.
    pub fn half_floor(self) -> Dist {
        match self {
            Dist::Finite(d) => Dist::Finite(d.div_euclid(2)),
            Dist::Infinite => Dist::Infinite,
        }
    }

    /// True if `self <= bound` for a finite bound.
    pub fn at_most(self, bound: i64) -> bool {
        matches!(self, Dist::Finite(d) if d <= bound)
    }
}

impl Default for Dist {
    fn default() -> Self {
        Dist::Infinite
    }
}

impl From<i64> for Dist {
    fn from(d: i64) -> Self {
        Dist::Finite(d)
    }
}

impl Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }
}

impl Add<i64> for Dist {
    type Output = Dist;

    fn add(self, rhs: i64) -> Dist {
        self + Dist::Finite(rhs)
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => a.cmp(b),
            (Dist::Finite(_), Dist::Infinite) => Ordering::Less,
            (Dist::Infinite, Dist::Finite(_)) => Ordering::Greater,
            (Dist::Infinite, Dist::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => f.write_str("+inf"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum InsertResult {
    Added,
    Tightened(i64),
    Dominated,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Edge {
    from: u32,
    to: u32,
    weight: i64,
}

/// Weighted directed graph with at most one edge per ordered vertex pair.
///
/// Parallel insertions keep the minimum weight. Edges are stored once and
/// referenced from both the out- and in-adjacency lists; a pair is found by
/// scanning the shorter of the two lists.
#[derive(Clone, Debug, Default)]
pub struct ConstraintGraph {
    edges: Vec<Edge>,
    out: Vec<Vec<u32>>,
    inc: Vec<Vec<u32>>,
}

impl ConstraintGraph {
    /// A graph over `x+`/`x-` for `num_vars` variables.
    pub fn new(num_vars: usize) -> Self {
        let mut g = ConstraintGraph::default();
        g.ensure_vars(num_vars);
        g
    }

    pub fn ensure_vars(&mut self, num_vars: usize) {
        let n = num_vars * 2;
        if self.out.len() < n {
            self.out.resize_with(n, Vec::new);
            self.inc.resize_with(n, Vec::new);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn num_vars(&self) -> usize {
        self.out.len() / 2
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = SignedVertex> {
        (0..self.out.len()).map(SignedVertex::from_index)
    }

    pub fn edges(&self) -> impl Iterator<Item = DiffEdge> + '_ {
        self.edges.iter().map(to_diff)
    }

    pub fn weight(&self, from: SignedVertex, to: SignedVertex) -> Option<i64> {
        if from.index().max(to.index()) >= self.out.len() {
            return None;
        }
        self.find(from.index(), to.index()).map(|id| self.edges[id as usize].weight)
    }

    fn find(&self, from: usize, to: usize) -> Option<u32> {
        let (out, inc) = (&self.out[from], &self.inc[to]);
        if out.len() <= inc.len() {
            out.iter().copied().find(|&id| self.edges[id as usize].to as usize == to)
        } else {
            inc.iter().copied().find(|&id| self.edges[id as usize].from as usize == from)
        }
    }

    pub fn out_edges(&self, v: SignedVertex) -> impl Iterator<Item = (SignedVertex, i64)> + '_ {
        self.out[v.index()].iter().map(move |&id| {
            let e = &self.edges[id as usize];
            (SignedVertex::from_index(e.to as usize), e.weight)
        })
    }

    pub fn in_edges(&self, v: SignedVertex) -> impl Iterator<Item = (SignedVertex, i64)> + '_ {
        self.inc[v.index()].iter().map(move |&id| {
            let e = &self.edges[id as usize];
            (SignedVertex::from_index(e.from as usize), e.weight)
        })
    }

    /// Inserts `e`, or lowers the weight of the existing edge on the same pair.
    pub fn insert_or_tighten(&mut self, e: DiffEdge) -> InsertResult {
        assert_ne!(e.from, e.to, "self-loops are not representable");
        self.ensure_vars(e.from.var().index().max(e.to.var().index()) + 1);
        if let Some(id) = self.find(e.from.index(), e.to.index()) {
            let stored = &mut self.edges[id as usize];
            if stored.weight <= e.weight {
                return InsertResult::Dominated;
            }
            let old = stored.weight;
            stored.weight = e.weight;
            return InsertResult::Tightened(old);
        }
        let id = self.edges.len() as u32;
        self.edges.push(Edge {
            from: e.from.index() as u32,
            to: e.to.index() as u32,
            weight: e.weight,
        });
        self.out[e.from.index()].push(id);
        self.inc[e.to.index()].push(id);
        InsertResult::Added
    }

    /// Reverts an [`insert_or_tighten`](Self::insert_or_tighten).
    ///
    /// Undos must be applied in reverse insertion order: an `Added` edge has
    /// to be the most recently added one.
    pub fn undo_insert(&mut self, e: DiffEdge, result: InsertResult) {
        match result {
            InsertResult::Dominated => {}
            InsertResult::Tightened(old) => {
                let id = self.find(e.from.index(), e.to.index()).expect("undo of unknown edge");
                self.edges[id as usize].weight = old;
            }
            InsertResult::Added => {
                let id = self.find(e.from.index(), e.to.index()).expect("undo of unknown edge");
                assert_eq!(id as usize, self.edges.len() - 1, "undo out of order");
                self.edges.pop();
                let popped_out = self.out[e.from.index()].pop();
                let popped_in = self.inc[e.to.index()].pop();
                debug_assert_eq!(popped_out, Some(id));
                debug_assert_eq!(popped_in, Some(id));
            }
        }
    }

    /// Line-per-edge text dump, `u -> v : w`.
    pub fn dump(&self, vars: &VarTable) -> String {
        let name = |v: SignedVertex| {
            let s = if v.coef() > 0 { '+' } else { '-' };
            if v.var().index() < vars.len() {
                format!("{}{}", vars.name(v.var()), s)
            } else {
                v.to_string()
            }
        };
        let mut out = String::new();
        for e in self.edges() {
            out.push_str(&format!("{} -> {} : {}\n", name(e.from), name(e.to), e.weight));
        }
        out
    }
}

fn to_diff(e: &Edge) -> DiffEdge {
    DiffEdge::new(
        SignedVertex::from_index(e.from as usize),
        SignedVertex::from_index(e.to as usize),
        e.weight,
    )
}

/// Vertex labelling `pi`; valid for a graph when `pi(u) + d - pi(v) >= 0` on
/// every edge `(u, v, d)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Potential(Vec<i64>);

impl Potential {
    pub fn zero(vertex_count: usize) -> Self {
        Potential(vec![0; vertex_count])
    }

    pub fn from_vec(values: Vec<i64>) -> Self {
        Potential(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ensure_len(&mut self, vertex_count: usize) {
        if self.0.len() < vertex_count {
            self.0.resize(vertex_count, 0);
        }
    }

    #[inline]
    pub fn get(&self, v: SignedVertex) -> i64 {
        self.0.get(v.index()).copied().unwrap_or(0)
    }

    #[inline]
    pub fn set(&mut self, v: SignedVertex, value: i64) {
        self.0[v.index()] = value;
    }

    #[inline]
    pub fn reduced_cost(&self, from: SignedVertex, to: SignedVertex, weight: i64) -> i64 {
        self.get(from) + weight - self.get(to)
    }

    /// Full edge scan; returns the first edge with negative reduced cost.
    pub fn violation(&self, g: &ConstraintGraph) -> Option<DiffEdge> {
        g.edges().find(|e| self.reduced_cost(e.from, e.to, e.weight) < 0)
    }

    pub fn is_valid_for(&self, g: &ConstraintGraph) -> bool {
        self.violation(g).is_none()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BellmanFord {
    Valid(Potential),
    /// Edges of a cycle with negative total weight, in path order.
    NegativeCycle(Vec<DiffEdge>),
}

/// Bellman-Ford from a virtual source joined to every vertex with weight 0.
pub fn bellman_ford(g: &ConstraintGraph) -> BellmanFord {
    let n = g.vertex_count();
    let mut dist = vec![0i64; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut last_relaxed = None;
    for _ in 0..n.max(1) {
        last_relaxed = None;
        for (id, e) in g.edges.iter().enumerate() {
            let cand = dist[e.from as usize] + e.weight;
            if cand < dist[e.to as usize] {
                dist[e.to as usize] = cand;
                parent[e.to as usize] = Some(id as u32);
                last_relaxed = Some(e.to as usize);
            }
        }
        if last_relaxed.is_none() {
            break;
        }
    }
    let Some(mut v) = last_relaxed else {
        return BellmanFord::Valid(Potential(dist));
    };
    // Still relaxing after n rounds: walking n parents lands on a cycle.
    for _ in 0..n {
        v = g.edges[parent[v].expect("relaxed vertex has a parent") as usize].from as usize;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let e = &g.edges[parent[v].unwrap() as usize];
        cycle.push(to_diff(e));
        v = e.from as usize;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    BellmanFord::NegativeCycle(cycle)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Distances from the source to every vertex.
    Forward,
    /// Distances from every vertex to the source.
    Backward,
}

/// Shortest-path distances from (or to) a source, `+inf` when unreachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap(Vec<Dist>);

impl DistanceMap {
    #[inline]
    pub fn get(&self, v: SignedVertex) -> Dist {
        self.0.get(v.index()).copied().unwrap_or(Dist::Infinite)
    }

    pub fn as_slice(&self) -> &[Dist] {
        &self.0
    }
}

/// Dijkstra over the reduced-cost graph, translated back to original weights.
///
/// Panics if `pi` gives some edge a negative reduced cost.
pub fn dijkstra(g: &ConstraintGraph, pi: &Potential, src: SignedVertex, dir: Direction) -> DistanceMap {
    DistanceMap(run_dijkstra(g, pi, src, dir, None, i64::MAX))
}

/// `wSP(from, to)`, stopping as soon as `to` is settled.
pub fn shortest_path(g: &ConstraintGraph, pi: &Potential, from: SignedVertex, to: SignedVertex) -> Dist {
    if from == to {
        return Dist::Finite(0);
    }
    run_dijkstra(g, pi, from, Direction::Forward, Some(to), i64::MAX)[to.index()]
}

/// Whether `wSP(from, to) <= bound`. The search never leaves the ball of
/// vertices that could still lie on such a path.
pub fn path_within(g: &ConstraintGraph, pi: &Potential, from: SignedVertex, to: SignedVertex, bound: i64) -> bool {
    if from == to {
        return bound >= 0;
    }
    let n = g.vertex_count();
    if from.index() >= n || to.index() >= n {
        return false;
    }
    let limit = bound - pi.get(to) + pi.get(from);
    if limit < 0 {
        return false;
    }
    run_dijkstra(g, pi, from, Direction::Forward, Some(to), limit)[to.index()].is_finite()
}

fn run_dijkstra(
    g: &ConstraintGraph,
    pi: &Potential,
    src: SignedVertex,
    dir: Direction,
    target: Option<SignedVertex>,
    cutoff: i64,
) -> Vec<Dist> {
    let n = g.vertex_count();
    let mut reduced = vec![i64::MAX; n];
    let mut done = vec![false; n];
    // keys are popped in non-decreasing order, so a monotone queue suffices
    let mut heap: RadixHeapMap<Reverse<i64>, u32> = RadixHeapMap::new();
    if src.index() >= n {
        let mut out = vec![Dist::Infinite; n];
        out.extend(std::iter::repeat(Dist::Infinite).take(src.index() + 1 - n));
        out[src.index()] = Dist::Finite(0);
        return out;
    }
    reduced[src.index()] = 0;
    heap.push(Reverse(0), src.index() as u32);
    while let Some((Reverse(d), v)) = heap.pop() {
        let v = v as usize;
        if done[v] || d > reduced[v] {
            continue;
        }
        done[v] = true;
        if target.is_some_and(|t| t.index() == v) {
            break;
        }
        let adj = match dir {
            Direction::Forward => &g.out[v],
            Direction::Backward => &g.inc[v],
        };
        for &id in adj {
            let e = &g.edges[id as usize];
            let (next, rc) = match dir {
                Direction::Forward => (e.to as usize, pi.0[v] + e.weight - pi.0[e.to as usize]),
                Direction::Backward => (e.from as usize, pi.0[e.from as usize] + e.weight - pi.0[v]),
            };
            assert!(rc >= 0, "potential is not valid: negative reduced cost on {:?}", to_diff(e));
            let cand = d + rc;
            if cand < reduced[next] && cand <= cutoff {
                debug_assert!(!done[next], "settled vertex reopened");
                reduced[next] = cand;
                heap.push(Reverse(cand), next as u32);
            }
        }
    }
    let ps = pi.0[src.index()];
    reduced
        .iter()
        .enumerate()
        .map(|(v, &r)| {
            if r == i64::MAX {
                Dist::Infinite
            } else {
                // rc(path x ~> y) = pi(x) + w - pi(y)
                Dist::Finite(match dir {
                    Direction::Forward => r - ps + pi.0[v],
                    Direction::Backward => r - pi.0[v] + ps,
                })
            }
        })
        .collect()
}

/// Edges with zero reduced cost under `pi`.
pub fn tight_edges(g: &ConstraintGraph, pi: &Potential) -> Vec<DiffEdge> {
    g.edges().filter(|e| pi.reduced_cost(e.from, e.to, e.weight) == 0).collect()
}

/// Strongly connected components of the subgraph formed by `edges`.
///
/// Returns a component id per vertex index (iterative Tarjan).
pub fn scc(vertex_count: usize, edges: &[DiffEdge]) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for e in edges {
        adj[e.from.index()].push(e.to.index());
    }

    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; vertex_count];
    let mut low = vec![0usize; vertex_count];
    let mut on_stack = vec![false; vertex_count];
    let mut comp = vec![UNVISITED; vertex_count];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..vertex_count {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, child)) = call.last() {
            if child == 0 && index[v] == UNVISITED {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(child) {
                call.last_mut().unwrap().1 += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{UtvpiConstraint, Var};

    fn v(i: usize) -> SignedVertex {
        SignedVertex::from_index(i)
    }

    fn graph_of(cs: &[UtvpiConstraint], num_vars: usize) -> ConstraintGraph {
        let mut g = ConstraintGraph::new(num_vars);
        for c in cs {
            for e in c.edges().unwrap() {
                g.insert_or_tighten(e);
            }
        }
        g
    }

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

    fn phi_prime() -> Vec<UtvpiConstraint> {
        let mut cs = phi();
        cs.push(UtvpiConstraint::binary(X.minus(), Z.plus(), 3));
        cs
    }

    #[test]
    fn insert_policy() {
        let mut g = ConstraintGraph::new(2);
        let e = |w| DiffEdge::new(Y.plus(), X.plus(), w);
        assert_eq!(g.insert_or_tighten(e(2)), InsertResult::Added);
        assert_eq!(g.insert_or_tighten(e(5)), InsertResult::Dominated);
        assert_eq!(g.insert_or_tighten(e(1)), InsertResult::Tightened(2));
        assert_eq!(g.weight(Y.plus(), X.plus()), Some(1));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.in_edges(X.plus()).collect::<Vec<_>>(), vec![(Y.plus(), 1)]);
        assert_eq!(g.out_edges(Y.plus()).collect::<Vec<_>>(), vec![(X.plus(), 1)]);
    }

    #[test]
    fn undo_restores_graph() {
        let mut g = ConstraintGraph::new(2);
        let a = DiffEdge::new(v(0), v(1), 4);
        let b = DiffEdge::new(v(1), v(2), 4);
        let ra = g.insert_or_tighten(a);
        let rb = g.insert_or_tighten(b);
        let tighter = DiffEdge::new(v(0), v(1), 1);
        let rt = g.insert_or_tighten(tighter);
        g.undo_insert(tighter, rt);
        assert_eq!(g.weight(v(0), v(1)), Some(4));
        g.undo_insert(b, rb);
        g.undo_insert(a, ra);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.out_edges(v(0)).count(), 0);
        assert_eq!(g.in_edges(v(2)).count(), 0);
    }

    #[test]
    fn example_potential_is_valid_and_all_tight() {
        let g = graph_of(&phi_prime(), 3);
        assert_eq!(g.edge_count(), 8);
        let mut pi = Potential::zero(6);
        for (vx, val) in [
            (Y.plus(), 0),
            (X.plus(), 2),
            (Z.plus(), 5),
            (Y.minus(), 3),
            (X.minus(), 1),
            (Z.minus(), -2),
        ] {
            pi.set(vx, val);
        }
        assert!(pi.is_valid_for(&g));
        assert_eq!(tight_edges(&g, &pi).len(), 8);
        let comp = scc(6, &tight_edges(&g, &pi));
        assert!(comp.iter().all(|&c| c == comp[0]));
    }

    #[test]
    fn bellman_ford_on_example_graph() {
        let g = graph_of(&phi_prime(), 3);
        match bellman_ford(&g) {
            BellmanFord::Valid(pi) => assert!(pi.is_valid_for(&g)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(bellman_ford(&ConstraintGraph::new(0)), BellmanFord::Valid(Potential::zero(0)));
        assert_eq!(bellman_ford(&ConstraintGraph::new(3)), BellmanFord::Valid(Potential::zero(6)));
    }

    #[test]
    fn bellman_ford_finds_negative_cycle() {
        let mut g = ConstraintGraph::new(1);
        g.insert_or_tighten(DiffEdge::new(v(0), v(1), -1));
        g.insert_or_tighten(DiffEdge::new(v(1), v(0), 0));
        let BellmanFord::NegativeCycle(cycle) = bellman_ford(&g) else {
            panic!("expected a cycle");
        };
        assert_eq!(cycle.iter().map(|e| e.weight).sum::<i64>(), -1);
        assert_cycle(&cycle);
    }

    fn assert_cycle(cycle: &[DiffEdge]) {
        for w in cycle.windows(2) {
            assert_eq!(w[0].to, w[1].from);
        }
        assert_eq!(cycle.last().unwrap().to, cycle[0].from);
    }

    #[test]
    fn dijkstra_example_distances() {
        let g = graph_of(&phi(), 3);
        let BellmanFord::Valid(pi) = bellman_ford(&g) else { panic!() };
        let fwd = dijkstra(&g, &pi, Z.plus(), Direction::Forward);
        assert_eq!(fwd.get(Z.minus()), Dist::Finite(-7));
        assert_eq!(fwd.get(Z.plus()), Dist::Finite(0));
        let bwd = dijkstra(&g, &pi, X.plus(), Direction::Backward);
        assert_eq!(bwd.get(X.minus()), Dist::Finite(1));
        assert_eq!(bwd.get(X.plus()), Dist::Finite(0));
        assert_eq!(shortest_path(&g, &pi, Z.plus(), Z.minus()), Dist::Finite(-7));
        assert_eq!(shortest_path(&g, &pi, X.plus(), X.minus()), Dist::Infinite);
    }

    #[test]
    #[should_panic(expected = "potential is not valid")]
    fn dijkstra_rejects_invalid_potential() {
        let mut g = ConstraintGraph::new(1);
        g.insert_or_tighten(DiffEdge::new(v(0), v(1), -3));
        dijkstra(&g, &Potential::zero(2), v(0), Direction::Forward);
    }

    #[test]
    fn tight_edges_trivial() {
        let mut g = ConstraintGraph::new(1);
        assert!(tight_edges(&g, &Potential::zero(2)).is_empty());
        g.insert_or_tighten(DiffEdge::new(v(0), v(1), 1));
        assert!(tight_edges(&g, &Potential::zero(2)).is_empty());
    }

    #[test]
    fn scc_trivial() {
        let comp = scc(3, &[]);
        assert_ne!(comp[0], comp[1]);
        assert_ne!(comp[1], comp[2]);
        let comp = scc(2, &[DiffEdge::new(v(0), v(1), 0)]);
        assert_ne!(comp[0], comp[1]);
        let comp = scc(4, &[DiffEdge::new(v(0), v(1), 0), DiffEdge::new(v(1), v(0), 0), DiffEdge::new(v(2), v(3), 0)]);
        assert_eq!(comp[0], comp[1]);
        assert_ne!(comp[2], comp[3]);
        assert_ne!(comp[0], comp[2]);
    }

    #[test]
    fn dump_format() {
        let mut t = VarTable::new();
        t.intern("x");
        t.intern("y");
        let g = graph_of(&[UtvpiConstraint::binary(X.plus(), Y.minus(), 2)], 2);
        assert_eq!(g.dump(&t), "y+ -> x+ : 2\nx- -> y- : 2\n");
    }

    #[test]
    fn dist_arithmetic() {
        assert_eq!(Dist::Infinite + 3, Dist::Infinite);
        assert_eq!(Dist::Finite(-7).half_floor(), Dist::Finite(-4));
        assert_eq!(Dist::Finite(1).half_floor(), Dist::Finite(0));
        assert!(Dist::Finite(i64::MAX) < Dist::Infinite);
        assert!(Dist::Finite(2).at_most(2));
        assert!(!Dist::Infinite.at_most(i64::MAX));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn edges(n: usize) -> impl Strategy<Value = Vec<DiffEdge>> {
            prop::collection::vec((0..n, 0..n, -5i64..12), 0..25).prop_map(|es| {
                es.into_iter()
                    .filter(|(a, b, _)| a != b)
                    .map(|(a, b, w)| DiffEdge::new(v(a), v(b), w))
                    .collect()
            })
        }

        /// Plain Bellman-Ford from a single source; None on a reachable negative cycle.
        fn sssp(n: usize, es: &[DiffEdge], src: usize) -> Option<Vec<Option<i64>>> {
            let mut d: Vec<Option<i64>> = vec![None; n];
            d[src] = Some(0);
            for round in 0..=n {
                let mut changed = false;
                for e in es {
                    if let Some(du) = d[e.from.index()] {
                        let c = du + e.weight;
                        if d[e.to.index()].is_none_or(|dv| c < dv) {
                            d[e.to.index()] = Some(c);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    return Some(d);
                }
                if round == n {
                    return None;
                }
            }
            Some(d)
        }

        proptest! {
            #[test]
            fn stored_weight_is_min_of_inserted(es in edges(6)) {
                let mut g = ConstraintGraph::new(3);
                let mut best: std::collections::HashMap<(usize, usize), i64> = std::collections::HashMap::new();
                for e in &es {
                    g.insert_or_tighten(*e);
                    let slot = best.entry((e.from.index(), e.to.index())).or_insert(e.weight);
                    *slot = (*slot).min(e.weight);
                }
                prop_assert_eq!(g.edge_count(), best.len());
                for ((a, b), w) in best {
                    prop_assert_eq!(g.weight(v(a), v(b)), Some(w));
                }
            }

            #[test]
            fn bellman_ford_and_dijkstra_agree_with_plain_sssp(es in edges(6), src in 0usize..6) {
                let mut g = ConstraintGraph::new(3);
                for e in &es {
                    g.insert_or_tighten(*e);
                }
                let stored: Vec<DiffEdge> = g.edges().collect();
                match bellman_ford(&g) {
                    BellmanFord::Valid(pi) => {
                        prop_assert!(pi.is_valid_for(&g));
                        let expect = sssp(6, &stored, src).unwrap();
                        let fwd = dijkstra(&g, &pi, v(src), Direction::Forward);
                        for t in 0..6 {
                            prop_assert_eq!(fwd.get(v(t)).finite(), expect[t]);
                            prop_assert_eq!(shortest_path(&g, &pi, v(src), v(t)).finite(), expect[t]);
                        }
                        let bwd = dijkstra(&g, &pi, v(src), Direction::Backward);
                        for t in 0..6 {
                            let expect_t = sssp(6, &stored, t).unwrap();
                            prop_assert_eq!(bwd.get(v(t)).finite(), expect_t[src]);
                        }
                    }
                    BellmanFord::NegativeCycle(cycle) => {
                        prop_assert!(cycle.iter().map(|e| e.weight).sum::<i64>() < 0);
                        for w in cycle.windows(2) {
                            prop_assert_eq!(w[0].to, w[1].from);
                        }
                        prop_assert_eq!(cycle.last().unwrap().to, cycle[0].from);
                    }
                }
            }

            #[test]
            fn scc_matches_mutual_reachability(es in edges(6)) {
                let comp = scc(6, &es);
                let mut reach = [[false; 6]; 6];
                for (i, row) in reach.iter_mut().enumerate() {
                    row[i] = true;
                }
                for e in &es {
                    reach[e.from.index()][e.to.index()] = true;
                }
                for k in 0..6 {
                    for i in 0..6 {
                        for j in 0..6 {
                            if reach[i][k] && reach[k][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
                for i in 0..6 {
                    for j in 0..6 {
                        prop_assert_eq!(comp[i] == comp[j], reach[i][j] && reach[j][i]);
                    }
                }
            }
        }
    }
}
