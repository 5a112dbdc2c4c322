//! Transitive and tightened transitive closure of a UTVPI constraint set.
//!
//! Slow and simple on purpose: this is the ground truth the graph-based
//! solvers are checked against. Constraints are stored as a map from their
//! literal multiset to the smallest bound seen. Two constraints compose when
//! one holds a literal `l` and the other `-l`; tightening turns `l + l <= d`
//! into `l <= floor(d/2)`.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::model::{normalize, NormalizeOutcome, SignedVertex, UtvpiConstraint};

/// Literal multiset of a closure constraint. `Two` is sorted and may repeat a
/// literal (`x + x <= d`); a literal and its negation never share a key.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosureKey {
    Empty,
    One(SignedVertex),
    Two(SignedVertex, SignedVertex),
}

impl ClosureKey {
    /// Builds a key, cancelling complementary literals.
    pub fn from_literals(lits: &[SignedVertex]) -> Option<ClosureKey> {
        let mut v: Vec<SignedVertex> = lits.to_vec();
        let mut i = 0;
        while i < v.len() {
            if let Some(j) = (i + 1..v.len()).find(|&j| v[j] == -v[i]) {
                v.remove(j);
                v.remove(i);
            } else {
                i += 1;
            }
        }
        v.sort();
        match v.as_slice() {
            [] => Some(ClosureKey::Empty),
            [a] => Some(ClosureKey::One(*a)),
            [a, b] => Some(ClosureKey::Two(*a, *b)),
            _ => None,
        }
    }

    pub fn of(c: &UtvpiConstraint) -> ClosureKey {
        let lits: Vec<SignedVertex> = c.literals().collect();
        ClosureKey::from_literals(&lits).expect("at most two literals")
    }

    pub fn literals(&self) -> Vec<SignedVertex> {
        match *self {
            ClosureKey::Empty => vec![],
            ClosureKey::One(a) => vec![a],
            ClosureKey::Two(a, b) => vec![a, b],
        }
    }
}

/// Minimal bound per key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureSet {
    bounds: HashMap<ClosureKey, i64>,
}

impl ClosureSet {
    pub fn get(&self, key: ClosureKey) -> Option<i64> {
        self.bounds.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClosureKey, i64)> + '_ {
        self.bounds.iter().map(|(&k, &d)| (k, d))
    }

    /// Whether some stored constraint on the same key has bound `<= c.bound`.
    pub fn contains(&self, c: &UtvpiConstraint) -> bool {
        self.get(ClosureKey::of(c)).is_some_and(|d| d <= c.bound)
    }

    /// Best single-variable bound `l <= d` for literal `l`.
    pub fn unary_bound(&self, l: SignedVertex) -> Option<i64> {
        self.get(ClosureKey::One(l))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureOutcome {
    Closure(ClosureSet),
    /// The closure contains `0 <= d` with `d < 0`.
    Unsat,
}

impl ClosureOutcome {
    pub fn is_unsat(&self) -> bool {
        matches!(self, ClosureOutcome::Unsat)
    }

    pub fn closure(&self) -> Option<&ClosureSet> {
        match self {
            ClosureOutcome::Closure(s) => Some(s),
            ClosureOutcome::Unsat => None,
        }
    }
}

/// Incrementally maintained closure. Each added constraint is composed with
/// everything derived so far until a fixpoint is reached.
#[derive(Clone, Debug)]
pub struct Closure {
    set: ClosureSet,
    by_literal: HashMap<SignedVertex, Vec<ClosureKey>>,
    tighten: bool,
    unsat: bool,
}

impl Closure {
    /// Closure under the transitive rule only.
    pub fn transitive() -> Self {
        Self::with_tightening(false)
    }

    /// Closure under the transitive and tightening rules.
    pub fn tightened() -> Self {
        Self::with_tightening(true)
    }

    fn with_tightening(tighten: bool) -> Self {
        Closure {
            set: ClosureSet::default(),
            by_literal: HashMap::new(),
            tighten,
            unsat: false,
        }
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    pub fn set(&self) -> &ClosureSet {
        &self.set
    }

    /// Adds `c` and saturates. Returns `false` once the set is unsatisfiable.
    pub fn add(&mut self, c: &UtvpiConstraint) -> bool {
        if self.unsat {
            return false;
        }
        let n = match normalize(*c) {
            NormalizeOutcome::Normal(n) => n,
            NormalizeOutcome::Tautology => return true,
            NormalizeOutcome::Contradiction => {
                self.unsat = true;
                return false;
            }
        };
        let mut queue = Worklist::default();
        self.insert(ClosureKey::of(&n), n.bound, &mut queue);
        while let Some(key) = queue.pop() {
            if self.unsat {
                return false;
            }
            let d = self.set.bounds[&key];
            let lits = key.literals();
            let mut derived = Vec::new();
            for (i, &l) in lits.iter().enumerate() {
                if i > 0 && lits[i - 1] == l {
                    continue;
                }
                let rest: Vec<SignedVertex> = lits.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                for &other in self.by_literal.get(&-l).map(Vec::as_slice).unwrap_or(&[]) {
                    let d2 = self.set.bounds[&other];
                    let mut other_lits = other.literals();
                    let pos = other_lits.iter().position(|&x| x == -l).unwrap();
                    other_lits.remove(pos);
                    let mut combined = rest.clone();
                    combined.extend(other_lits);
                    if let Some(k) = ClosureKey::from_literals(&combined) {
                        derived.push((k, d + d2));
                    }
                }
            }
            for (k, dk) in derived {
                self.insert(k, dk, &mut queue);
            }
        }
        !self.unsat
    }

    fn insert(&mut self, key: ClosureKey, d: i64, queue: &mut Worklist) {
        if key == ClosureKey::Empty && d < 0 {
            self.unsat = true;
        }
        match self.set.bounds.get(&key) {
            Some(&old) if old <= d => return,
            Some(_) => {}
            None => {
                let mut lits = key.literals();
                lits.dedup();
                for l in lits {
                    self.by_literal.entry(l).or_default().push(key);
                }
            }
        }
        self.set.bounds.insert(key, d);
        queue.push(key);
        if self.tighten {
            if let ClosureKey::Two(a, b) = key {
                if a == b {
                    self.insert(ClosureKey::One(a), d.div_euclid(2), queue);
                }
            }
        }
    }

    pub fn outcome(self) -> ClosureOutcome {
        if self.unsat {
            ClosureOutcome::Unsat
        } else {
            ClosureOutcome::Closure(self.set)
        }
    }
}

#[derive(Default)]
struct Worklist {
    queue: VecDeque<ClosureKey>,
    queued: HashSet<ClosureKey>,
}

impl Worklist {
    fn push(&mut self, key: ClosureKey) {
        if self.queued.insert(key) {
            self.queue.push_back(key);
        }
    }

    fn pop(&mut self) -> Option<ClosureKey> {
        let key = self.queue.pop_front()?;
        self.queued.remove(&key);
        Some(key)
    }
}

fn saturate(mut cl: Closure, constraints: &[UtvpiConstraint]) -> ClosureOutcome {
    for c in constraints {
        if !cl.add(c) {
            break;
        }
    }
    cl.outcome()
}

/// Transitive closure; `Unsat` iff a negative constant constraint is derived.
pub fn tc(constraints: &[UtvpiConstraint]) -> ClosureOutcome {
    saturate(Closure::transitive(), constraints)
}

/// Tightened transitive closure; `Unsat` iff the set has no integer solution.
pub fn ttc(constraints: &[UtvpiConstraint]) -> ClosureOutcome {
    saturate(Closure::tightened(), constraints)
}

/// Applies only the tightening rule to an existing set.
pub fn ti(s: &ClosureSet) -> ClosureSet {
    let mut out = s.clone();
    for (k, d) in s.iter() {
        if let ClosureKey::Two(a, b) = k {
            if a == b {
                let slot = out.bounds.entry(ClosureKey::One(a)).or_insert(i64::MAX);
                *slot = (*slot).min(d.div_euclid(2));
            }
        }
    }
    out
}

/// Whether a satisfiable tightened closure entails `c`: either the same
/// literal pair is bounded by at most `c.bound`, or both literals carry unary
/// bounds that sum to at most `c.bound`.
pub fn closure_implies(s: &ClosureSet, c: &UtvpiConstraint) -> bool {
    let n = match normalize(*c) {
        NormalizeOutcome::Tautology => return true,
        NormalizeOutcome::Contradiction => return false,
        NormalizeOutcome::Normal(n) => n,
    };
    if s.contains(&n) {
        return true;
    }
    match (n.first, n.second) {
        (Some(x), Some(y)) => matches!(
            (s.unary_bound(x), s.unary_bound(y)),
            (Some(a), Some(b)) if a + b <= n.bound
        ),
        _ => false,
    }
}

/// Satisfiability class from the two closures.
pub fn classify(constraints: &[UtvpiConstraint]) -> crate::Verdict {
    if tc(constraints).is_unsat() {
        crate::Verdict::UnsatQ
    } else if ttc(constraints).is_unsat() {
        crate::Verdict::UnsatZ
    } else {
        crate::Verdict::Sat
    }
}
