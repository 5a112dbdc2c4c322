//! Incremental satisfiability and implication checking for unit
//! two-variable-per-inequality (UTVPI) integer constraints `a*x + b*y <= d`
//! with `a, b` in `{-1, 0, 1}`.
//!
//! Constraints are mapped onto a difference-constraint graph over signed
//! vertices `x+`/`x-`. [`scst::SolverState`] decides integer satisfiability
//! and implication incrementally; [`lamu`] is the non-incremental checker and
//! [`closure`] the brute-force closure used as an oracle.

pub mod cli;
pub mod closure;
pub mod graph;
pub mod incdiff;
pub mod lamu;
pub mod model;
pub mod scst;

use std::fmt;

pub use graph::{ConstraintGraph, Dist, Potential};
pub use model::{normalize, parse_constraint, parse_constraints, NormalizeOutcome, SignedVertex, UtvpiConstraint, Var, VarTable};
pub use scst::{AddOutcome, SolverState, WatchStatus};

/// Satisfiability class of a constraint set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Sat,
    /// Unsatisfiable over the rationals.
    UnsatQ,
    /// Satisfiable over the rationals but not over the integers.
    UnsatZ,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::UnsatQ => "UNSAT-Q",
            Verdict::UnsatZ => "UNSAT-Z",
        })
    }
}
