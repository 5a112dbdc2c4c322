//! Constraint representation: variables, signed vertices, UTVPI constraints,
//! text parsing and the translation to difference-graph edges.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest accepted magnitude of a constraint bound.
///
/// Bounds are doubled for single-variable edges and summed along paths; with
/// `|d| <= 2^40` a path over up to `2^21` edges stays inside 62 bits.
pub const MAX_BOUND: i64 = 1 << 40;

/// Dense variable index, assigned in order of first appearance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn plus(self) -> SignedVertex {
        SignedVertex::new(self, Sign::Plus)
    }

    #[inline]
    pub fn minus(self) -> SignedVertex {
        SignedVertex::new(self, Sign::Minus)
    }
}

/// Interns variable names to dense indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the variable for `name`, creating it on first sight.
    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.names.len() as u32).map(Var)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The vertex `x+` or `x-` of the constraint graph. The same value doubles as
/// the literal `+x` / `-x` of a constraint.
///
/// Encoded as `2 * var + (sign == Minus)`, so negation flips the low bit.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedVertex(u32);

impl SignedVertex {
    #[inline]
    pub fn new(var: Var, sign: Sign) -> Self {
        SignedVertex(var.0 * 2 + (sign == Sign::Minus) as u32)
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        SignedVertex(i as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn sign(self) -> Sign {
        if self.0 & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Coefficient of the literal: `+1` or `-1`.
    #[inline]
    pub fn coef(self) -> i64 {
        match self.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Neg for SignedVertex {
    type Output = SignedVertex;

    #[inline]
    fn neg(self) -> SignedVertex {
        SignedVertex(self.0 ^ 1)
    }
}

impl fmt::Debug for SignedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SignedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign() == Sign::Plus { '+' } else { '-' };
        write!(f, "x{}{}", self.var().0, s)
    }
}

/// A weighted edge `from -> to`, encoding `value(to) - value(from) <= weight`
/// where `value(x+) = x` and `value(x-) = -x`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffEdge {
    pub from: SignedVertex,
    pub to: SignedVertex,
    pub weight: i64,
}

impl DiffEdge {
    pub fn new(from: SignedVertex, to: SignedVertex, weight: i64) -> Self {
        DiffEdge { from, to, weight }
    }

    /// The mirrored edge `-to -> -from` with the same weight.
    pub fn counter(self) -> Self {
        DiffEdge::new(-self.to, -self.from, self.weight)
    }
}

/// `a*x + b*y <= d` with `a, b` in `{-1, 0, 1}`.
///
/// Each present literal is a [`SignedVertex`]. After [`normalize`], a lone
/// literal always sits in `first`, and two literals are on distinct variables
/// ordered by variable index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct UtvpiConstraint {
    pub first: Option<SignedVertex>,
    pub second: Option<SignedVertex>,
    pub bound: i64,
}

impl UtvpiConstraint {
    pub fn new(first: Option<SignedVertex>, second: Option<SignedVertex>, bound: i64) -> Self {
        UtvpiConstraint { first, second, bound }
    }

    pub fn binary(x: SignedVertex, y: SignedVertex, bound: i64) -> Self {
        Self::new(Some(x), Some(y), bound)
    }

    pub fn unary(x: SignedVertex, bound: i64) -> Self {
        Self::new(Some(x), None, bound)
    }

    /// The constant constraint `0 <= bound`.
    pub fn constant(bound: i64) -> Self {
        Self::new(None, None, bound)
    }

    pub fn literals(&self) -> impl Iterator<Item = SignedVertex> {
        self.first.into_iter().chain(self.second)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        self.literals().map(SignedVertex::var)
    }

    pub fn in_range(&self) -> bool {
        self.bound.abs() <= MAX_BOUND
    }

    /// Evaluates the left-hand side under `value` and compares with the bound.
    pub fn satisfied_by(&self, value: impl Fn(Var) -> i64) -> bool {
        let lhs: i128 = self
            .literals()
            .map(|l| l.coef() as i128 * value(l.var()) as i128)
            .sum();
        lhs <= self.bound as i128
    }

    /// Edges of the constraint graph for a normalized constraint.
    ///
    /// Two-variable constraints yield the edge `-y -> x` followed by its
    /// counter-edge `-x -> y`; a single literal `x` yields `-x -> x` with the
    /// doubled bound.
    pub fn edges(&self) -> Result<Vec<DiffEdge>, ModelError> {
        let e = self.first_edge()?;
        Ok(if self.second.is_some() {
            vec![e, e.counter()]
        } else {
            vec![e]
        })
    }

    /// The first edge of [`UtvpiConstraint::edges`].
    pub fn first_edge(&self) -> Result<DiffEdge, ModelError> {
        match (self.first, self.second) {
            (Some(x), Some(y)) => {
                if x.var() == y.var() {
                    return Err(ModelError::NotNormalized);
                }
                Ok(DiffEdge::new(-y, x, self.bound))
            }
            (Some(x), None) => {
                let w = self.bound.checked_mul(2).ok_or(ModelError::BoundOutOfRange(self.bound))?;
                Ok(DiffEdge::new(-x, x, w))
            }
            (None, Some(_)) => Err(ModelError::NotNormalized),
            (None, None) => Err(ModelError::NoLiterals),
        }
    }

    /// Formats the constraint in the file syntax, e.g. `+x -y <= 2`.
    pub fn display<'a>(&'a self, vars: &'a VarTable) -> impl fmt::Display + 'a {
        ConstraintDisplay { c: self, vars: Some(vars) }
    }
}

impl fmt::Display for UtvpiConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ConstraintDisplay { c: self, vars: None }.fmt(f)
    }
}

struct ConstraintDisplay<'a> {
    c: &'a UtvpiConstraint,
    vars: Option<&'a VarTable>,
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.c.literals() {
            let s = if l.sign() == Sign::Plus { '+' } else { '-' };
            match self.vars {
                Some(t) if l.var().index() < t.len() => write!(f, "{}{} ", s, t.name(l.var()))?,
                _ => write!(f, "{}x{} ", s, l.var().0)?,
            }
        }
        write!(f, "<= {}", self.c.bound)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normal(UtvpiConstraint),
    Tautology,
    Contradiction,
}

/// Brings a constraint into canonical form.
///
/// `x + x <= d` becomes `x <= floor(d/2)`, `x - x <= d` and `0 <= d` become a
/// tautology or a contradiction depending on the sign of `d`.
pub fn normalize(c: UtvpiConstraint) -> NormalizeOutcome {
    let constant = |d: i64| {
        if d >= 0 {
            NormalizeOutcome::Tautology
        } else {
            NormalizeOutcome::Contradiction
        }
    };
    match (c.first, c.second) {
        (None, None) => constant(c.bound),
        (Some(x), None) | (None, Some(x)) => NormalizeOutcome::Normal(UtvpiConstraint::unary(x, c.bound)),
        (Some(x), Some(y)) if x == y => {
            NormalizeOutcome::Normal(UtvpiConstraint::unary(x, c.bound.div_euclid(2)))
        }
        (Some(x), Some(y)) if x == -y => constant(c.bound),
        (Some(x), Some(y)) => {
            let (x, y) = if x.var() < y.var() { (x, y) } else { (y, x) };
            NormalizeOutcome::Normal(UtvpiConstraint::binary(x, y, c.bound))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("constraint has no literals")]
    NoLiterals,
    #[error("constraint is not normalized")]
    NotNormalized,
    #[error("bound {0} exceeds the supported magnitude 2^40")]
    BoundOutOfRange(i64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character '{0}' at column {1}")]
    Unexpected(char, usize),
    #[error("expected a variable name after '{0}' at column {1}")]
    MissingIdent(char, usize),
    #[error("more than two terms")]
    TooManyTerms,
    #[error("missing '<='")]
    MissingRelation,
    #[error("missing bound after '<='")]
    MissingBound,
    #[error("invalid bound '{0}'")]
    BadBound(String),
    #[error("bound {0} exceeds the supported magnitude 2^40")]
    BoundOutOfRange(i64),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ParseError>,
    },
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

/// Parses one line of the constraint file format.
///
/// Returns `Ok(None)` for blank and comment-only lines. The result is not
/// normalized: `+x +x <= 5` comes back with both literals.
pub fn parse_constraint(line: &str, vars: &mut VarTable) -> Result<Option<UtvpiConstraint>, ParseError> {
    let text = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].1.is_whitespace() {
            *pos += 1;
        }
    };

    let mut terms: Vec<SignedVertex> = Vec::with_capacity(2);
    loop {
        skip_ws(&mut pos);
        let Some(&(col, c)) = chars.get(pos) else {
            return Err(ParseError::MissingRelation);
        };
        match c {
            '+' | '-' => {
                pos += 1;
                let start = pos;
                if !chars.get(pos).is_some_and(|&(_, c)| is_ident_start(c)) {
                    return Err(ParseError::MissingIdent(c, col + 1));
                }
                while chars.get(pos).is_some_and(|&(_, c)| is_ident_char(c)) {
                    pos += 1;
                }
                let name: String = chars[start..pos].iter().map(|&(_, c)| c).collect();
                if terms.len() == 2 {
                    return Err(ParseError::TooManyTerms);
                }
                let sign = if c == '+' { Sign::Plus } else { Sign::Minus };
                terms.push(SignedVertex::new(vars.intern(&name), sign));
            }
            '<' => {
                if chars.get(pos + 1).map(|&(_, c)| c) != Some('=') {
                    return Err(ParseError::Unexpected(c, col + 1));
                }
                pos += 2;
                break;
            }
            other => return Err(ParseError::Unexpected(other, col + 1)),
        }
    }

    skip_ws(&mut pos);
    let rest: String = chars[pos..].iter().map(|&(_, c)| c).collect();
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(ParseError::MissingBound);
    }
    let bound: i64 = rest.parse().map_err(|_| ParseError::BadBound(rest.to_owned()))?;
    if bound.abs() > MAX_BOUND {
        return Err(ParseError::BoundOutOfRange(bound));
    }
    Ok(Some(UtvpiConstraint::new(terms.first().copied(), terms.get(1).copied(), bound)))
}

/// Parses a whole constraint file, tagging errors with 1-based line numbers.
pub fn parse_constraints(text: &str, vars: &mut VarTable) -> Result<Vec<UtvpiConstraint>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match parse_constraint(line, vars) {
            Ok(Some(c)) => out.push(c),
            Ok(None) => {}
            Err(e) => {
                return Err(ParseError::AtLine {
                    line: i + 1,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}
