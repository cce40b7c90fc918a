//! Abstract syntax of μRTLola specifications.
//!
//! A specification is a list of declared input streams followed by annotated
//! output equations `x @ τ := e`. Everything here is plain immutable data; the
//! structural well-formedness rules live in [`validate`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Words that may never be used as stream names.
pub const RESERVED_WORDS: [&str; 6] = ["input", "output", "prev", "hold", "or", "true"];

/// A stream name matching `[A-Za-z_][A-Za-z0-9_]*` that is not a reserved word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("identifier is empty")]
    Empty,
    #[error("`{0}` is not a valid identifier")]
    InvalidCharacters(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Result<Self, IdentError> {
        let name = name.into();
        let mut chars = name.chars();
        match chars.next() {
            None => return Err(IdentError::Empty),
            Some(c) if c == '_' || c.is_ascii_alphabetic() => {}
            Some(_) => return Err(IdentError::InvalidCharacters(name)),
        }
        if !chars.all(|c| c == '_' || c.is_ascii_alphanumeric()) {
            return Err(IdentError::InvalidCharacters(name));
        }
        if RESERVED_WORDS.contains(&name.as_str()) {
            return Err(IdentError::Reserved(name));
        }
        Ok(Ident(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Ident {
    type Err = IdentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ident::new(s)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Builds an identifier from a literal, panicking on invalid names.
///
/// Meant for tests, examples and hand-built ASTs.
pub fn ident(name: &str) -> Ident {
    Ident::new(name).unwrap_or_else(|e| panic!("{e}"))
}

/// Binary operators on integer streams. Comparisons yield `1` or `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Eq,
}

impl BinOp {
    pub const ALL: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Lt, BinOp::Eq];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Eq => "==",
        }
    }

    /// Applies the operator, returning `None` on overflow.
    pub fn apply(self, lhs: i64, rhs: i64) -> Option<i64> {
        match self {
            BinOp::Add => lhs.checked_add(rhs),
            BinOp::Sub => lhs.checked_sub(rhs),
            BinOp::Mul => lhs.checked_mul(rhs),
            BinOp::Lt => Some(i64::from(lhs < rhs)),
            BinOp::Eq => Some(i64::from(lhs == rhs)),
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// How an expression reads another stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessKind {
    /// `x`, synchronous.
    Direct,
    /// `x.prev(or: e)`, synchronous.
    Prev,
    /// `x.hold(or: e)`, asynchronous.
    Hold,
}

impl fmt::Display for AccessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessKind::Direct => "direct",
            AccessKind::Prev => "prev",
            AccessKind::Hold => "hold",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StreamExpr {
    Const(i64),
    Var(Ident),
    Prev { target: Ident, default: Box<StreamExpr> },
    Hold { target: Ident, default: Box<StreamExpr> },
    BinOp { op: BinOp, lhs: Box<StreamExpr>, rhs: Box<StreamExpr> },
}

impl StreamExpr {
    pub fn var(name: Ident) -> Self {
        StreamExpr::Var(name)
    }

    pub fn prev(target: Ident, default: StreamExpr) -> Self {
        StreamExpr::Prev { target, default: Box::new(default) }
    }

    pub fn hold(target: Ident, default: StreamExpr) -> Self {
        StreamExpr::Hold { target, default: Box::new(default) }
    }

    pub fn binop(op: BinOp, lhs: StreamExpr, rhs: StreamExpr) -> Self {
        StreamExpr::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    /// Calls `f` for every stream access in the tree, outermost first.
    pub fn for_each_access<'a>(&'a self, f: &mut impl FnMut(&'a Ident, AccessKind)) {
        match self {
            StreamExpr::Const(_) => {}
            StreamExpr::Var(x) => f(x, AccessKind::Direct),
            StreamExpr::Prev { target, default } => {
                f(target, AccessKind::Prev);
                default.for_each_access(f);
            }
            StreamExpr::Hold { target, default } => {
                f(target, AccessKind::Hold);
                default.for_each_access(f);
            }
            StreamExpr::BinOp { lhs, rhs, .. } => {
                lhs.for_each_access(f);
                rhs.for_each_access(f);
            }
        }
    }

    /// Calls `f` for every integer literal in the tree.
    pub fn for_each_const(&self, f: &mut impl FnMut(i64)) {
        match self {
            StreamExpr::Const(v) => f(*v),
            StreamExpr::Var(_) => {}
            StreamExpr::Prev { default, .. } | StreamExpr::Hold { default, .. } => default.for_each_const(f),
            StreamExpr::BinOp { lhs, rhs, .. } => {
                lhs.for_each_const(f);
                rhs.for_each_const(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            StreamExpr::Const(_) | StreamExpr::Var(_) => 0,
            StreamExpr::Prev { default, .. } | StreamExpr::Hold { default, .. } => 1 + default.depth(),
            StreamExpr::BinOp { lhs, rhs, .. } => 1 + lhs.depth().max(rhs.depth()),
        }
    }
}

/// Every identifier occurring as a variable, `prev` target or `hold` target.
pub fn free_vars(e: &StreamExpr) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    e.for_each_access(&mut |x, _| {
        out.insert(x.clone());
    });
    out
}

/// A positive boolean formula over input names; `Top` is spelled `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pacing {
    Top,
    In(Ident),
    And(Box<Pacing>, Box<Pacing>),
    Or(Box<Pacing>, Box<Pacing>),
}

impl Pacing {
    pub fn input(name: Ident) -> Self {
        Pacing::In(name)
    }

    pub fn and(lhs: Pacing, rhs: Pacing) -> Self {
        Pacing::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Pacing, rhs: Pacing) -> Self {
        Pacing::Or(Box::new(lhs), Box::new(rhs))
    }

    /// Input names mentioned by the formula.
    pub fn vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Pacing::Top => {}
            Pacing::In(x) => {
                out.insert(x.clone());
            }
            Pacing::And(l, r) | Pacing::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Evaluates the formula under a valuation saying which inputs are present.
    pub fn holds(&self, present: &impl Fn(&Ident) -> bool) -> bool {
        match self {
            Pacing::Top => true,
            Pacing::In(x) => present(x),
            Pacing::And(l, r) => l.holds(present) && r.holds(present),
            Pacing::Or(l, r) => l.holds(present) || r.holds(present),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub output: Ident,
    pub pacing: Pacing,
    pub body: StreamExpr,
}

impl Equation {
    pub fn new(output: Ident, pacing: Pacing, body: StreamExpr) -> Self {
        Equation { output, pacing, body }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Spec {
    pub inputs: Vec<Ident>,
    pub equations: Vec<Equation>,
}

impl Spec {
    pub fn new(inputs: Vec<Ident>, equations: Vec<Equation>) -> Self {
        Spec { inputs, equations }
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Ident> + '_ {
        self.equations.iter().map(|eq| &eq.output)
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs.iter().any(|i| i.as_str() == name)
    }

    pub fn is_output(&self, name: &str) -> bool {
        self.outputs().any(|o| o.as_str() == name)
    }

    pub fn equation(&self, output: &str) -> Option<&Equation> {
        self.equations.iter().find(|eq| eq.output.as_str() == output)
    }

    /// The same specification with equations listed in `order` (indices into
    /// the current equation list).
    ///
    /// Panics if `order` is not a permutation of `0..equations.len()`.
    pub fn permuted(&self, order: &[usize]) -> Spec {
        let mut seen = vec![false; self.equations.len()];
        assert_eq!(order.len(), seen.len(), "order is not a permutation");
        for &i in order {
            assert!(!std::mem::replace(&mut seen[i], true), "order is not a permutation");
        }
        Spec {
            inputs: self.inputs.clone(),
            equations: order.iter().map(|&i| self.equations[i].clone()).collect(),
        }
    }

    /// Every integer literal occurring in some body.
    pub fn constants(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for eq in &self.equations {
            eq.body.for_each_const(&mut |v| {
                out.insert(v);
            });
        }
        out
    }
}

/// A violated structural rule, with the index of the declaration at fault.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormednessError {
    #[error("input `{name}` is declared twice")]
    DuplicateInput { name: Ident, input: usize },
    #[error("output `{name}` is defined twice")]
    DuplicateOutput { name: Ident, equation: usize },
    #[error("`{name}` is declared both as input and as output")]
    InputOutputClash { name: Ident, equation: usize },
    #[error("pacing of `{output}` mentions `{name}`, which is not a declared input")]
    UndeclaredInPacing { name: Ident, output: Ident, equation: usize },
    #[error("definition of `{output}` uses undeclared stream `{name}`")]
    UndeclaredInBody { name: Ident, output: Ident, equation: usize },
}

/// Where the first violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclSite {
    Input(usize),
    Equation(usize),
}

impl WellFormednessError {
    pub fn site(&self) -> DeclSite {
        match self {
            WellFormednessError::DuplicateInput { input, .. } => DeclSite::Input(*input),
            WellFormednessError::DuplicateOutput { equation, .. }
            | WellFormednessError::InputOutputClash { equation, .. }
            | WellFormednessError::UndeclaredInPacing { equation, .. }
            | WellFormednessError::UndeclaredInBody { equation, .. } => DeclSite::Equation(*equation),
        }
    }

    pub fn name(&self) -> &Ident {
        match self {
            WellFormednessError::DuplicateInput { name, .. }
            | WellFormednessError::DuplicateOutput { name, .. }
            | WellFormednessError::InputOutputClash { name, .. }
            | WellFormednessError::UndeclaredInPacing { name, .. }
            | WellFormednessError::UndeclaredInBody { name, .. } => name,
        }
    }
}

/// Checks the structural invariants of a specification.
///
/// Inputs are checked first, then equations in order; within an equation the
/// output name comes before the pacing, and the pacing before the body.
pub fn validate(spec: &Spec) -> Result<(), WellFormednessError> {
    let mut inputs = HashSet::new();
    for (i, name) in spec.inputs.iter().enumerate() {
        if !inputs.insert(name) {
            return Err(WellFormednessError::DuplicateInput { name: name.clone(), input: i });
        }
    }
    let outputs: HashSet<&Ident> = spec.outputs().collect();

    let mut seen_outputs = HashSet::new();
    for (i, eq) in spec.equations.iter().enumerate() {
        if inputs.contains(&eq.output) {
            return Err(WellFormednessError::InputOutputClash { name: eq.output.clone(), equation: i });
        }
        if !seen_outputs.insert(&eq.output) {
            return Err(WellFormednessError::DuplicateOutput { name: eq.output.clone(), equation: i });
        }
        if let Some(name) = eq.pacing.vars().into_iter().find(|x| !inputs.contains(x)) {
            return Err(WellFormednessError::UndeclaredInPacing {
                name,
                output: eq.output.clone(),
                equation: i,
            });
        }
        let mut undeclared = None;
        eq.body.for_each_access(&mut |x, _| {
            if undeclared.is_none() && !inputs.contains(x) && !outputs.contains(x) {
                undeclared = Some(x.clone());
            }
        });
        if let Some(name) = undeclared {
            return Err(WellFormednessError::UndeclaredInBody {
                name,
                output: eq.output.clone(),
                equation: i,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(out: &str, pacing: Pacing, body: StreamExpr) -> Equation {
        Equation::new(ident(out), pacing, body)
    }

    #[test]
    fn ident_rules() {
        assert!(Ident::new("battery_lvl").is_ok());
        assert!(Ident::new("_x1").is_ok());
        assert_eq!(Ident::new(""), Err(IdentError::Empty));
        assert!(matches!(Ident::new("1x"), Err(IdentError::InvalidCharacters(_))));
        assert!(matches!(Ident::new("a-b"), Err(IdentError::InvalidCharacters(_))));
        for w in RESERVED_WORDS {
            assert_eq!(Ident::new(w), Err(IdentError::Reserved(w.to_string())));
        }
    }

    #[test]
    fn free_vars_examples() {
        assert!(free_vars(&StreamExpr::Const(5)).is_empty());
        let e = StreamExpr::prev(ident("x"), StreamExpr::Var(ident("b")));
        assert_eq!(free_vars(&e), [ident("x"), ident("b")].into_iter().collect());
        let e = StreamExpr::binop(
            BinOp::Add,
            StreamExpr::Var(ident("a")),
            StreamExpr::hold(ident("y"), StreamExpr::Const(0)),
        );
        assert_eq!(free_vars(&e), [ident("a"), ident("y")].into_iter().collect());
    }

    #[test]
    fn validate_examples() {
        let a = || Pacing::In(ident("a"));
        let va = || StreamExpr::Var(ident("a"));
        let ok = Spec::new(vec![ident("a")], vec![eq("x", a(), va())]);
        assert_eq!(validate(&ok), Ok(()));

        let dup = Spec::new(vec![ident("a")], vec![eq("x", a(), va()), eq("x", a(), va())]);
        assert_eq!(
            validate(&dup),
            Err(WellFormednessError::DuplicateOutput { name: ident("x"), equation: 1 })
        );

        let bad_pacing = Spec::new(vec![ident("a")], vec![eq("x", Pacing::In(ident("b")), va())]);
        assert!(matches!(
            validate(&bad_pacing),
            Err(WellFormednessError::UndeclaredInPacing { ref name, .. }) if name.as_str() == "b"
        ));
    }

    #[test]
    fn validate_other_violations() {
        let a = || Pacing::In(ident("a"));
        let dup_in = Spec::new(vec![ident("a"), ident("a")], vec![]);
        assert_eq!(
            validate(&dup_in),
            Err(WellFormednessError::DuplicateInput { name: ident("a"), input: 1 })
        );
        let clash = Spec::new(vec![ident("a")], vec![eq("a", a(), StreamExpr::Const(1))]);
        assert!(matches!(validate(&clash), Err(WellFormednessError::InputOutputClash { .. })));
        // pacing may not name an output
        let out_pacing = Spec::new(
            vec![ident("a")],
            vec![eq("x", a(), StreamExpr::Const(1)), eq("y", Pacing::In(ident("x")), StreamExpr::Const(1))],
        );
        assert!(matches!(validate(&out_pacing), Err(WellFormednessError::UndeclaredInPacing { .. })));
        let body = Spec::new(
            vec![ident("b")],
            vec![eq("y", Pacing::In(ident("b")), StreamExpr::hold(ident("x"), StreamExpr::Var(ident("b"))))],
        );
        assert_eq!(
            validate(&body),
            Err(WellFormednessError::UndeclaredInBody { name: ident("x"), output: ident("y"), equation: 0 })
        );
    }

    #[test]
    fn forward_references_are_well_formed() {
        let spec = Spec::new(
            vec![ident("i")],
            vec![
                eq("x", Pacing::In(ident("i")), StreamExpr::Var(ident("y"))),
                eq("y", Pacing::In(ident("i")), StreamExpr::Var(ident("i"))),
            ],
        );
        assert_eq!(validate(&spec), Ok(()));
    }

    #[test]
    fn binop_semantics() {
        assert_eq!(BinOp::Lt.apply(1, 2), Some(1));
        assert_eq!(BinOp::Lt.apply(2, 2), Some(0));
        assert_eq!(BinOp::Eq.apply(-3, -3), Some(1));
        assert_eq!(BinOp::Mul.apply(i64::MAX, 2), None);
        assert_eq!(BinOp::Sub.apply(i64::MIN, 1), None);
    }
}
