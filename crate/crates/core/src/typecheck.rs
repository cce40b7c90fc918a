//! Pacing types.
//!
//! An output annotated `x @ τ := e` must produce a value exactly when `τ`
//! holds, so every synchronous access inside `e` (direct or `prev`) must be
//! to a stream that can be evaluated whenever `τ` holds. Hold accesses never
//! constrain pacing. Equations are checked in order, each one extending the
//! typing context with its own annotation.
//!
//! Two optional extensions relax the order sensitivity of the base rules:
//! `reorder` lets the checker pick any equation order, and `prev_self` admits
//! `x.prev(or: e)` inside the definition of `x` itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::ast::{AccessKind, Ident, Pacing, Spec, StreamExpr};

/// Truth assignment to input names: `true` means the input arrives.
pub type Valuation = BTreeMap<Ident, bool>;

/// Decides `must ⊨ can` by checking validity of `must → can` over every
/// assignment to the names occurring in either formula. On failure returns an
/// assignment under which `must` holds and `can` does not.
pub fn entails(must: &Pacing, can: &Pacing) -> Result<(), Valuation> {
    let vars: Vec<Ident> = must.vars().union(&can.vars()).cloned().collect();
    let mut valuation = Valuation::new();
    match search_counter(must, can, &vars, &mut valuation) {
        true => Err(valuation),
        false => Ok(()),
    }
}

fn search_counter(must: &Pacing, can: &Pacing, vars: &[Ident], valuation: &mut Valuation) -> bool {
    match vars.split_first() {
        None => {
            let present = |x: &Ident| valuation[x];
            must.holds(&present) && !can.holds(&present)
        }
        Some((x, rest)) => {
            for value in [true, false] {
                valuation.insert(x.clone(), value);
                if search_counter(must, can, rest, valuation) {
                    return true;
                }
            }
            valuation.remove(x);
            false
        }
    }
}

/// Renders a falsifying valuation as an arrival scenario, e.g.
/// `a arrives without b`.
pub fn describe_scenario(valuation: &Valuation) -> String {
    let names = |v: bool| -> Vec<&str> {
        valuation.iter().filter(|(_, &b)| b == v).map(|(k, _)| k.as_str()).collect()
    };
    let (arrived, missing) = (names(true), names(false));
    match (arrived.is_empty(), missing.is_empty()) {
        (false, false) => format!(
            "{} {} without {}",
            arrived.join(" and "),
            if arrived.len() == 1 { "arrives" } else { "arrive" },
            missing.join(" or ")
        ),
        (false, true) => {
            format!("{} {}", arrived.join(" and "), if arrived.len() == 1 { "arrives" } else { "arrive" })
        }
        (true, false) => format!("no input arrives ({} missing)", missing.join(", ")),
        (true, true) => "at any time point".to_string(),
    }
}

/// Output names bound to their annotations, in binding order.
#[derive(Debug, Clone)]
pub struct TypingContext {
    inputs: BTreeSet<Ident>,
    outputs: IndexMap<Ident, Pacing>,
}

impl TypingContext {
    /// An empty context over the given input names.
    pub fn new(inputs: impl IntoIterator<Item = Ident>) -> Self {
        TypingContext { inputs: inputs.into_iter().collect(), outputs: IndexMap::new() }
    }

    pub fn is_input(&self, name: &Ident) -> bool {
        self.inputs.contains(name)
    }

    pub fn lookup(&self, name: &Ident) -> Option<&Pacing> {
        self.outputs.get(name)
    }

    /// `Γ, x : τ`. Fails if `x` is already bound.
    pub fn bind(&mut self, name: Ident, pacing: Pacing) -> Result<(), TypeError> {
        if self.outputs.contains_key(&name) {
            return Err(TypeError::DuplicateOutput { output: name });
        }
        self.outputs.insert(name, pacing);
        Ok(())
    }

    pub fn bound(&self) -> impl Iterator<Item = (&Ident, &Pacing)> + '_ {
        self.outputs.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum TypeErrorKind {
    EntailmentFailure,
    SelfReferenceNotAllowed,
    ForwardReference,
    DuplicateOutput,
    CyclicDependency,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    /// A synchronous access whose target cannot be evaluated at every point
    /// where the accessing output must be.
    #[error(
        "{access} access to `{accessed}` in `{accessing}` needs `{must}` to entail `{can}`, \
         but it does not: when {}, `{accessing}` must produce a value and `{accessed}` has none",
        describe_scenario(witness)
    )]
    EntailmentFailure {
        accessing: Ident,
        accessed: Ident,
        access: AccessKind,
        must: Pacing,
        can: Pacing,
        witness: Valuation,
    },
    #[error("{access} access of `{output}` to itself is not allowed")]
    SelfReferenceNotAllowed { output: Ident, access: AccessKind },
    #[error(
        "{access} access to `{accessed}` in `{accessing}` refers to an output that is not defined before it"
    )]
    ForwardReference { accessing: Ident, accessed: Ident, access: AccessKind },
    #[error("output `{output}` is defined twice")]
    DuplicateOutput { output: Ident },
    #[error("no equation order type-checks: outputs {} depend on each other in a cycle", render_cycle(.cycle))]
    CyclicDependency { cycle: Vec<Ident> },
}

fn render_cycle(cycle: &[Ident]) -> String {
    let mut names: Vec<&str> = cycle.iter().map(Ident::as_str).collect();
    if let Some(first) = cycle.first() {
        names.push(first.as_str());
    }
    names.join(" -> ")
}

impl TypeError {
    pub fn kind(&self) -> TypeErrorKind {
        match self {
            TypeError::EntailmentFailure { .. } => TypeErrorKind::EntailmentFailure,
            TypeError::SelfReferenceNotAllowed { .. } => TypeErrorKind::SelfReferenceNotAllowed,
            TypeError::ForwardReference { .. } => TypeErrorKind::ForwardReference,
            TypeError::DuplicateOutput { .. } => TypeErrorKind::DuplicateOutput,
            TypeError::CyclicDependency { .. } => TypeErrorKind::CyclicDependency,
        }
    }
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Checks `Γ ⊢ e : must` (or `Γ ⊢^x e : must` when `current` names the output
/// being defined and `prev_self` is enabled).
pub fn type_expr(
    ctx: &TypingContext,
    current: Option<&Ident>,
    prev_self: bool,
    e: &StreamExpr,
    must: &Pacing,
) -> Result<(), TypeError> {
    let accessing = || current.cloned().unwrap_or_else(|| crate::ast::ident("_"));
    let check_target = |x: &Ident, access: AccessKind| -> Result<(), TypeError> {
        let can = if ctx.is_input(x) {
            if access == AccessKind::Hold {
                return Ok(());
            }
            Pacing::In(x.clone())
        } else if current == Some(x) {
            if access == AccessKind::Prev && prev_self {
                return Ok(());
            }
            return Err(TypeError::SelfReferenceNotAllowed { output: x.clone(), access });
        } else {
            match ctx.lookup(x) {
                Some(_) if access == AccessKind::Hold => return Ok(()),
                Some(can) => can.clone(),
                None => {
                    return Err(TypeError::ForwardReference {
                        accessing: accessing(),
                        accessed: x.clone(),
                        access,
                    })
                }
            }
        };
        entails(must, &can).map_err(|witness| TypeError::EntailmentFailure {
            accessing: accessing(),
            accessed: x.clone(),
            access,
            must: must.clone(),
            can,
            witness,
        })
    };
    match e {
        StreamExpr::Const(_) => Ok(()),
        StreamExpr::Var(x) => check_target(x, AccessKind::Direct),
        StreamExpr::Prev { target, default } => {
            check_target(target, AccessKind::Prev)?;
            type_expr(ctx, current, prev_self, default, must)
        }
        StreamExpr::Hold { target, default } => {
            check_target(target, AccessKind::Hold)?;
            type_expr(ctx, current, prev_self, default, must)
        }
        StreamExpr::BinOp { lhs, rhs, .. } => {
            type_expr(ctx, current, prev_self, lhs, must)?;
            type_expr(ctx, current, prev_self, rhs, must)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extensions {
    pub reorder: bool,
    pub prev_self: bool,
}

impl Extensions {
    pub const NONE: Extensions = Extensions { reorder: false, prev_self: false };
    pub const ALL: Extensions = Extensions { reorder: true, prev_self: true };
}

impl Default for Extensions {
    fn default() -> Self {
        Extensions::ALL
    }
}

/// Equation indices in an order under which the specification type-checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypingOrder(Vec<usize>);

impl TypingOrder {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn names<'a>(&self, spec: &'a Spec) -> Vec<&'a Ident> {
        self.0.iter().map(|&i| &spec.equations[i].output).collect()
    }
}

pub type TypeVerdict = Result<TypingOrder, TypeError>;

/// Types the equations in the given order, threading the context.
pub fn type_in_order(spec: &Spec, order: &[usize], prev_self: bool) -> Result<(), TypeError> {
    let mut ctx = TypingContext::new(spec.inputs.iter().cloned());
    for &i in order {
        let eq = &spec.equations[i];
        if ctx.lookup(&eq.output).is_some() {
            return Err(TypeError::DuplicateOutput { output: eq.output.clone() });
        }
        type_expr(&ctx, Some(&eq.output), prev_self, &eq.body, &eq.pacing)?;
        ctx.bind(eq.output.clone(), eq.pacing.clone())?;
    }
    Ok(())
}

/// Type-checks a validated specification.
///
/// Without `reorder` the equations are checked in textual order. With it, the
/// equations are first sorted topologically along their accesses to other
/// outputs (ties broken by textual position); every access to another output
/// needs that output in the context, so if any order type-checks, this one
/// does.
pub fn type_spec(spec: &Spec, ext: Extensions) -> TypeVerdict {
    let order: Vec<usize> = if ext.reorder {
        dependency_order(spec).map_err(|cycle| TypeError::CyclicDependency { cycle })?
    } else {
        (0..spec.equations.len()).collect()
    };
    type_in_order(spec, &order, ext.prev_self)?;
    Ok(TypingOrder(order))
}

/// Reorder by trying every permutation (in lexicographic order). Exponential;
/// kept as a cross-check for [`type_spec`].
pub fn type_spec_exhaustive(spec: &Spec, prev_self: bool) -> TypeVerdict {
    let n = spec.equations.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut first_error = None;
    loop {
        match type_in_order(spec, &order, prev_self) {
            Ok(()) => return Ok(TypingOrder(order)),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
        if !next_permutation(&mut order) {
            return Err(first_error.unwrap_or(TypeError::CyclicDependency { cycle: vec![] }));
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Equation indices that equation `i` reads, excluding itself.
fn output_dependencies(spec: &Spec) -> Vec<BTreeSet<usize>> {
    let index: BTreeMap<&Ident, usize> =
        spec.equations.iter().enumerate().map(|(i, eq)| (&eq.output, i)).collect();
    spec.equations
        .iter()
        .enumerate()
        .map(|(i, eq)| {
            let mut deps = BTreeSet::new();
            eq.body.for_each_access(&mut |x, _| {
                if let Some(&j) = index.get(x) {
                    if j != i {
                        deps.insert(j);
                    }
                }
            });
            deps
        })
        .collect()
}

/// Kahn's algorithm picking the textually first ready equation; on failure
/// returns one dependency cycle.
fn dependency_order(spec: &Spec) -> Result<Vec<usize>, Vec<Ident>> {
    let deps = output_dependencies(spec);
    let n = deps.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = (0..n).find(|&i| !placed[i] && deps[i].iter().all(|&d| placed[d]));
        match ready {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => {
                // Every unplaced equation waits on another unplaced one, so
                // following first unplaced dependencies must revisit a node.
                let start = (0..n).find(|&i| !placed[i]).expect("unplaced equation");
                let mut path = vec![start];
                let mut node = start;
                loop {
                    node = *deps[node].iter().find(|&&d| !placed[d]).expect("blocked dependency");
                    if let Some(pos) = path.iter().position(|&p| p == node) {
                        return Err(path[pos..].iter().map(|&i| spec.equations[i].output.clone()).collect());
                    }
                    path.push(node);
                }
            }
        }
    }
    Ok(order)
}
