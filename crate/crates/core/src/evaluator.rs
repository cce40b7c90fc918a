//! Offline evaluation of well-typed specifications over input traces.
//!
//! For every time point, outputs are computed in typing order: an output is
//! evaluated where its pacing is active and left undefined elsewhere. Typing
//! guarantees every synchronous access reads a cell that is already computed,
//! and the evaluator checks this as it goes instead of relying on it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ast::{Ident, Spec};
use crate::semantics::{active_at, eval_in, satisfies, Env, EvalError, FiniteStream, InMap, OutMap, Slot};
use crate::typecheck::{type_spec, Extensions, TypeError, TypingOrder};

/// A specification paired with an equation order it type-checks under.
#[derive(Debug, Clone)]
pub struct EvalPlan {
    spec: Spec,
    order: Vec<usize>,
}

impl EvalPlan {
    /// Type-checks `spec` and keeps the resulting order.
    pub fn new(spec: Spec, ext: Extensions) -> Result<Self, TypeError> {
        let order = type_spec(&spec, ext)?;
        Ok(EvalPlan::from_order(spec, order))
    }

    pub fn from_order(spec: Spec, order: TypingOrder) -> Self {
        EvalPlan { order: order.indices().to_vec(), spec }
    }

    /// A plan whose order was never type-checked. Only for exercising the
    /// evaluator's own guards.
    #[cfg(test)]
    pub(crate) fn unchecked(spec: Spec, order: Vec<usize>) -> Self {
        EvalPlan { spec, order }
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn order(&self) -> impl Iterator<Item = &Ident> + '_ {
        self.order.iter().map(|&i| &self.spec.equations[i].output)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("input `{0}` is missing from the trace")]
    MissingInput(Ident),
    #[error("stream `{name}` has {found} time points, expected {expected}")]
    HorizonMismatch { name: Ident, expected: usize, found: usize },
    #[error("`{output}` must produce a value at time {time} but `{body}` is undefined there")]
    DefinednessViolation { output: Ident, time: usize, body: String },
    #[error("evaluating `{output}` at time {time}: {source}")]
    Eval { output: Ident, time: usize, source: EvalError },
    #[error("computed outputs do not satisfy the specification")]
    Unsatisfied,
    #[error("re-checking the computed outputs: {0}")]
    Verify(EvalError),
}

impl RunError {
    /// Errors that can only come from a bug in the checker or evaluator.
    pub fn is_internal(&self) -> bool {
        match self {
            RunError::DefinednessViolation { .. } | RunError::Unsatisfied | RunError::Verify(_) => true,
            RunError::Eval { source, .. } => !matches!(source, EvalError::Overflow { .. }),
            _ => false,
        }
    }
}

struct RunEnv<'a> {
    rho_in: &'a InMap,
    rho_out: &'a OutMap,
    /// Position of each output in the plan order.
    rank: &'a BTreeMap<&'a Ident, usize>,
    /// Rank of the output currently being computed.
    current: usize,
}

impl Env for RunEnv<'_> {
    fn slot(&self, name: &Ident) -> Result<Slot<'_>, EvalError> {
        if let Some(w) = self.rho_in.get(name.as_str()) {
            return Ok(Slot::Ready(w));
        }
        let rank = *self.rank.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?;
        let w = self.rho_out.get(name.as_str()).expect("every output has a buffer");
        Ok(match rank.cmp(&self.current) {
            std::cmp::Ordering::Less => Slot::Ready(w),
            std::cmp::Ordering::Equal => Slot::InProgress(w),
            std::cmp::Ordering::Greater => Slot::Pending,
        })
    }
}

/// Computes the output map for `rho_in` and re-checks it against the
/// denotational semantics before returning.
pub fn run(plan: &EvalPlan, rho_in: &InMap) -> Result<OutMap, RunError> {
    let out = run_unverified(plan, rho_in)?;
    if !satisfies(&plan.spec, rho_in, &out).map_err(RunError::Verify)? {
        return Err(RunError::Unsatisfied);
    }
    Ok(out)
}

/// [`run`] without the final satisfaction check.
pub fn run_unverified(plan: &EvalPlan, rho_in: &InMap) -> Result<OutMap, RunError> {
    let horizon = rho_in.horizon();
    for input in &plan.spec.inputs {
        match rho_in.get(input.as_str()) {
            None => return Err(RunError::MissingInput(input.clone())),
            Some(w) if w.len() != horizon => {
                return Err(RunError::HorizonMismatch {
                    name: input.clone(),
                    expected: horizon,
                    found: w.len(),
                })
            }
            Some(_) => {}
        }
    }
    let rank: BTreeMap<&Ident, usize> =
        plan.order.iter().enumerate().map(|(r, &i)| (&plan.spec.equations[i].output, r)).collect();
    let mut out = OutMap::new(horizon);
    for eq in &plan.spec.equations {
        out.insert(eq.output.clone(), FiniteStream::undefined(horizon))
            .expect("buffer has the trace horizon");
    }

    for n in 0..horizon {
        for (current, &i) in plan.order.iter().enumerate() {
            let eq = &plan.spec.equations[i];
            if !active_at(&eq.pacing, rho_in, n) {
                continue;
            }
            let env = RunEnv { rho_in, rho_out: &out, rank: &rank, current };
            let value = eval_in(&eq.body, &env, n).map_err(|source| RunError::Eval {
                output: eq.output.clone(),
                time: n,
                source,
            })?;
            let Some(v) = value else {
                return Err(RunError::DefinednessViolation {
                    output: eq.output.clone(),
                    time: n,
                    body: eq.body.to_string(),
                });
            };
            out.get_mut(eq.output.as_str()).expect("buffer exists").set(n, Some(v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;
    use crate::parser::parse_spec;
    use crate::semantics::StreamMap;

    fn w(s: &str) -> FiniteStream {
        s.parse().unwrap()
    }

    fn plan(text: &str) -> EvalPlan {
        EvalPlan::new(parse_spec(text).unwrap(), Extensions::ALL).unwrap()
    }

    #[test]
    fn counter() {
        let plan = plan("output x @ true := x.prev(or: 0) + 1");
        let out = run(&plan, &StreamMap::new(4)).unwrap();
        assert_eq!(out.get("x"), Some(&w("[1,2,3,4]")));
    }

    #[test]
    fn hold_fix() {
        let plan = plan("input a input b output x @ a := a output y @ b := x.hold(or: b)");
        let ins = StreamMap::from_streams(2, [(ident("a"), w("[1,⊥]")), (ident("b"), w("[⊥,2]"))]).unwrap();
        let out = run(&plan, &ins).unwrap();
        assert_eq!(out.get("x"), Some(&w("[1,⊥]")));
        assert_eq!(out.get("y"), Some(&w("[⊥,1]")));
    }

    #[test]
    fn battery() {
        let plan = plan(
            "input battery_lvl input temperature
             output drain @ battery_lvl := battery_lvl.prev(or: battery_lvl) - battery_lvl
             output warning @ battery_lvl | temperature :=
                 (drain.hold(or: 0) < 0) * (50 < temperature.hold(or: 0))",
        );
        let ins = StreamMap::from_streams(
            6,
            [(ident("battery_lvl"), w("[80,⊥,85,⊥,83,⊥]")), (ident("temperature"), w("[⊥,40,55,60,⊥,45]"))],
        )
        .unwrap();
        let out = run(&plan, &ins).unwrap();
        assert_eq!(out.get("drain"), Some(&w("[0,⊥,-5,⊥,2,⊥]")));
        assert_eq!(out.get("warning"), Some(&w("[0,0,1,1,0,0]")));
    }

    #[test]
    fn reordered_plan() {
        let plan = plan("input i output x @ i := y + 1 output y @ i := i");
        assert_eq!(plan.order().collect::<Vec<_>>(), vec![&ident("y"), &ident("x")]);
        let ins = StreamMap::from_streams(2, [(ident("i"), w("[3,⊥]"))]).unwrap();
        let out = run(&plan, &ins).unwrap();
        assert_eq!(out.get("x"), Some(&w("[4,⊥]")));
    }

    #[test]
    fn unchecked_plan_is_caught() {
        // `x` reads `y` synchronously but comes first in the plan.
        let spec = parse_spec("input a output x @ a := y output y @ a := a").unwrap();
        let plan = EvalPlan::unchecked(spec, vec![0, 1]);
        let ins = StreamMap::from_streams(1, [(ident("a"), w("[1]"))]).unwrap();
        let err = run(&plan, &ins).unwrap_err();
        assert!(matches!(err, RunError::Eval { source: EvalError::NotYetComputed { .. }, .. }));
        assert!(err.is_internal());

        // `y @ true := a` is rejected by typing; forcing it exposes the ⊥.
        let spec = parse_spec("input a output y @ true := a").unwrap();
        let plan = EvalPlan::unchecked(spec, vec![0]);
        let ins = StreamMap::from_streams(2, [(ident("a"), w("[1,⊥]"))]).unwrap();
        assert!(matches!(run(&plan, &ins), Err(RunError::DefinednessViolation { time: 1, .. })));
    }

    #[test]
    fn missing_input() {
        let plan = plan("input a output x @ a := a");
        assert_eq!(run(&plan, &StreamMap::new(2)), Err(RunError::MissingInput(ident("a"))));
    }

    #[test]
    fn overflow_surfaces() {
        let plan = plan("output x @ true := x.prev(or: 4611686018427387904) * 2");
        let err = run(&plan, &StreamMap::new(1)).unwrap_err();
        assert!(matches!(err, RunError::Eval { source: EvalError::Overflow { .. }, .. }));
        assert!(!err.is_internal());
    }
}
