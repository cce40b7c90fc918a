//! Seeded random specifications, expressions and stream maps for testing.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::ast::{ident, BinOp, Equation, Ident, Pacing, Spec, StreamExpr};
use crate::semantics::{FiniteStream, StreamMap, Value};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_depth: usize,
    /// Constants are drawn from `-const_range..=const_range`.
    pub const_range: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_inputs: 2, max_outputs: 3, max_depth: 3, const_range: 2 }
    }
}

const INPUT_NAMES: [&str; 4] = ["a", "b", "c", "d"];
const OUTPUT_NAMES: [&str; 5] = ["x", "y", "z", "u", "v"];

/// A well-formed spec. Whether it type-checks is left to chance.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Spec {
    let n_inputs = rng.random_range(0..=cfg.max_inputs.min(INPUT_NAMES.len()));
    let n_outputs = rng.random_range(1..=cfg.max_outputs.clamp(1, OUTPUT_NAMES.len()));
    let inputs: Vec<Ident> = INPUT_NAMES[..n_inputs].iter().map(|n| ident(n)).collect();
    let outputs: Vec<Ident> = OUTPUT_NAMES[..n_outputs].iter().map(|n| ident(n)).collect();
    let streams: Vec<Ident> = inputs.iter().chain(&outputs).cloned().collect();
    let equations = outputs
        .iter()
        .map(|x| {
            let pacing = random_pacing(rng, &inputs, 2);
            let body = random_expr(rng, &streams, cfg.max_depth, cfg.const_range);
            Equation::new(x.clone(), pacing, body)
        })
        .collect();
    Spec::new(inputs, equations)
}

/// An expression over `names` of depth at most `depth` (a leaf has depth 1).
pub fn random_expr<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[Ident],
    depth: usize,
    const_range: i64,
) -> StreamExpr {
    let leaf = depth <= 1 || rng.random_bool(0.3);
    if leaf {
        return if names.is_empty() || rng.random_bool(0.35) {
            StreamExpr::Const(rng.random_range(-const_range..=const_range))
        } else {
            StreamExpr::var(names.choose(rng).unwrap().clone())
        };
    }
    let sub = |rng: &mut R| random_expr(rng, names, depth - 1, const_range);
    match rng.random_range(0..3) {
        0 if !names.is_empty() => {
            let target = names.choose(rng).unwrap().clone();
            StreamExpr::prev(target, sub(rng))
        }
        1 if !names.is_empty() => {
            let target = names.choose(rng).unwrap().clone();
            StreamExpr::hold(target, sub(rng))
        }
        _ => {
            let op = *BinOp::ALL.choose(rng).unwrap();
            StreamExpr::binop(op, sub(rng), sub(rng))
        }
    }
}

/// A pacing over `inputs`; `true` when there are none.
pub fn random_pacing<R: Rng + ?Sized>(rng: &mut R, inputs: &[Ident], depth: usize) -> Pacing {
    if inputs.is_empty() {
        return Pacing::Top;
    }
    if depth <= 1 || rng.random_bool(0.5) {
        return if rng.random_bool(0.1) {
            Pacing::Top
        } else {
            Pacing::input(inputs.choose(rng).unwrap().clone())
        };
    }
    let lhs = random_pacing(rng, inputs, depth - 1);
    let rhs = random_pacing(rng, inputs, depth - 1);
    if rng.random_bool(0.5) {
        Pacing::and(lhs, rhs)
    } else {
        Pacing::or(lhs, rhs)
    }
}

/// A stream whose cells are ⊥ with probability `p_undefined`, otherwise a
/// value from `domain`.
pub fn random_stream<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: usize,
    domain: &[Value],
    p_undefined: f64,
) -> FiniteStream {
    FiniteStream::new(
        (0..horizon)
            .map(|_| if rng.random_bool(p_undefined) { None } else { domain.choose(rng).copied() })
            .collect(),
    )
}

pub fn random_stream_map<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[Ident],
    horizon: usize,
    domain: &[Value],
    p_undefined: f64,
) -> StreamMap {
    let mut map = StreamMap::new(horizon);
    for name in names {
        map.insert(name.clone(), random_stream(rng, horizon, domain, p_undefined)).expect("horizon matches");
    }
    map
}

/// A partial map: each name is kept with probability `p_present`.
pub fn random_partial_map<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[Ident],
    horizon: usize,
    domain: &[Value],
    p_present: f64,
) -> StreamMap {
    let kept: Vec<Ident> = names.iter().filter(|_| rng.random_bool(p_present)).cloned().collect();
    random_stream_map(rng, &kept, horizon, domain, 0.3)
}
