//! Denotational semantics over finite horizons.
//!
//! A stream is a finite sequence of optional integers, `None` standing for an
//! undefined cell (⊥). All definitions quantify over time points `n < T`
//! where `T` is the horizon shared by every stream of one evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ast::{BinOp, Ident, Pacing, Spec, StreamExpr};

pub type Value = i64;

/// `Some(v)` or ⊥.
pub type OptVal = Option<Value>;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteStream(Vec<OptVal>);

impl FiniteStream {
    pub fn new(cells: Vec<OptVal>) -> Self {
        FiniteStream(cells)
    }

    /// A stream of `horizon` undefined cells.
    pub fn undefined(horizon: usize) -> Self {
        FiniteStream(vec![None; horizon])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: usize) -> OptVal {
        self.0[n]
    }

    pub fn set(&mut self, n: usize, v: OptVal) {
        self.0[n] = v;
    }

    pub fn cells(&self) -> &[OptVal] {
        &self.0
    }

    pub fn is_defined(&self, n: usize) -> bool {
        self.0[n].is_some()
    }

    pub fn defined_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.is_defined(n)).collect()
    }

    pub fn truncated(&self, horizon: usize) -> Self {
        FiniteStream(self.0[..horizon].to_vec())
    }
}

impl From<Vec<OptVal>> for FiniteStream {
    fn from(cells: Vec<OptVal>) -> Self {
        FiniteStream(cells)
    }
}

impl fmt::Display for FiniteStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match c {
                Some(v) => write!(f, "{v}")?,
                None => f.write_str("⊥")?,
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for FiniteStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid stream cell `{0}`")]
pub struct StreamSyntaxError(pub String);

/// Parses `[⊥,7,⊥]`; brackets are optional and `_` also denotes ⊥.
impl FromStr for FiniteStream {
    type Err = StreamSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let s = s.strip_prefix('[').unwrap_or(s);
        let s = s.strip_suffix(']').unwrap_or(s);
        if s.trim().is_empty() {
            return Ok(FiniteStream::default());
        }
        s.split(',')
            .map(|cell| match cell.trim() {
                "⊥" | "_" => Ok(None),
                t => t.parse().map(Some).map_err(|_| StreamSyntaxError(t.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FiniteStream)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stream `{name}` has length {found}, expected horizon {expected}")]
pub struct HorizonMismatch {
    pub name: Ident,
    pub expected: usize,
    pub found: usize,
}

/// Streams keyed by name, all of one horizon.
///
/// Used for input maps, total output maps and partial output maps alike; a
/// partial map simply omits the names outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamMap {
    horizon: usize,
    streams: BTreeMap<Ident, FiniteStream>,
}

pub type InMap = StreamMap;
pub type OutMap = StreamMap;
pub type ParMap = StreamMap;

impl StreamMap {
    pub fn new(horizon: usize) -> Self {
        StreamMap { horizon, streams: BTreeMap::new() }
    }

    pub fn from_streams(
        horizon: usize,
        streams: impl IntoIterator<Item = (Ident, FiniteStream)>,
    ) -> Result<Self, HorizonMismatch> {
        let mut map = StreamMap::new(horizon);
        for (name, w) in streams {
            map.insert(name, w)?;
        }
        Ok(map)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn insert(&mut self, name: Ident, w: FiniteStream) -> Result<(), HorizonMismatch> {
        if w.len() != self.horizon {
            return Err(HorizonMismatch { name, expected: self.horizon, found: w.len() });
        }
        self.streams.insert(name, w);
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Option<FiniteStream> {
        self.streams.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&FiniteStream> {
        self.streams.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut FiniteStream> {
        self.streams.get_mut(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.streams.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> + '_ {
        self.streams.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &FiniteStream)> + '_ {
        self.streams.iter()
    }

    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    /// The same map restricted to the first `horizon` time points.
    pub fn truncated(&self, horizon: usize) -> Self {
        assert!(horizon <= self.horizon);
        StreamMap {
            horizon,
            streams: self.streams.iter().map(|(k, w)| (k.clone(), w.truncated(horizon))).collect(),
        }
    }
}

/// Last defined value of `w` at or before `n`.
pub fn last(w: &FiniteStream, n: usize) -> OptVal {
    assert!(n < w.len(), "time point {n} outside horizon {}", w.len());
    w.cells()[..=n].iter().rev().find_map(|c| *c)
}

/// `Last(w, n)` if defined, otherwise the default `v`.
pub fn hold_op(w: &FiniteStream, n: usize, v: OptVal) -> OptVal {
    last(w, n).or(v)
}

/// ⊥ when `w(n)` is ⊥; else the last defined value strictly before `n`, or `v`.
pub fn prev_op(w: &FiniteStream, n: usize, v: OptVal) -> OptVal {
    assert!(n < w.len(), "time point {n} outside horizon {}", w.len());
    if !w.is_defined(n) {
        return None;
    }
    prev_before(w, n, v)
}

/// The value a `prev` access yields at `n` once `w(n)` is known to be defined.
fn prev_before(w: &FiniteStream, n: usize, v: OptVal) -> OptVal {
    match n.checked_sub(1).and_then(|m| last(w, m)) {
        Some(x) => Some(x),
        None => v,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("arithmetic overflow in `{lhs} {op} {rhs}` at time {time}")]
    Overflow { op: BinOp, lhs: Value, rhs: Value, time: usize },
    #[error("stream `{0}` is not bound")]
    Unbound(Ident),
    #[error("`{name}` is read at time {time} before its value for that time point is computed")]
    NotYetComputed { name: Ident, time: usize },
}

/// How a name resolves during evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Slot<'a> {
    /// A fully known stream.
    Ready(&'a FiniteStream),
    /// An output outside the domain of a partial map; every access is ⊥.
    Absent,
    /// The output currently being computed: cells before `n` are final and
    /// cell `n` is known to become defined. Only `prev` may read it.
    InProgress(&'a FiniteStream),
    /// An output whose cell at `n` has not been computed yet.
    Pending,
}

pub(crate) trait Env {
    fn slot(&self, name: &Ident) -> Result<Slot<'_>, EvalError>;
}

pub(crate) fn eval_in(e: &StreamExpr, env: &impl Env, n: usize) -> Result<OptVal, EvalError> {
    let pending = |name: &Ident| EvalError::NotYetComputed { name: name.clone(), time: n };
    Ok(match e {
        StreamExpr::Const(v) => Some(*v),
        StreamExpr::Var(x) => match env.slot(x)? {
            Slot::Ready(w) => w.get(n),
            Slot::Absent => None,
            Slot::InProgress(_) | Slot::Pending => return Err(pending(x)),
        },
        StreamExpr::Prev { target, default } => {
            let slot = env.slot(target)?;
            let v = eval_in(default, env, n)?;
            match slot {
                Slot::Ready(w) => prev_op(w, n, v),
                Slot::Absent => None,
                Slot::InProgress(w) => prev_before(w, n, v),
                Slot::Pending => return Err(pending(target)),
            }
        }
        StreamExpr::Hold { target, default } => {
            let slot = env.slot(target)?;
            let v = eval_in(default, env, n)?;
            match slot {
                Slot::Ready(w) => hold_op(w, n, v),
                Slot::Absent => None,
                Slot::InProgress(_) | Slot::Pending => return Err(pending(target)),
            }
        }
        StreamExpr::BinOp { op, lhs, rhs } => {
            let l = eval_in(lhs, env, n)?;
            let r = eval_in(rhs, env, n)?;
            match (l, r) {
                (Some(l), Some(r)) => {
                    Some(op.apply(l, r).ok_or(EvalError::Overflow { op: *op, lhs: l, rhs: r, time: n })?)
                }
                _ => None,
            }
        }
    })
}

struct TotalEnv<'a> {
    rho_in: &'a InMap,
    rho_out: &'a OutMap,
}

impl Env for TotalEnv<'_> {
    fn slot(&self, name: &Ident) -> Result<Slot<'_>, EvalError> {
        self.rho_in
            .get(name.as_str())
            .or_else(|| self.rho_out.get(name.as_str()))
            .map(Slot::Ready)
            .ok_or_else(|| EvalError::Unbound(name.clone()))
    }
}

struct PartialEnv<'a> {
    rho_in: &'a InMap,
    rho_par: &'a ParMap,
}

impl Env for PartialEnv<'_> {
    fn slot(&self, name: &Ident) -> Result<Slot<'_>, EvalError> {
        Ok(self
            .rho_in
            .get(name.as_str())
            .or_else(|| self.rho_par.get(name.as_str()))
            .map_or(Slot::Absent, Slot::Ready))
    }
}

/// `⟦e⟧(n)` under total input and output maps.
///
/// Panics if `n` is outside the horizon.
pub fn eval_expr(e: &StreamExpr, rho_in: &InMap, rho_out: &OutMap, n: usize) -> Result<OptVal, EvalError> {
    assert!(n < rho_in.horizon(), "time point {n} outside horizon {}", rho_in.horizon());
    eval_in(e, &TotalEnv { rho_in, rho_out }, n)
}

/// Partial semantics: any access (direct, `prev` or `hold`) to a name that is
/// neither an input nor in the domain of `rho_par` is ⊥.
pub fn eval_expr_partial(
    e: &StreamExpr,
    rho_in: &InMap,
    rho_par: &ParMap,
    n: usize,
) -> Result<OptVal, EvalError> {
    eval_in(e, &PartialEnv { rho_in, rho_par }, n)
}

/// The time points below the horizon at which `tau` is active.
pub fn pacing_points(tau: &Pacing, rho_in: &InMap) -> Vec<usize> {
    (0..rho_in.horizon()).filter(|&n| active_at(tau, rho_in, n)).collect()
}

/// Whether `n` belongs to the points denoted by `tau`.
pub fn active_at(tau: &Pacing, rho_in: &InMap, n: usize) -> bool {
    tau.holds(&|x| rho_in.get(x.as_str()).is_some_and(|w| w.is_defined(n)))
}

/// `w` is defined exactly at the points of `tau`.
pub fn well_paced(w: &FiniteStream, tau: &Pacing, rho_in: &InMap) -> bool {
    w.len() == rho_in.horizon() && (0..w.len()).all(|n| w.is_defined(n) == active_at(tau, rho_in, n))
}

/// `w1 ≼ w2`: wherever `w1` is defined, `w2` holds the same value.
pub fn less_defined(w1: &FiniteStream, w2: &FiniteStream) -> bool {
    assert_eq!(w1.len(), w2.len(), "streams of different horizons");
    w1.cells().iter().zip(w2.cells()).all(|(a, b)| a.is_none() || a == b)
}

/// Whether every equation holds at time `n`: the output is defined iff its
/// pacing is active, and when defined it equals the body's value.
pub fn satisfies_at(spec: &Spec, rho_in: &InMap, rho_out: &OutMap, n: usize) -> Result<bool, EvalError> {
    for eq in &spec.equations {
        let w = rho_out.get(eq.output.as_str()).ok_or_else(|| EvalError::Unbound(eq.output.clone()))?;
        let cell = w.get(n);
        if cell.is_some() != active_at(&eq.pacing, rho_in, n) {
            return Ok(false);
        }
        if let Some(v) = cell {
            if eval_expr(&eq.body, rho_in, rho_out, n)? != Some(v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(ρ_in, ρ_out) ∈ ⟦spec⟧` restricted to the horizon.
pub fn satisfies(spec: &Spec, rho_in: &InMap, rho_out: &OutMap) -> Result<bool, EvalError> {
    for eq in &spec.equations {
        let w = rho_out.get(eq.output.as_str()).ok_or_else(|| EvalError::Unbound(eq.output.clone()))?;
        if !well_paced(w, &eq.pacing, rho_in) {
            return Ok(false);
        }
        let mut body = Vec::with_capacity(rho_in.horizon());
        for n in 0..rho_in.horizon() {
            body.push(eval_expr(&eq.body, rho_in, rho_out, n)?);
        }
        if !less_defined(w, &FiniteStream::new(body)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ρ_par · ρ_tot`: streams of `rho_par` where present, `rho_tot` elsewhere.
pub fn totalize(rho_par: &ParMap, rho_tot: &OutMap) -> OutMap {
    let mut out = rho_tot.clone();
    for (name, w) in rho_par.iter() {
        out.streams.insert(name.clone(), w.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;
    use crate::parser::parse_spec;

    fn w(s: &str) -> FiniteStream {
        s.parse().unwrap()
    }

    fn map(horizon: usize, entries: &[(&str, &str)]) -> StreamMap {
        StreamMap::from_streams(horizon, entries.iter().map(|(k, v)| (ident(k), w(v)))).unwrap()
    }

    #[test]
    fn stream_operators() {
        assert_eq!(last(&w("[⊥,7,⊥]"), 2), Some(7));
        assert_eq!(last(&w("[⊥,⊥]"), 1), None);
        assert_eq!(last(&w("[3,⊥,5]"), 2), Some(5));

        assert_eq!(hold_op(&w("[⊥,7,⊥]"), 2, Some(0)), Some(7));
        assert_eq!(hold_op(&w("[⊥,⊥]"), 1, Some(0)), Some(0));
        assert_eq!(hold_op(&w("[⊥,⊥]"), 0, None), None);

        assert_eq!(prev_op(&w("[4,⊥,9]"), 2, Some(0)), Some(4));
        assert_eq!(prev_op(&w("[4,⊥,9]"), 1, Some(0)), None);
        assert_eq!(prev_op(&w("[4,⊥,9]"), 0, Some(0)), Some(0));
    }

    #[test]
    #[should_panic]
    fn last_outside_horizon_panics() {
        last(&w("[1]"), 1);
    }

    #[test]
    fn expressions() {
        let e = |s: &str| {
            parse_spec(&format!("input a input b output z @ true := {s}")).unwrap().equations[0].body.clone()
        };
        let empty = StreamMap::new(1);
        let ins = map(1, &[("a", "[⊥]"), ("b", "[5]")]);
        assert_eq!(eval_expr(&e("1 + 2"), &ins, &empty, 0), Ok(Some(3)));
        assert_eq!(eval_expr(&e("a + b"), &ins, &empty, 0), Ok(None));
        let ins = map(2, &[("a", "[⊥,4]"), ("b", "[1,1]")]);
        let empty = StreamMap::new(2);
        assert_eq!(eval_expr(&e("a.hold(or: 0)"), &ins, &empty, 0), Ok(Some(0)));
        assert_eq!(eval_expr(&e("a.hold(or: 0)"), &ins, &empty, 1), Ok(Some(4)));
        assert_eq!(eval_expr(&e("b < 2"), &ins, &empty, 1), Ok(Some(1)));
        assert_eq!(eval_expr(&e("b == 2"), &ins, &empty, 1), Ok(Some(0)));
    }

    #[test]
    fn overflow_is_reported() {
        let ins = map(1, &[("a", "[9223372036854775807]")]);
        let e = StreamExpr::binop(BinOp::Add, StreamExpr::Var(ident("a")), StreamExpr::Const(1));
        assert!(matches!(
            eval_expr(&e, &ins, &StreamMap::new(1), 0),
            Err(EvalError::Overflow { op: BinOp::Add, time: 0, .. })
        ));
    }

    #[test]
    fn partial_semantics() {
        let ins = map(2, &[("a", "[1,2]")]);
        let empty = StreamMap::new(2);
        let x = StreamExpr::Var(ident("x"));
        assert_eq!(eval_expr_partial(&x, &ins, &empty, 0), Ok(None));
        let held = StreamExpr::hold(ident("x"), StreamExpr::Const(3));
        assert_eq!(eval_expr_partial(&held, &ins, &empty, 1), Ok(None));
        let pure = StreamExpr::binop(BinOp::Add, StreamExpr::Var(ident("a")), StreamExpr::Const(1));
        let full = map(2, &[("x", "[0,0]")]);
        assert_eq!(eval_expr_partial(&pure, &ins, &empty, 1), eval_expr(&pure, &ins, &full, 1));
        let present = map(2, &[("x", "[⊥,6]")]);
        assert_eq!(eval_expr_partial(&held, &ins, &present, 0), Ok(Some(3)));
        assert_eq!(eval_expr_partial(&held, &ins, &present, 1), Ok(Some(6)));
    }

    #[test]
    fn pacing_denotation() {
        let ins = map(3, &[("a", "[0,⊥,0]"), ("b", "[⊥,0,0]")]);
        let a = || Pacing::In(ident("a"));
        let b = || Pacing::In(ident("b"));
        assert_eq!(pacing_points(&Pacing::Top, &ins), vec![0, 1, 2]);
        assert_eq!(pacing_points(&Pacing::or(a(), b()), &ins), vec![0, 1, 2]);
        assert_eq!(pacing_points(&Pacing::and(a(), b()), &ins), vec![2]);

        assert!(well_paced(&w("[1,⊥,2]"), &a(), &ins));
        assert!(!well_paced(&w("[1,1,2]"), &a(), &ins));
        assert!(!well_paced(&w("[⊥,⊥,⊥]"), &Pacing::Top, &ins));
    }

    #[test]
    fn ordering() {
        assert!(less_defined(&w("[⊥,5]"), &w("[9,5]")));
        assert!(!less_defined(&w("[4,5]"), &w("[9,5]")));
        assert!(less_defined(&w("[4,⊥]"), &w("[4,⊥]")));
    }

    #[test]
    fn satisfaction() {
        let spec = parse_spec("input a output x @ a := a").unwrap();
        let ins = map(2, &[("a", "[1,⊥]")]);
        assert_eq!(satisfies(&spec, &ins, &map(2, &[("x", "[1,⊥]")])), Ok(true));
        assert_eq!(satisfies(&spec, &ins, &map(2, &[("x", "[1,1]")])), Ok(false));
        assert_eq!(satisfies(&spec, &ins, &map(2, &[("x", "[2,⊥]")])), Ok(false));
    }

    #[test]
    fn totalization() {
        let tot = map(2, &[("x", "[1,1]"), ("y", "[2,2]")]);
        assert_eq!(totalize(&StreamMap::new(2), &tot), tot);
        let par = map(2, &[("x", "[⊥,7]")]);
        let t = totalize(&par, &tot);
        assert_eq!(t.get("x"), Some(&w("[⊥,7]")));
        assert_eq!(t.get("y"), Some(&w("[2,2]")));
    }

    #[test]
    fn stream_text_round_trip() {
        let s = w("[⊥,7,-2]");
        assert_eq!(s.to_string(), "[⊥,7,-2]");
        assert_eq!(w("_, 7, -2"), s);
        assert!("[1,x]".parse::<FiniteStream>().is_err());
    }
}
