//! Brute-force consistency checking on bounded horizons.
//!
//! A specification is consistent when every input map admits an output map
//! satisfying all equations. The oracle enumerates (or samples) input maps of
//! a fixed horizon over a finite value domain and searches for a satisfying
//! output map for each one, using nothing but the denotational
//! [`satisfies_at`]/[`satisfies`] predicates. It never consults the type
//! checker or the evaluator.
//!
//! Pacing fixes which output cells are defined, so only their values are
//! unknown. The default [`SearchStrategy::Guided`] search walks time points in
//! order (the value of an expression at `n` only depends on cells at or
//! before `n`). Within one time point, a cell whose body does not depend on
//! itself through same-time reads has exactly one admissible value, namely
//! its body's value; cells on a same-time dependency cycle are enumerated over
//! a candidate set and backtracked over. [`SearchStrategy::Exhaustive`]
//! enumerates all assignments of domain values to the forced cells.
//!
//! Results are evidence for the given horizon and domain only.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ast::{BinOp, Ident, Spec, StreamExpr};
use crate::semantics::{
    active_at, eval_expr, satisfies, satisfies_at, EvalError, FiniteStream, InMap, OutMap, StreamMap, Value,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPatterns {
    /// Every input map over the domain.
    All,
    /// `count` maps drawn uniformly at random, reproducibly from `seed`.
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    #[default]
    Guided,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    horizon: usize,
    domain: BTreeSet<Value>,
    pub patterns: InputPatterns,
    pub strategy: SearchStrategy,
    /// Largest input space enumerated with [`InputPatterns::All`], and largest
    /// assignment space tried by the exhaustive search.
    pub space_cap: u128,
    /// Largest candidate value set for one search.
    pub candidate_cap: usize,
    /// Largest number of expression evaluations spent on one input map.
    pub step_cap: u64,
}

pub const DEFAULT_SPACE_CAP: u128 = 1_000_000;

impl OracleConfig {
    pub fn new(horizon: usize, domain: impl IntoIterator<Item = Value>) -> Result<Self, OracleError> {
        let domain: BTreeSet<Value> = domain.into_iter().collect();
        if horizon == 0 {
            return Err(OracleError::ZeroHorizon);
        }
        if domain.is_empty() {
            return Err(OracleError::EmptyDomain);
        }
        Ok(OracleConfig {
            horizon,
            domain,
            patterns: InputPatterns::All,
            strategy: SearchStrategy::Guided,
            space_cap: DEFAULT_SPACE_CAP,
            candidate_cap: 64,
            step_cap: 10_000_000,
        })
    }

    pub fn sampled(mut self, count: usize, seed: u64) -> Self {
        self.patterns = InputPatterns::Sample { count, seed };
        self
    }

    pub fn with_strategy(mut self, strategy: SearchStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn domain(&self) -> &BTreeSet<Value> {
        &self.domain
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("value domain is empty")]
    EmptyDomain,
    #[error("{what} has {} elements, more than the cap of {cap}", size.map_or_else(|| "over 2^128".to_string(), |s| s.to_string()))]
    SpaceTooLarge { what: &'static str, size: Option<u128>, cap: u128 },
    #[error("output search exceeded {0} evaluation steps")]
    SearchBudgetExceeded(u64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("oracle produced an output map that fails the satisfaction check")]
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    ConsistentOnTested {
        inputs_checked: usize,
    },
    /// An input map for which no output map exists in the searched space.
    Counterexample {
        rho_in: InMap,
    },
}

/// The input maps an oracle run visits.
#[derive(Debug, Clone)]
pub struct InputSpace {
    inputs: Vec<Ident>,
    horizon: usize,
    domain: Vec<Value>,
    source: Source,
}

#[derive(Debug, Clone)]
enum Source {
    All { count: usize },
    Sample(Vec<InMap>),
}

impl InputSpace {
    pub fn len(&self) -> usize {
        match &self.source {
            Source::All { count } => *count,
            Source::Sample(maps) => maps.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th map in enumeration order.
    pub fn get(&self, i: usize) -> InMap {
        match &self.source {
            Source::Sample(maps) => maps[i].clone(),
            Source::All { .. } => {
                // Mixed-radix digits, most significant = first input at time 0.
                let radix = self.domain.len() + 1;
                let cells = self.inputs.len() * self.horizon;
                let mut digits = vec![0usize; cells];
                let mut rest = i;
                for d in digits.iter_mut().rev() {
                    *d = rest % radix;
                    rest /= radix;
                }
                self.build(&digits)
            }
        }
    }

    fn build(&self, digits: &[usize]) -> InMap {
        let mut map = StreamMap::new(self.horizon);
        for (k, input) in self.inputs.iter().enumerate() {
            let cells = digits[k * self.horizon..(k + 1) * self.horizon]
                .iter()
                .map(|&d| d.checked_sub(1).map(|j| self.domain[j]))
                .collect();
            map.insert(input.clone(), FiniteStream::new(cells)).expect("horizon matches");
        }
        map
    }

    pub fn iter(&self) -> impl Iterator<Item = InMap> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Every input map (or a seeded sample of them) over `cfg`'s horizon and
/// domain. Each cell is either ⊥ or a domain value.
pub fn enumerate_inputs(inputs: &[Ident], cfg: &OracleConfig) -> Result<InputSpace, OracleError> {
    let domain: Vec<Value> = cfg.domain.iter().copied().collect();
    let mut space = InputSpace {
        inputs: inputs.to_vec(),
        horizon: cfg.horizon,
        domain,
        source: Source::All { count: 0 },
    };
    match cfg.patterns {
        InputPatterns::All => {
            let radix = space.domain.len() as u128 + 1;
            let cells = u32::try_from(inputs.len() * cfg.horizon).unwrap_or(u32::MAX);
            let size = radix.checked_pow(cells);
            match size {
                Some(s) if s <= cfg.space_cap && usize::try_from(s).is_ok() => {
                    space.source = Source::All { count: s as usize };
                }
                _ => {
                    return Err(OracleError::SpaceTooLarge { what: "input space", size, cap: cfg.space_cap })
                }
            }
        }
        InputPatterns::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cells = inputs.len() * cfg.horizon;
            let maps = (0..count)
                .map(|_| {
                    let digits: Vec<usize> =
                        (0..cells).map(|_| rng.random_range(0..=space.domain.len())).collect();
                    space.build(&digits)
                })
                .collect();
            space.source = Source::Sample(maps);
        }
    }
    Ok(space)
}

/// Searches for an output map satisfying `spec` under `rho_in`.
pub fn find_solution(spec: &Spec, rho_in: &InMap, cfg: &OracleConfig) -> Result<Option<OutMap>, OracleError> {
    let found = match cfg.strategy {
        SearchStrategy::Guided => GuidedSearch::new(spec, rho_in, cfg).run()?,
        SearchStrategy::Exhaustive => exhaustive_search(spec, rho_in, cfg)?,
    };
    if let Some(out) = &found {
        if !satisfies(spec, rho_in, out)? {
            return Err(OracleError::Internal);
        }
    }
    Ok(found)
}

/// Finite consistency check: the first input map without a solution (in
/// enumeration order) becomes the counterexample.
pub fn check_consistency(spec: &Spec, cfg: &OracleConfig) -> Result<OracleVerdict, OracleError> {
    let space = enumerate_inputs(&spec.inputs, cfg)?;
    let first_failure = (0..space.len())
        .into_par_iter()
        .filter_map(|i| {
            let rho_in = space.get(i);
            match find_solution(spec, &rho_in, cfg) {
                Ok(Some(_)) => None,
                Ok(None) => Some(Ok(rho_in)),
                Err(e) => Some(Err(e)),
            }
        })
        .find_first(|_| true);
    match first_failure {
        None => Ok(OracleVerdict::ConsistentOnTested { inputs_checked: space.len() }),
        Some(Ok(rho_in)) => Ok(OracleVerdict::Counterexample { rho_in }),
        Some(Err(e)) => Err(e),
    }
}

/// Names read at the current time point: direct and hold accesses. A `prev`
/// access only reads the target's definedness now, which pacing fixes.
fn same_time_reads(e: &StreamExpr) -> BTreeSet<&Ident> {
    let mut out = BTreeSet::new();
    e.for_each_access(&mut |x, kind| {
        if kind != crate::ast::AccessKind::Prev {
            out.insert(x);
        }
    });
    out
}

struct GuidedSearch<'a> {
    spec: &'a Spec,
    rho_in: &'a InMap,
    cfg: &'a OracleConfig,
    out: OutMap,
    reads: Vec<BTreeSet<usize>>,
    base: BTreeSet<Value>,
    steps: u64,
}

/// A group of cells at one time point solved together.
struct Group {
    members: Vec<usize>,
    cyclic: bool,
}

impl<'a> GuidedSearch<'a> {
    fn new(spec: &'a Spec, rho_in: &'a InMap, cfg: &'a OracleConfig) -> Self {
        let mut out = OutMap::new(rho_in.horizon());
        for eq in &spec.equations {
            out.insert(eq.output.clone(), FiniteStream::undefined(rho_in.horizon()))
                .expect("horizon matches");
        }
        let reads = spec
            .equations
            .iter()
            .map(|eq| {
                let names = same_time_reads(&eq.body);
                spec.equations
                    .iter()
                    .enumerate()
                    .filter(|(_, other)| names.contains(&other.output))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let base = closed_domain(spec, &cfg.domain, cfg.candidate_cap);
        GuidedSearch { spec, rho_in, cfg, out, reads, base, steps: 0 }
    }

    fn run(mut self) -> Result<Option<OutMap>, OracleError> {
        if self.rho_in.horizon() == 0 || self.solve_time(0)? {
            Ok(Some(self.out))
        } else {
            Ok(None)
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > self.cfg.step_cap {
            return Err(OracleError::SearchBudgetExceeded(self.cfg.step_cap));
        }
        Ok(())
    }

    /// Same-time dependency groups among the active outputs, dependencies first.
    fn groups(&self, active: &[usize]) -> Vec<Group> {
        let n = self.spec.equations.len();
        let is_active: Vec<bool> = (0..n).map(|i| active.contains(&i)).collect();
        // reach[i][j]: i reads j (transitively) through active outputs.
        let mut reach = vec![vec![false; n]; n];
        for &i in active {
            for &j in &self.reads[i] {
                if is_active[j] {
                    reach[i][j] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    let via = reach[k].clone();
                    for (r, v) in reach[i].iter_mut().zip(via) {
                        *r |= v;
                    }
                }
            }
        }
        let mut assigned = vec![false; n];
        let mut groups = Vec::new();
        while let Some(&i) = active
            .iter()
            .find(|&&i| !assigned[i] && active.iter().all(|&j| assigned[j] || !reach[i][j] || reach[j][i]))
        {
            let members: Vec<usize> =
                active.iter().copied().filter(|&j| j == i || (reach[i][j] && reach[j][i])).collect();
            for &m in &members {
                assigned[m] = true;
            }
            groups.push(Group { cyclic: reach[i][i], members });
        }
        groups
    }

    fn solve_time(&mut self, n: usize) -> Result<bool, OracleError> {
        if n == self.rho_in.horizon() {
            return Ok(true);
        }
        let active: Vec<usize> = (0..self.spec.equations.len())
            .filter(|&i| active_at(&self.spec.equations[i].pacing, self.rho_in, n))
            .collect();
        let groups = self.groups(&active);
        self.solve_group(n, &active, &groups, 0)
    }

    fn set(&mut self, i: usize, n: usize, v: Option<Value>) {
        let name = self.spec.equations[i].output.as_str();
        self.out.get_mut(name).expect("output buffer").set(n, v);
    }

    fn body_value(&mut self, i: usize, n: usize) -> Result<Option<Value>, OracleError> {
        self.tick()?;
        Ok(eval_expr(&self.spec.equations[i].body, self.rho_in, &self.out, n)?)
    }

    /// [`Self::body_value`] for a guessed assignment: overflow only rules the
    /// guess out.
    fn guessed_body_value(&mut self, i: usize, n: usize) -> Result<Option<Value>, OracleError> {
        match self.body_value(i, n) {
            Err(OracleError::Eval(EvalError::Overflow { .. })) => Ok(None),
            other => other,
        }
    }

    fn solve_group(
        &mut self,
        n: usize,
        active: &[usize],
        groups: &[Group],
        k: usize,
    ) -> Result<bool, OracleError> {
        if k == 0 {
            // Placeholders mark the active cells as defined so `prev` accesses
            // see the right definedness; each is overwritten before it is read.
            for i in 0..self.spec.equations.len() {
                let v = active.contains(&i).then_some(0);
                self.set(i, n, v);
            }
        }
        let Some(group) = groups.get(k) else {
            return self.solve_time(n + 1);
        };
        if !group.cyclic {
            let i = group.members[0];
            let Some(v) = self.body_value(i, n)? else {
                return Ok(false);
            };
            self.set(i, n, Some(v));
            return self.solve_group(n, active, groups, k + 1);
        }

        let candidates = self.candidates(n, &group.members)?;
        let size = (candidates.len() as u128).checked_pow(group.members.len() as u32);
        if size.is_none_or(|s| s > self.cfg.space_cap) {
            return Err(OracleError::SpaceTooLarge {
                what: "cyclic output assignment space",
                size,
                cap: self.cfg.space_cap,
            });
        }
        let mut digits = vec![0usize; group.members.len()];
        loop {
            for (&i, &d) in group.members.iter().zip(&digits) {
                self.set(i, n, Some(candidates[d]));
            }
            let mut consistent = true;
            for &i in &group.members {
                let expected = self.out.get(self.spec.equations[i].output.as_str()).unwrap().get(n);
                if self.guessed_body_value(i, n)? != expected {
                    consistent = false;
                    break;
                }
            }
            if consistent && self.solve_group(n, active, groups, k + 1)? {
                return Ok(true);
            }
            if !advance(&mut digits, candidates.len()) {
                return Ok(false);
            }
            // Deeper levels may have overwritten this time point's later groups;
            // they are recomputed from scratch on the next attempt.
        }
    }

    /// Values tried for cells on a same-time cycle: the closed domain (see
    /// [`closed_domain`]), every value seen so far, widened by body values computed
    /// from those candidates (one round per cycle member).
    fn candidates(&mut self, n: usize, members: &[usize]) -> Result<Vec<Value>, OracleError> {
        let mut pool = self.base.clone();
        for (_, w) in self.rho_in.iter().chain(self.out.iter()) {
            pool.extend(w.cells()[..n].iter().flatten());
        }
        for _ in 0..members.len() {
            let current: Vec<Value> = pool.iter().copied().collect();
            let mut digits = vec![0usize; members.len()];
            loop {
                for (&i, &d) in members.iter().zip(&digits) {
                    self.set(i, n, Some(current[d]));
                }
                for &i in members {
                    if let Some(v) = self.guessed_body_value(i, n)? {
                        if pool.len() < self.cfg.candidate_cap {
                            pool.insert(v);
                        }
                    }
                }
                if !advance(&mut digits, current.len()) {
                    break;
                }
            }
        }
        Ok(pool.into_iter().collect())
    }
}

/// Odometer increment; false after the last combination.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// `domain ∪ constants`, closed under the operators used in `spec` until no
/// new values appear or `cap` values are reached.
pub fn closed_domain(spec: &Spec, domain: &BTreeSet<Value>, cap: usize) -> BTreeSet<Value> {
    let mut ops = BTreeSet::new();
    for eq in &spec.equations {
        collect_ops(&eq.body, &mut ops);
    }
    let mut values = domain.clone();
    values.extend(spec.constants());
    loop {
        let current: Vec<Value> = values.iter().copied().collect();
        let before = values.len();
        'grow: for &op in &ops {
            for &a in &current {
                for &b in &current {
                    if values.len() >= cap {
                        break 'grow;
                    }
                    if let Some(v) = BinOp::apply(op, a, b) {
                        values.insert(v);
                    }
                }
            }
        }
        if values.len() == before || values.len() >= cap {
            return values;
        }
    }
}

fn collect_ops(e: &StreamExpr, ops: &mut BTreeSet<BinOp>) {
    match e {
        StreamExpr::Const(_) | StreamExpr::Var(_) => {}
        StreamExpr::Prev { default, .. } | StreamExpr::Hold { default, .. } => collect_ops(default, ops),
        StreamExpr::BinOp { op, lhs, rhs } => {
            ops.insert(*op);
            collect_ops(lhs, ops);
            collect_ops(rhs, ops);
        }
    }
}

/// Tries every assignment of closed-domain values to the pacing-forced cells,
/// ordered lexicographically by (output, time, value).
fn exhaustive_search(spec: &Spec, rho_in: &InMap, cfg: &OracleConfig) -> Result<Option<OutMap>, OracleError> {
    let values: Vec<Value> = closed_domain(spec, &cfg.domain, cfg.candidate_cap).into_iter().collect();
    let mut out = OutMap::new(rho_in.horizon());
    let mut cells = Vec::new();
    for eq in &spec.equations {
        out.insert(eq.output.clone(), FiniteStream::undefined(rho_in.horizon())).expect("horizon matches");
        for n in 0..rho_in.horizon() {
            if active_at(&eq.pacing, rho_in, n) {
                cells.push((eq.output.clone(), n));
            }
        }
    }
    let size = (values.len() as u128).checked_pow(cells.len() as u32);
    if size.is_none_or(|s| s > cfg.space_cap) {
        return Err(OracleError::SpaceTooLarge { what: "output assignment space", size, cap: cfg.space_cap });
    }
    let mut digits = vec![0usize; cells.len()];
    loop {
        for ((name, n), &d) in cells.iter().zip(&digits) {
            out.get_mut(name.as_str()).expect("output buffer").set(*n, Some(values[d]));
        }
        if (0..rho_in.horizon())
            .try_fold(true, |ok, n| Ok::<_, EvalError>(ok && satisfies_at(spec, rho_in, &out, n)?))?
        {
            return Ok(Some(out));
        }
        if !advance(&mut digits, values.len()) {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;
    use crate::parser::parse_spec;

    fn cfg(horizon: usize, domain: &[Value]) -> OracleConfig {
        OracleConfig::new(horizon, domain.iter().copied()).unwrap()
    }

    fn ins(horizon: usize, entries: &[(&str, &str)]) -> InMap {
        StreamMap::from_streams(horizon, entries.iter().map(|(k, v)| (ident(k), v.parse().unwrap()))).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let space = enumerate_inputs(&[ident("a")], &cfg(1, &[0])).unwrap();
        let maps: Vec<_> = space.iter().collect();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps[0], ins(1, &[("a", "[⊥]")]));
        assert_eq!(maps[1], ins(1, &[("a", "[0]")]));

        let space = enumerate_inputs(&[ident("a"), ident("b")], &cfg(2, &[0])).unwrap();
        assert_eq!(space.len(), 16);
        let distinct: BTreeSet<_> = space.iter().map(|m| format!("{m:?}")).collect();
        assert_eq!(distinct.len(), 16);

        assert_eq!(enumerate_inputs(&[], &cfg(3, &[0, 1])).unwrap().len(), 1);
    }

    #[test]
    fn sampling_is_reproducible() {
        let c = cfg(3, &[0, 1]).sampled(100, 7);
        let names = [ident("a"), ident("b")];
        let first: Vec<_> = enumerate_inputs(&names, &c).unwrap().iter().collect();
        let second: Vec<_> = enumerate_inputs(&names, &c).unwrap().iter().collect();
        assert_eq!(first.len(), 100);
        assert_eq!(first, second);
        let other: Vec<_> =
            enumerate_inputs(&names, &cfg(3, &[0, 1]).sampled(100, 8)).unwrap().iter().collect();
        assert_ne!(first, other);
    }

    #[test]
    fn space_cap() {
        let names: Vec<Ident> = (0..10).map(|i| ident(&format!("i{i}"))).collect();
        let err = enumerate_inputs(&names, &cfg(4, &[0, 1])).unwrap_err();
        assert!(matches!(err, OracleError::SpaceTooLarge { size: Some(s), .. } if s == 3u128.pow(40)));
    }

    #[test]
    fn config_validation() {
        assert_eq!(OracleConfig::new(0, [0]), Err(OracleError::ZeroHorizon));
        assert_eq!(OracleConfig::new(2, []), Err(OracleError::EmptyDomain));
    }

    #[test]
    fn solutions() {
        let spec = parse_spec("input a output x @ a := a").unwrap();
        let out = find_solution(&spec, &ins(1, &[("a", "[1]")]), &cfg(1, &[0, 1])).unwrap().unwrap();
        assert_eq!(out.get("x").unwrap().to_string(), "[1]");

        let invalid = parse_spec("input a input b output x @ b := b output y @ a := x").unwrap();
        let rho = ins(3, &[("a", "[⊥,0,0]"), ("b", "[0,0,⊥]")]);
        assert_eq!(find_solution(&invalid, &rho, &cfg(3, &[0])), Ok(None));

        let fixed = parse_spec("input a input b output x @ a := a output y @ b := x.hold(or: b)").unwrap();
        for rho in enumerate_inputs(&fixed.inputs, &cfg(2, &[0, 1])).unwrap().iter() {
            assert!(find_solution(&fixed, &rho, &cfg(2, &[0, 1])).unwrap().is_some());
        }
    }

    #[test]
    fn counter_values_escape_the_domain() {
        let spec = parse_spec("output x @ true := x.prev(or: 0) + 1").unwrap();
        let out = find_solution(&spec, &StreamMap::new(5), &cfg(5, &[0])).unwrap().unwrap();
        assert_eq!(out.get("x").unwrap().to_string(), "[1,2,3,4,5]");
    }

    #[test]
    fn same_time_cycles() {
        // any value works for x = y, y = x
        let free = parse_spec("input a output x @ a := y output y @ a := x").unwrap();
        let out = find_solution(&free, &ins(2, &[("a", "[1,1]")]), &cfg(2, &[0, 1])).unwrap().unwrap();
        assert_eq!(out.get("x"), out.get("y"));
        // x = x + 1 has no solution
        let none = parse_spec("input a output x @ a := x + 1").unwrap();
        assert_eq!(find_solution(&none, &ins(1, &[("a", "[0]")]), &cfg(1, &[0, 1])), Ok(None));
        // x = x * x has solutions 0 and 1 only
        let sq = parse_spec("input a output x @ a := x.hold(or: 5) * x").unwrap();
        let out = find_solution(&sq, &ins(1, &[("a", "[0]")]), &cfg(1, &[1, 3])).unwrap().unwrap();
        assert_eq!(out.get("x").unwrap().to_string(), "[1]");
        // the candidate set is bounded: widening from {3, 5} never reaches 0 or 1
        assert_eq!(find_solution(&sq, &ins(1, &[("a", "[0]")]), &cfg(1, &[3])), Ok(None));
    }

    #[test]
    fn consistency_verdicts() {
        let pair = parse_spec("input a input b output x @ a := a output y @ b := x").unwrap();
        let verdict = check_consistency(&pair, &cfg(2, &[0])).unwrap();
        let OracleVerdict::Counterexample { rho_in } = verdict else { panic!("expected counterexample") };
        // some point where b arrives but a does not
        let a = rho_in.get("a").unwrap();
        let b = rho_in.get("b").unwrap();
        assert!((0..2).any(|n| b.is_defined(n) && !a.is_defined(n)));
        assert_eq!(find_solution(&pair, &rho_in, &cfg(2, &[0])), Ok(None));

        let fixed = parse_spec("input a input b output x @ a := a output y @ b := x.hold(or: b)").unwrap();
        assert_eq!(
            check_consistency(&fixed, &cfg(2, &[0])),
            Ok(OracleVerdict::ConsistentOnTested { inputs_checked: 16 })
        );
        assert_eq!(
            check_consistency(&Spec::default(), &cfg(2, &[0])),
            Ok(OracleVerdict::ConsistentOnTested { inputs_checked: 1 })
        );
    }

    #[test]
    fn closure() {
        let spec = parse_spec("input a output x @ a := a + 1").unwrap();
        let d = closed_domain(&spec, &[0].into_iter().collect(), 5);
        assert_eq!(d, [0, 1, 2, 3, 4].into_iter().collect());
    }

    #[test]
    fn strategies_agree_on_small_cases() {
        let specs = [
            "input a input b output x @ a := a output y @ b := x",
            "input a input b output x @ a := a output y @ b := x.hold(or: b)",
            "input a output x @ a := y output y @ a := x",
            "input a output x @ a := x + 1",
            "input a input b output x @ a | b := a.hold(or: 0) * b.hold(or: 1)",
        ];
        for text in specs {
            let spec = parse_spec(text).unwrap();
            let c = cfg(2, &[0, 1]);
            for rho in enumerate_inputs(&spec.inputs, &c).unwrap().iter() {
                let guided = find_solution(&spec, &rho, &c).unwrap();
                let exhaustive =
                    find_solution(&spec, &rho, &c.clone().with_strategy(SearchStrategy::Exhaustive)).unwrap();
                assert_eq!(guided.is_some(), exhaustive.is_some(), "{text} on {rho:?}");
            }
        }
    }
}
