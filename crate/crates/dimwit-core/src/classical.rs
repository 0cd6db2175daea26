//! Exact classical bounds C_d by exhaustive enumeration of deterministic
//! strategies.
//!
//! A deterministic d-dimensional strategy assigns each preparation a dit and
//! each measurement a response function from dits to outcomes. The witness is
//! linear, so the classical set is a polytope whose vertices are exactly
//! these strategies and the maximum over them is the exact bound. For a fixed
//! assignment the objective splits into independent per-measurement sums, so
//! the response part of the product space is scanned measurement by
//! measurement without changing which strategies are covered.

use serde_json::{json, Value};

use crate::bounds::{BoundResult, Model, Realization};
use crate::error::Error;
use crate::witness::{ProbabilityTable, WitnessSpec, GENERATED_TOL};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Refuse enumeration above this many deterministic strategies unless the
/// caller raises the cap explicitly.
pub const DEFAULT_STRATEGY_CAP: u128 = 1_000_000_000;

/// Deterministic classical strategy: dit per preparation, response function
/// per measurement. All indices 0-based internally; JSON output is 1-based
/// with dichotomic outcomes labeled +/-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    pub d: usize,
    /// Preparation x -> dit in 0..d.
    pub assignment: Vec<usize>,
    /// Measurement y -> (dit -> outcome index in 0..k).
    pub responses: Vec<Vec<usize>>,
}

impl ClassicalStrategy {
    fn validate(&self, n: usize, m: usize, k: usize) -> Result<(), Error> {
        if self.d == 0 {
            return Err(Error::MalformedStrategy("d must be >= 1".into()));
        }
        if self.assignment.len() != n {
            return Err(Error::MalformedStrategy(format!(
                "assignment covers {} preparations, expected {n}",
                self.assignment.len()
            )));
        }
        if self.assignment.iter().any(|&a| a >= self.d) {
            return Err(Error::MalformedStrategy("dit value out of range".into()));
        }
        if self.responses.len() != m {
            return Err(Error::MalformedStrategy(format!(
                "responses cover {} measurements, expected {m}",
                self.responses.len()
            )));
        }
        for r in &self.responses {
            if r.len() != self.d || r.iter().any(|&b| b >= k) {
                return Err(Error::MalformedStrategy(
                    "response function must map every dit to a valid outcome".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let k_is_dichotomic = self.responses.iter().flatten().all(|&b| b < 2);
        let label = |b: usize| -> i64 {
            if k_is_dichotomic {
                if b == 0 {
                    1
                } else {
                    -1
                }
            } else {
                b as i64 + 1
            }
        };
        json!({
            "d": self.d,
            "assignment": self.assignment.iter().map(|a| a + 1).collect::<Vec<_>>(),
            "responses": self
                .responses
                .iter()
                .map(|r| r.iter().map(|&b| label(b)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Deterministic table of a strategy: P(b|x,y) = 1 iff the response to the
/// assigned dit is b.
pub fn strategy_to_probs(
    s: &ClassicalStrategy,
    n: usize,
    m: usize,
    k: usize,
) -> Result<ProbabilityTable, Error> {
    s.validate(n, m, k)?;
    let mut p = vec![0.0; n * m * k];
    for x in 0..n {
        for y in 0..m {
            let b = s.responses[y][s.assignment[x]];
            p[(b * n + x) * m + y] = 1.0;
        }
    }
    ProbabilityTable::with_tolerance(n, m, k, p, GENERATED_TOL)
}

/// Exact maximum of the witness over classical d-dimensional systems with the
/// default strategy cap and no symmetry reduction.
pub fn classical_bound(spec: &WitnessSpec, d: usize) -> Result<BoundResult, Error> {
    classical_bound_opts(spec, d, DEFAULT_STRATEGY_CAP, false)
}

/// Sequential variant, always compiled; the parallel build dispatches away
/// from it, benches compare the two.
pub fn classical_bound_seq(spec: &WitnessSpec, d: usize) -> Result<BoundResult, Error> {
    let space = StrategySpace::new(spec, d, DEFAULT_STRATEGY_CAP, false)?;
    let best = (0..space.assignment_count)
        .map(|a_idx| space.best_for_assignment(a_idx))
        .fold(None, |acc, cand| merge_best(acc, Some(cand)));
    space.finish(best.expect("at least one assignment"))
}

pub fn classical_bound_opts(
    spec: &WitnessSpec,
    d: usize,
    cap: u128,
    symmetry_reduction: bool,
) -> Result<BoundResult, Error> {
    let space = StrategySpace::new(spec, d, cap, symmetry_reduction)?;
    #[cfg(feature = "parallel")]
    let best = (0..space.assignment_count)
        .into_par_iter()
        .filter(|&a_idx| space.admits(a_idx))
        .map(|a_idx| Some(space.best_for_assignment(a_idx)))
        .reduce(|| None, merge_best);
    #[cfg(not(feature = "parallel"))]
    let best = (0..space.assignment_count)
        .filter(|&a_idx| space.admits(a_idx))
        .map(|a_idx| Some(space.best_for_assignment(a_idx)))
        .fold(None, merge_best);
    space.finish(best.expect("at least one assignment"))
}

/// Candidate maximizer: value, assignment index, per-measurement response
/// indices. Ordering on indices gives the lexicographically-first tie-break.
type Candidate = (f64, u64, Vec<usize>);

fn merge_best(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            // strictly greater value wins; on exact ties keep the smaller
            // assignment index so the result is independent of partitioning
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

struct StrategySpace<'a> {
    spec: &'a WitnessSpec,
    d: usize,
    assignment_count: u64,
    /// All k^d response functions for one measurement, in lexicographic
    /// order (dit 0 most significant).
    response_tables: Vec<Vec<usize>>,
    symmetry_reduction: bool,
}

impl<'a> StrategySpace<'a> {
    fn new(
        spec: &'a WitnessSpec,
        d: usize,
        cap: u128,
        symmetry_reduction: bool,
    ) -> Result<Self, Error> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let (n, m, k) = (spec.n() as u32, spec.m() as u32, spec.k() as u32);
        let assignments = (d as u128).checked_pow(n);
        let per_y = (spec.k() as u128).checked_pow(d as u32);
        let total = assignments
            .zip(per_y)
            .and_then(|(a, r)| r.checked_pow(m).and_then(|rm| a.checked_mul(rm)))
            .ok_or(Error::StrategySpaceTooLarge {
                total: u128::MAX,
                cap,
            })?;
        if total > cap {
            return Err(Error::StrategySpaceTooLarge { total, cap });
        }
        let per_y = per_y.unwrap() as usize;
        let mut response_tables = Vec::with_capacity(per_y);
        for r_idx in 0..per_y {
            let mut table = vec![0usize; d];
            let mut rest = r_idx;
            for dit in (0..d).rev() {
                table[dit] = rest % k as usize;
                rest /= k as usize;
            }
            response_tables.push(table);
        }
        Ok(StrategySpace {
            spec,
            d,
            assignment_count: assignments.unwrap() as u64,
            response_tables,
            symmetry_reduction,
        })
    }

    fn decode_assignment(&self, mut a_idx: u64) -> Vec<usize> {
        let n = self.spec.n();
        let mut a = vec![0usize; n];
        for x in (0..n).rev() {
            a[x] = (a_idx % self.d as u64) as usize;
            a_idx /= self.d as u64;
        }
        a
    }

    /// With symmetry reduction on, only assignments whose dits appear in
    /// first-use order are scanned; every other assignment is a dit
    /// relabeling of one of these and responses range over all functions, so
    /// the maximum value is unchanged.
    fn admits(&self, a_idx: u64) -> bool {
        if !self.symmetry_reduction {
            return true;
        }
        let a = self.decode_assignment(a_idx);
        let mut next_fresh = 0usize;
        for &dit in &a {
            if dit > next_fresh {
                return false;
            }
            if dit == next_fresh {
                next_fresh += 1;
            }
        }
        true
    }

    fn best_for_assignment(&self, a_idx: u64) -> Candidate {
        let spec = self.spec;
        let (n, m) = (spec.n(), spec.m());
        let a = self.decode_assignment(a_idx);
        let mut value = 0.0;
        let mut response_idx = Vec::with_capacity(m);
        for y in 0..m {
            let mut best = f64::NEG_INFINITY;
            let mut best_idx = 0usize;
            for (r_idx, table) in self.response_tables.iter().enumerate() {
                let mut v = 0.0;
                for x in 0..n {
                    v += spec.coeff(table[a[x]], x, y);
                }
                if v > best {
                    best = v;
                    best_idx = r_idx;
                }
            }
            value += best;
            response_idx.push(best_idx);
        }
        (value, a_idx, response_idx)
    }

    fn finish(&self, best: Candidate) -> Result<BoundResult, Error> {
        let (value, a_idx, response_idx) = best;
        let strategy = ClassicalStrategy {
            d: self.d,
            assignment: self.decode_assignment(a_idx),
            responses: response_idx
                .iter()
                .map(|&r| self.response_tables[r].clone())
                .collect(),
        };
        debug_assert_eq!(
            crate::witness::eval_witness(
                self.spec,
                &strategy_to_probs(&strategy, self.spec.n(), self.spec.m(), self.spec.k())?
            )?,
            value
        );
        Ok(BoundResult {
            witness_name: self.spec.name().to_string(),
            model: Model::Classical,
            d: self.d,
            value,
            converged: None,
            argmax: Realization::Classical(strategy),
        })
    }
}
