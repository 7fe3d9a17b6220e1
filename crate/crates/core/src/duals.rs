//! Pointwise membership tests for the alpha, beta and gamma duals of the
//! lambda spaces.
//!
//! The conditions, for a candidate `a`:
//!
//! * `b1`: `sup_K sum_n |sum_{k in K} b_nk| < oo` for the matrix `b_nk = fbar_inv_nk a_n`,
//! * `b2`: `sum_{j>=k} a_j f_{j+1}^2` converges,
//! * `b3`: `sup_n sum_{k<n} |abar_k(n)| < oo`,
//! * `b4`: `sup_n |u_n a_n| < oo`,
//! * `b5`: `a_0 + sum_{k>=1} b_k a_k` converges, with `b` the limit-part basis sequence.
//!
//! alpha = b1; beta over the null space = b2 b3 b4; beta over the convergent
//! space = b3 b4 b5; gamma = b3 b4.

use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::matrices::fbar_inv_entry;
use crate::numerics::subsets::{max_subset_power_sum, MAX_SUBSET_FAMILY};
use crate::numerics::{
    estimate_limit_with, estimate_sup, fib_q, render, to_decimal, Lambda, Rational, ScalarStream, Truncation, Verdict,
};
use crate::spaces::{SequenceOracle, SpaceId};

/// Largest subset horizon `m` (columns `0..=m`).
pub const MAX_HORIZON: usize = MAX_SUBSET_FAMILY - 1;
pub const DEFAULT_HORIZON: usize = 8;

/// Number of leading tails checked for `b2` besides the first.
const B2_SPOT_CHECKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Alpha,
    Beta,
    Gamma,
}

impl DualKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(DualKind::Alpha),
            "beta" => Ok(DualKind::Beta),
            "gamma" => Ok(DualKind::Gamma),
            other => Err(Error::InvalidParameter(format!("unknown dual kind `{other}`"))),
        }
    }
}

impl fmt::Display for DualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualKind::Alpha => "alpha",
            DualKind::Beta => "beta",
            DualKind::Gamma => "gamma",
        })
    }
}

/// One condition verdict with the finite-depth quantity it was judged on.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub verdict: Verdict,
    /// Sup lower bound or limit candidate.
    pub bound: Option<Rational>,
}

impl Condition {
    fn to_json(&self) -> Value {
        let mut v = self.verdict.to_json();
        if let Some(b) = &self.bound {
            v["bound"] = json!(render(b));
            v["bound_decimal"] = json!(to_decimal(b, 12));
        }
        v
    }
}

/// `b_nk = fbar_inv_nk * a_n`.
pub fn alpha_matrix_entry(a: &SequenceOracle, lambda: &Lambda, n: usize, k: usize) -> Rational {
    let an = a.get(n);
    if an.is_zero() || k > n {
        return Rational::zero();
    }
    fbar_inv_entry(lambda, n, k) * an
}

/// `abar_k(n)` for `k < n`.
pub fn abar_k_n(a: &SequenceOracle, lambda: &Lambda, k: usize, n: usize) -> Result<Rational> {
    if k >= n {
        return Err(Error::IndexRejected { op: "abar_k_n", detail: format!("need k < n, got k = {k}, n = {n}") });
    }
    lambda.ensure(n + 1)?;
    Ok(Kernel::shared(lambda).abar_entry(&a.prefix(n), k, n))
}

/// Entry of the lower triangle `T` with rows `(abar_0(n), .., abar_{n-1}(n), u_n a_n)`.
pub fn t_matrix_entry(a: &SequenceOracle, lambda: &Lambda, n: usize, k: usize) -> Result<Rational> {
    match k.cmp(&n) {
        std::cmp::Ordering::Greater => Ok(Rational::zero()),
        std::cmp::Ordering::Equal => {
            lambda.ensure(n + 1)?;
            Ok(Kernel::shared(lambda).u(n) * a.get(n))
        }
        std::cmp::Ordering::Less => abar_k_n(a, lambda, k, n),
    }
}

fn is_identically_zero(a: &SequenceOracle) -> bool {
    a.zero_from() == Some(0)
}

fn zero_condition() -> Condition {
    Condition { verdict: Verdict::certified_true().with_note("zero sequence"), bound: Some(Rational::zero()) }
}

fn finish(a: &SequenceOracle, c: Condition, depth: usize) -> Condition {
    if !a.is_builtin() && c.verdict.is_certified() {
        Condition { verdict: c.verdict.downgrade(depth), ..c }
    } else {
        c
    }
}

/// Exact maximum of `sum_{n<=depth} |sum_{k in K} b_nk|` over `K` in `{0..=horizon}`.
///
/// The result is a lower bound for the supremum over all finite `K` and is
/// nondecreasing in both the horizon and the row depth.
pub fn check_b1(a: &SequenceOracle, lambda: &Lambda, horizon: usize, t: &Truncation) -> Result<Condition> {
    if horizon > MAX_HORIZON {
        return Err(Error::SubsetHorizon { requested: horizon, max: MAX_HORIZON });
    }
    lambda.ensure(t.depth + 1)?;
    if is_identically_zero(a) {
        return Ok(finish(a, zero_condition(), t.depth));
    }
    let columns: Vec<Vec<Rational>> =
        (0..=horizon).map(|k| (0..=t.depth).map(|n| alpha_matrix_entry(a, lambda, n, k)).collect()).collect();
    let best = max_subset_power_sum(&columns, 1)?;
    let verdict = if best.lower > t.threshold {
        Verdict::empirical_false(t.depth, Some(t.threshold.clone()))
    } else {
        Verdict::empirical_true(t.depth)
    };
    let verdict = verdict.with_note(format!(
        "lower bound over subsets of columns 0..={horizon}, rows 0..={}; maximiser {:?}",
        t.depth, best.subset
    ));
    Ok(Condition { verdict, bound: Some(best.lower) })
}

/// Convergence of `sum_{j>=k} a_j f_{j+1}^2`, tested at `k = 0` and spot-checked
/// for `k <= 8`. Convergence for one `k` is convergence for every `k`; the
/// spot checks guard against cancellation in the leading terms.
pub fn check_b2(a: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<Condition> {
    lambda.ensure(t.depth + 1)?;
    if is_identically_zero(a) {
        return Ok(finish(a, zero_condition(), t.depth));
    }
    let weighted: Vec<Rational> = (0..=t.depth)
        .map(|j| {
            let f = fib_q(j + 1);
            a.get(j) * &f * &f
        })
        .collect();
    let mut parts = Vec::new();
    let mut bound = None;
    for k in 0..=B2_SPOT_CHECKS.min(t.depth) {
        let mut acc = Rational::zero();
        let partial: Vec<Rational> = weighted
            .iter()
            .enumerate()
            .map(|(j, w)| {
                if j >= k {
                    acc += w;
                }
                acc.clone()
            })
            .collect();
        let est = estimate_limit_with(&ScalarStream::from_values(partial), t);
        if k == 0 {
            bound = est.candidate.clone();
        }
        parts.push(est.verdict);
    }
    Ok(Condition { verdict: Verdict::all(&parts), bound })
}

/// `sup_n sum_{k<n} |abar_k(n)|`.
pub fn check_b3(a: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<Condition> {
    lambda.ensure(t.depth + 1)?;
    if is_identically_zero(a) {
        return Ok(finish(a, zero_condition(), t.depth));
    }
    let kernel = Kernel::shared(lambda);
    let prefix = a.prefix(t.depth);
    let sums: Vec<Rational> = (0..=t.depth)
        .map(|n| {
            let row = kernel.abar_row(&prefix[..=n]);
            row[..n].iter().fold(Rational::zero(), |acc, v| acc + v.abs())
        })
        .collect();
    let sup = estimate_sup(&ScalarStream::from_values(sums), t.depth, &t.threshold);
    Ok(Condition { verdict: sup.verdict, bound: Some(sup.lower_bound) })
}

/// `sup_n |u_n a_n|`.
pub fn check_b4(a: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<Condition> {
    lambda.ensure(t.depth + 1)?;
    if is_identically_zero(a) {
        return Ok(finish(a, zero_condition(), t.depth));
    }
    let kernel = Kernel::shared(lambda);
    let terms: Vec<Rational> = (0..=t.depth).map(|n| (kernel.u(n) * a.get(n)).abs()).collect();
    let sup = estimate_sup(&ScalarStream::from_values(terms), t.depth, &t.threshold);
    Ok(Condition { verdict: sup.verdict, bound: Some(sup.lower_bound) })
}

/// Convergence of `a_0 + sum_{k>=1} f_{k+1}^2 (1 + sum_{j=1}^k 1/(f_j f_{j+1})) a_k`.
pub fn check_b5(a: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<Condition> {
    lambda.ensure(t.depth + 1)?;
    if is_identically_zero(a) {
        return Ok(finish(a, zero_condition(), t.depth));
    }
    let mut harmonic = Rational::from_integer(1.into());
    let mut acc = a.get(0);
    let mut partial = vec![acc.clone()];
    for k in 1..=t.depth {
        harmonic += (fib_q(k) * fib_q(k + 1)).recip();
        let f = fib_q(k + 1);
        acc += &f * &f * &harmonic * a.get(k);
        partial.push(acc.clone());
    }
    let est = estimate_limit_with(&ScalarStream::from_values(partial), t);
    Ok(Condition { verdict: est.verdict, bound: est.candidate })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualConditionReport {
    pub b1: Condition,
    pub b2: Condition,
    pub b3: Condition,
    pub b4: Condition,
    pub b5: Condition,
    pub alpha: Verdict,
    pub beta_c0: Verdict,
    pub beta_c: Verdict,
    pub gamma: Verdict,
}

impl DualConditionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "b1": self.b1.to_json(),
            "b2": self.b2.to_json(),
            "b3": self.b3.to_json(),
            "b4": self.b4.to_json(),
            "b5": self.b5.to_json(),
            "alpha": self.alpha.to_json(),
            "beta_c0": self.beta_c0.to_json(),
            "beta_c": self.beta_c.to_json(),
            "gamma": self.gamma.to_json(),
        })
    }
}

/// Runs every condition and composes the dual verdicts.
pub fn check_dual_conditions(
    a: &SequenceOracle,
    lambda: &Lambda,
    horizon: usize,
    t: &Truncation,
) -> Result<DualConditionReport> {
    let b1 = check_b1(a, lambda, horizon, t)?;
    let b2 = check_b2(a, lambda, t)?;
    let b3 = check_b3(a, lambda, t)?;
    let b4 = check_b4(a, lambda, t)?;
    let b5 = check_b5(a, lambda, t)?;
    let alpha = b1.verdict.clone();
    let beta_c0 = Verdict::all([&b2.verdict, &b3.verdict, &b4.verdict]);
    let beta_c = Verdict::all([&b3.verdict, &b4.verdict, &b5.verdict]);
    let gamma = Verdict::all([&b3.verdict, &b4.verdict]);
    let [b1, b2, b3, b4, b5] = [b1, b2, b3, b4, b5].map(|c| finish(a, c, t.depth));
    Ok(DualConditionReport { b1, b2, b3, b4, b5, alpha, beta_c0, beta_c, gamma })
}

/// The beta-dual conditions only; `b1` is skipped and reported indeterminate.
pub fn check_beta_conditions(a: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<DualConditionReport> {
    let skipped = Condition { verdict: Verdict::indeterminate(None).with_note("not evaluated"), bound: None };
    let b2 = check_b2(a, lambda, t)?;
    let b3 = check_b3(a, lambda, t)?;
    let b4 = check_b4(a, lambda, t)?;
    let b5 = check_b5(a, lambda, t)?;
    let beta_c0 = Verdict::all([&b2.verdict, &b3.verdict, &b4.verdict]);
    let beta_c = Verdict::all([&b3.verdict, &b4.verdict, &b5.verdict]);
    let gamma = Verdict::all([&b3.verdict, &b4.verdict]);
    Ok(DualConditionReport { alpha: skipped.verdict.clone(), b1: skipped, b2, b3, b4, b5, beta_c0, beta_c, gamma })
}

/// Conjunction of the conditions defining the requested dual.
pub fn dual_membership(
    a: &SequenceOracle,
    lambda: &Lambda,
    dual: DualKind,
    space: &SpaceId,
    horizon: usize,
    t: &Truncation,
) -> Result<Verdict> {
    if !space.is_lambda_space() {
        return Err(Error::UnknownSpace(format!("duals are only computed for the lambda spaces, not {space}")));
    }
    let parts: Vec<Condition> = match (dual, space) {
        (DualKind::Alpha, _) => vec![check_b1(a, lambda, horizon, t)?],
        (DualKind::Gamma, _) => vec![check_b3(a, lambda, t)?, check_b4(a, lambda, t)?],
        (DualKind::Beta, SpaceId::C0Lambda) => {
            vec![check_b2(a, lambda, t)?, check_b3(a, lambda, t)?, check_b4(a, lambda, t)?]
        }
        (DualKind::Beta, _) => vec![check_b3(a, lambda, t)?, check_b4(a, lambda, t)?, check_b5(a, lambda, t)?],
    };
    let verdict = Verdict::all(parts.iter().map(|c| &c.verdict));
    Ok(finish(a, Condition { verdict, bound: None }, t.depth).verdict)
}

/// `sum_{k<=n} a_k x_k - (sum_{k<n} abar_k(n) y_k + u_n a_n y_n)` with
/// `x` the inverse transform of `y`; zero for every `a`, `y`, `n`.
pub fn abel_identity_defect(a: &SequenceOracle, y: &SequenceOracle, lambda: &Lambda, n: usize) -> Result<Rational> {
    lambda.ensure(n + 1)?;
    let x = crate::spaces::inverse_prefix(y, lambda, n)?;
    let lhs = (0..=n).fold(Rational::zero(), |acc, k| acc + a.get(k) * &x[k]);
    let kernel = Kernel::shared(lambda);
    let row = kernel.abar_row(&a.prefix(n));
    let rhs = (0..=n).fold(Rational::zero(), |acc, k| acc + &row[k] * y.get(k));
    Ok(lhs - rhs)
}

/// `a_0 + sum_{k=1}^n b_k a_k - sum_k t_nk`; zero for every `a` and `n`.
pub fn row_sum_identity_defect(a: &SequenceOracle, lambda: &Lambda, n: usize) -> Result<Rational> {
    lambda.ensure(n + 1)?;
    let lhs = (0..=n).fold(Rational::zero(), |acc, k| acc + crate::spaces::b_sequence(k) * a.get(k));
    let row = Kernel::shared(lambda).abar_row(&a.prefix(n));
    Ok(lhs - row.iter().fold(Rational::zero(), |acc, v| acc + v))
}
