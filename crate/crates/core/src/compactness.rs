//! Operator norms, tail norms and Hausdorff measure of noncompactness
//! estimates for operators out of the lambda spaces.

use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::classes::abar_rows;
use crate::error::{Error, Result};
use crate::matrices::MatrixOracle;
use crate::numerics::subsets::{max_subset_power_sum, MAX_SUBSET_FAMILY};
use crate::numerics::{
    estimate_limit, estimate_sup, render, to_decimal, Interval, Lambda, LimitEstimate, Rational, ScalarStream,
    Truncation, Verdict,
};

/// Largest `m` on the default tail-norm grid.
pub const DEFAULT_GRID_MAX: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactTarget {
    C0,
    C,
    LInf,
    L1,
    Bv,
}

impl CompactTarget {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "c0" => CompactTarget::C0,
            "c" => CompactTarget::C,
            "l_inf" | "linf" => CompactTarget::LInf,
            "l1" => CompactTarget::L1,
            "bv" => CompactTarget::Bv,
            other => return Err(Error::UnknownSpace(other.to_string())),
        })
    }

    pub fn tail_kind(self) -> TailKind {
        match self {
            CompactTarget::C0 | CompactTarget::C | CompactTarget::LInf => TailKind::LinfLike,
            CompactTarget::L1 => TailKind::L1,
            CompactTarget::Bv => TailKind::Bv,
        }
    }
}

impl fmt::Display for CompactTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompactTarget::C0 => "c0",
            CompactTarget::C => "c",
            CompactTarget::LInf => "l_inf",
            CompactTarget::L1 => "l1",
            CompactTarget::Bv => "bv",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// `sup_{n>m} sum_k |abar_nk|`.
    LinfLike,
    /// `max_N sum_k |sum_{n in N} abar_nk|`, `N` in the window above `m`.
    L1,
    /// As `L1` on the row differences `abar_nk - abar_{n-1,k}`.
    Bv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactParams {
    pub trunc: Truncation,
    /// Subset window `{m+1, .., m+1+horizon}` for `l1`/`bv` tails and
    /// `{0, .., horizon}` for the `l1` operator norm.
    pub horizon: usize,
    /// Tail norms are sampled for `m = 0..=min(grid_max, depth/2)`.
    pub grid_max: usize,
}

impl Default for CompactParams {
    fn default() -> Self {
        CompactParams { trunc: Truncation::default(), horizon: 8, grid_max: DEFAULT_GRID_MAX }
    }
}

impl CompactParams {
    fn grid_last(&self) -> usize {
        self.grid_max.min(self.trunc.depth / 2)
    }

    fn check_horizon(&self) -> Result<()> {
        if self.horizon + 1 > MAX_SUBSET_FAMILY {
            return Err(Error::SubsetHorizon { requested: self.horizon, max: MAX_SUBSET_FAMILY - 1 });
        }
        Ok(())
    }
}

/// Row from which `a` is known to vanish (with every row finite).
fn finite_rank(a: &MatrixOracle) -> Option<usize> {
    a.zero_rows_from().filter(|_| a.has_finite_rows())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBound {
    pub value: Rational,
    pub verdict: Verdict,
}

/// `max_{n<=depth} sum_k |abar_nk|`, a lower bound for the norm of the
/// operator into `l_inf`; certified as the norm for finite rank.
pub fn operator_norm_linf(a: &MatrixOracle, lambda: &Lambda, t: &Truncation) -> Result<NormBound> {
    let rows = abar_rows(a, lambda, t.depth, t.depth)?;
    let sums: Vec<Rational> = rows.iter().map(|r| abs_sum(r)).collect();
    let stable = finite_rank(a).filter(|&r| r <= t.depth);
    let value = sums.iter().max().cloned().unwrap_or_else(Rational::zero);
    let sup = estimate_sup(&ScalarStream::from_values(sums).stable_from(stable), t.depth, &t.threshold);
    Ok(NormBound { value, verdict: sup.verdict })
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1NormBounds {
    /// `[L, 4L]` with `L` the exhaustive subset maximum.
    pub interval: Interval,
    pub subset: Vec<usize>,
    pub verdict: Verdict,
}

/// Sandwich `L <= ||L_A|| <= 4L` for the operator into `l1`, with `L` the
/// maximum of `sum_k |sum_{n in N} abar_nk|` over `N` in `{0..=horizon}`.
pub fn operator_norm_l1_bounds(a: &MatrixOracle, lambda: &Lambda, p: &CompactParams) -> Result<L1NormBounds> {
    p.check_horizon()?;
    let t = &p.trunc;
    let last = p.horizon.max(t.depth);
    let rows = abar_rows(a, lambda, last, t.depth)?;
    let best = max_subset_power_sum(&rows[..=p.horizon], 1)?;
    let covered = finite_rank(a).is_some_and(|r| r <= p.horizon + 1);
    let verdict = if covered {
        Verdict::certified_true().with_note("every nonzero row lies in the subset window")
    } else if best.lower > t.threshold {
        Verdict::empirical_false(t.depth, Some(t.threshold.clone()))
    } else {
        Verdict::empirical_true(t.depth).with_note(format!("subsets of rows 0..={}", p.horizon))
    };
    let four = Rational::from_integer(4.into());
    Ok(L1NormBounds { interval: Interval::new(best.lower.clone(), best.lower * four), subset: best.subset, verdict })
}

fn abs_sum(row: &[Rational]) -> Rational {
    row.iter().fold(Rational::zero(), |acc, v| acc + v.abs())
}

fn difference(rows: &[Vec<Rational>], n: usize) -> Vec<Rational> {
    let here = &rows[n];
    if n == 0 {
        return here.clone();
    }
    let before = &rows[n - 1];
    let width = here.len().max(before.len());
    let at = |r: &Vec<Rational>, k: usize| r.get(k).cloned().unwrap_or_else(Rational::zero);
    (0..width).map(|k| at(here, k) - at(before, k)).collect()
}

/// Tail norms for several `m` from one table of transformed rows.
struct TailTable {
    rows: Vec<Vec<Rational>>,
    depth: usize,
    horizon: usize,
}

impl TailTable {
    fn new(a: &MatrixOracle, lambda: &Lambda, last_m: usize, p: &CompactParams) -> Result<Self> {
        let depth = p.trunc.depth;
        let last_row = depth.max(last_m + 1 + p.horizon);
        Ok(TailTable { rows: abar_rows(a, lambda, last_row, depth)?, depth, horizon: p.horizon })
    }

    fn value(&self, kind: TailKind, m: usize) -> Result<Rational> {
        match kind {
            TailKind::LinfLike => {
                Ok((m + 1..=self.depth).map(|n| abs_sum(&self.rows[n])).max().unwrap_or_else(Rational::zero))
            }
            TailKind::L1 => {
                let window: Vec<Vec<Rational>> = (m + 1..=m + 1 + self.horizon).map(|n| self.rows[n].clone()).collect();
                Ok(max_subset_power_sum(&window, 1)?.lower)
            }
            TailKind::Bv => {
                let window: Vec<Vec<Rational>> =
                    (m + 1..=m + 1 + self.horizon).map(|n| difference(&self.rows, n)).collect();
                Ok(max_subset_power_sum(&window, 1)?.lower)
            }
        }
    }
}

/// `||A||^(m)` of the requested kind at fixed depth.
pub fn tail_norm(a: &MatrixOracle, lambda: &Lambda, m: usize, kind: TailKind, p: &CompactParams) -> Result<Rational> {
    if kind != TailKind::LinfLike {
        p.check_horizon()?;
    }
    TailTable::new(a, lambda, m, p)?.value(kind, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmncKind {
    Equality,
    Interval,
    UpperBound,
}

impl HmncKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HmncKind::Equality => "equality",
            HmncKind::Interval => "interval",
            HmncKind::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HmncEstimate {
    pub target: CompactTarget,
    pub kind: HmncKind,
    pub lower: Rational,
    pub upper: Rational,
    /// `(m, ||A||^(m))` on the grid.
    pub samples: Vec<(usize, Rational)>,
    pub limit: LimitEstimate,
}

impl HmncEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "lower": render(&self.lower),
            "upper": render(&self.upper),
            "lower_decimal": to_decimal(&self.lower, 12),
            "upper_decimal": to_decimal(&self.upper, 12),
            "limit": self.limit.verdict.to_json(),
        })
    }
}

/// Samples the tail norms on the grid and packages their limit per target:
/// equality for `c0`, `l1`, `bv`; `[v/2, v]` for `c`; `[0, v]` for `l_inf`.
/// An unresolved limit gives `[0, last sample]` with an indeterminate verdict.
pub fn hmnc_estimate(
    a: &MatrixOracle,
    lambda: &Lambda,
    target: CompactTarget,
    p: &CompactParams,
) -> Result<HmncEstimate> {
    let kind = target.tail_kind();
    if kind != TailKind::LinfLike {
        p.check_horizon()?;
    }
    let last = p.grid_last();
    let table = TailTable::new(a, lambda, last, p)?;
    let samples: Vec<(usize, Rational)> = (0..=last).map(|m| Ok((m, table.value(kind, m)?))).collect::<Result<_>>()?;
    // tails vanish once every row past m is zero (differences: one row later)
    let stable = finite_rank(a).map(|r| match kind {
        TailKind::Bv => r,
        _ => r.saturating_sub(1),
    });
    let values: Vec<Rational> = samples.iter().map(|(_, v)| v.clone()).collect();
    let stream = ScalarStream::from_values(values).stable_from(stable.filter(|&s| s <= last));
    let t = &p.trunc;
    let limit = estimate_limit(&stream, last, t.window.min(last), &t.tol, &t.threshold);
    let (kind, lower, upper) = match (&limit.candidate, limit.verdict.is_true()) {
        (Some(v), true) => match target {
            CompactTarget::C0 | CompactTarget::L1 | CompactTarget::Bv => (HmncKind::Equality, v.clone(), v.clone()),
            CompactTarget::C => (HmncKind::Interval, v / Rational::from_integer(2.into()), v.clone()),
            CompactTarget::LInf => (HmncKind::UpperBound, Rational::zero(), v.clone()),
        },
        _ => {
            let last_sample = samples.last().map(|(_, v)| v.clone()).unwrap_or_else(Rational::zero);
            (HmncKind::UpperBound, Rational::zero(), last_sample)
        }
    };
    let limit = if limit.verdict.is_true() {
        limit
    } else {
        LimitEstimate {
            verdict: Verdict::indeterminate(Some(last))
                .with_evidence(limit.verdict.evidence.clone())
                .with_note("tail-norm limit not established"),
            candidate: None,
        }
    };
    Ok(HmncEstimate { target, kind, lower, upper, samples, limit })
}

/// Compact iff the tail norms tend to 0. For `l_inf` the criterion is only
/// sufficient, so a nonzero limit yields `indeterminate`.
pub fn compactness_verdict(est: &HmncEstimate, t: &Truncation) -> Verdict {
    let v = est.limit.equals(&Rational::zero(), &t.tol);
    if est.target == CompactTarget::LInf && v.is_false() {
        return Verdict::indeterminate(v.depth)
            .with_evidence(v.evidence)
            .with_note("nonzero tail limit does not decide compactness into l_inf");
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport {
    pub target: CompactTarget,
    pub hmnc: HmncEstimate,
    pub verdict: Verdict,
}

impl CompactnessReport {
    pub fn to_json(&self) -> Value {
        let tails: Vec<Value> = self.hmnc.samples.iter().map(|(m, v)| json!([m, render(v)])).collect();
        json!({
            "target": self.target.to_string(),
            "tail_norms": tails,
            "hmnc": self.hmnc.to_json(),
            "verdict": self.verdict.to_json(),
        })
    }
}

pub fn compactness(
    a: &MatrixOracle,
    lambda: &Lambda,
    target: CompactTarget,
    p: &CompactParams,
) -> Result<CompactnessReport> {
    let hmnc = hmnc_estimate(a, lambda, target, p)?;
    let verdict = compactness_verdict(&hmnc, &p.trunc);
    Ok(CompactnessReport { target, hmnc, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, Status};

    fn params() -> CompactParams {
        CompactParams { trunc: Truncation::default().with_depth(64), ..Default::default() }
    }

    #[test]
    fn operator_norm_examples() {
        let lam = Lambda::linear();
        let t = Truncation::default().with_depth(40);
        let n = operator_norm_linf(&MatrixOracle::a00_only(), &lam, &t).unwrap();
        assert_eq!((n.value, n.verdict.status), (int(1), Status::CertifiedTrue));
        assert_eq!(operator_norm_linf(&MatrixOracle::zero(), &lam, &t).unwrap().value, int(0));
        assert_eq!(operator_norm_linf(&MatrixOracle::row_e0(), &lam, &t).unwrap().value, int(1));
        let b = operator_norm_l1_bounds(&MatrixOracle::a00_only(), &lam, &params()).unwrap();
        assert_eq!(b.interval, Interval::new(int(1), int(4)));
        let b = operator_norm_l1_bounds(&MatrixOracle::zero(), &lam, &params()).unwrap();
        assert_eq!(b.interval, Interval::new(int(0), int(0)));
    }

    #[test]
    fn tail_examples() {
        let lam = Lambda::linear();
        let p = params();
        assert_eq!(tail_norm(&MatrixOracle::a00_only(), &lam, 0, TailKind::LinfLike, &p).unwrap(), int(0));
        for m in [0, 5, 20] {
            assert_eq!(tail_norm(&MatrixOracle::row_e0(), &lam, m, TailKind::LinfLike, &p).unwrap(), int(1));
        }
        for kind in [TailKind::LinfLike, TailKind::L1, TailKind::Bv] {
            assert_eq!(tail_norm(&MatrixOracle::zero(), &lam, 3, kind, &p).unwrap(), int(0));
        }
        let big = CompactParams { horizon: 17, ..params() };
        assert!(tail_norm(&MatrixOracle::zero(), &lam, 0, TailKind::L1, &big).is_err());
    }

    #[test]
    fn hmnc_examples() {
        let lam = Lambda::linear();
        let p = params();
        let r = compactness(&MatrixOracle::a00_only(), &lam, CompactTarget::C0, &p).unwrap();
        assert_eq!((r.hmnc.kind, r.hmnc.upper.clone()), (HmncKind::Equality, int(0)));
        assert_eq!(r.verdict.status, Status::CertifiedTrue);
        let r = compactness(&MatrixOracle::row_e0(), &lam, CompactTarget::C, &p).unwrap();
        assert_eq!(r.hmnc.kind, HmncKind::Interval);
        assert_eq!((r.hmnc.lower.clone(), r.hmnc.upper.clone()), (Rational::new(1.into(), 2.into()), int(1)));
        assert_eq!(r.verdict.status, Status::EmpiricalFalse);
        let r = compactness(&MatrixOracle::row_e0(), &lam, CompactTarget::LInf, &p).unwrap();
        assert_eq!(r.verdict.status, Status::Indeterminate);
        for target in [CompactTarget::C0, CompactTarget::C, CompactTarget::LInf, CompactTarget::L1, CompactTarget::Bv] {
            let r = compactness(&MatrixOracle::zero(), &lam, target, &p).unwrap();
            assert_eq!((r.hmnc.lower.clone(), r.hmnc.upper.clone()), (int(0), int(0)));
        }
    }

    #[test]
    fn finite_rank_is_compact_for_every_decisive_target() {
        let lam = Lambda::linear();
        let a = MatrixOracle::sparse(vec![(0, 0, int(1)), (2, 3, int(-2)), (4, 1, int(5))]);
        for target in [CompactTarget::C0, CompactTarget::C, CompactTarget::L1, CompactTarget::Bv] {
            let r = compactness(&a, &lam, target, &params()).unwrap();
            assert_eq!(r.verdict.status, Status::CertifiedTrue, "{target}");
        }
    }
}
