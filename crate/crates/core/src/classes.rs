//! Class membership `A in (X : Y)` for matrices acting on or into the lambda
//! spaces.
//!
//! Forward classes (lambda space into a classical space) are decided by
//! conditions on the transformed matrix `abar_nk`; reverse classes (classical
//! space into a lambda space) by the classical conditions on the composed
//! matrix `C`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::matrices::MatrixOracle;
use crate::numerics::subsets::{max_subset_sum, MAX_SUBSET_FAMILY};
use crate::numerics::{
    abs_pow, estimate_limit_with, estimate_sup, fib_q, render, to_decimal, Exponent, Lambda, LimitEstimate, Rational,
    ScalarStream, Truncation, Verdict,
};
use crate::spaces::SpaceId;

pub const DEFAULT_ROW_BUDGET: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassParams {
    pub trunc: Truncation,
    /// Columns `0..=horizon` for subset maxima and column limits.
    pub horizon: usize,
    /// Rows scanned by per-row conditions.
    pub row_budget: usize,
}

impl Default for ClassParams {
    fn default() -> Self {
        ClassParams { trunc: Truncation::default(), horizon: 8, row_budget: DEFAULT_ROW_BUDGET }
    }
}

/// An admissible pair `(source : target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassId {
    source: SpaceId,
    target: SpaceId,
}

impl ClassId {
    pub fn new(source: SpaceId, target: SpaceId) -> Result<Self> {
        let id = ClassId { source, target };
        if id.conditions_opt().is_none() {
            return Err(Error::InadmissibleClass(id.to_string()));
        }
        Ok(id)
    }

    /// Parses `source->target`.
    pub fn parse(s: &str) -> Result<Self> {
        let (src, tgt) = s
            .split_once("->")
            .ok_or_else(|| Error::InadmissibleClass(format!("expected `source->target`, got `{s}`")))?;
        ClassId::new(SpaceId::parse(src)?, SpaceId::parse(tgt)?)
    }

    pub fn source(&self) -> &SpaceId {
        &self.source
    }

    pub fn target(&self) -> &SpaceId {
        &self.target
    }

    pub fn is_reverse(&self) -> bool {
        self.target.is_lambda_space()
    }

    /// Condition ids required for this class, in report order.
    pub fn conditions(&self) -> &'static [&'static str] {
        self.conditions_opt().expect("admissible by construction")
    }

    fn conditions_opt(&self) -> Option<&'static [&'static str]> {
        use SpaceId::*;
        Some(match (&self.source, &self.target) {
            (CLambda, Lp(_)) => &["c25", "c26", "c27", "c28", "c29"],
            (CLambda, LInf) => &["c27", "c28", "c30", "c31"],
            (C0Lambda, Lp(_)) => &["c25", "c26", "c37", "c38"],
            (C0Lambda, LInf) => &["c30", "c37", "c38"],
            (CLambda, C) => &["c27", "c28", "c30", "c49", "c50", "c51"],
            (CLambda, C0) => &["c27", "c28", "c30", "c53", "c54", "c56"],
            (C0Lambda, C) => &["c30", "c37", "c38", "c50"],
            (C0Lambda, C0) => &["c30", "c37", "c38", "c54"],
            (C0, C0Lambda) => &["c22", "c23"],
            (C, C0Lambda) => &["c22", "c23", "c24"],
            (Lp(_), C0Lambda) => &["lp_rows", "c23"],
            (C0, CLambda) => &["c13", "c14"],
            (C, CLambda) => &["c13", "c14", "c15"],
            (Lp(_), CLambda) => &["lp_rows", "c13"],
            _ => return None,
        })
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// Short statement of a condition id.
pub fn condition_statement(id: &str) -> &'static str {
    match id {
        "c25" => "sup_F sum_n |sum_{k in F} abar_nk|^p < oo",
        "c26" => "sup_m sum_{k<m} |abar_nk(m)| < oo for each n",
        "c27" => "a_n0 + sum_k b_k a_nk converges for each n",
        "c28" => "lim_k u_k a_nk = a_n exists for each n",
        "c29" => "(a_n) in l_p",
        "c30" => "sup_n sum_k |abar_nk| < oo",
        "c31" => "(a_n) in l_inf",
        "c37" => "sum_{j>=k} a_nj exists for all n, k",
        "c38" => "sup_k |u_k a_nk| < oo for each n",
        "c49" => "lim_n a_n = a exists",
        "c50" => "lim_n abar_nk = alpha_k exists for each k",
        "c51" => "lim_n sum_k abar_nk = alpha exists",
        "c53" => "lim_n a_n = 0",
        "c54" => "lim_n abar_nk = 0 for each k",
        "c56" => "lim_n sum_k abar_nk = 0",
        "c13" => "lim_n c_nk exists for each k",
        "c14" | "c22" => "sup_n sum_k |c_nk| < oo",
        "c15" => "lim_n sum_k c_nk exists",
        "c23" => "lim_n c_nk = 0 for each k",
        "c24" => "lim_n sum_k c_nk = 0",
        "lp_rows" => "sup_n sum_k |c_nk|^q < oo (sup_nk |c_nk| < oo when p = 1)",
        _ => "unknown condition",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub id: &'static str,
    pub verdict: Verdict,
    /// Named quantities the verdict was judged on.
    pub values: Vec<(String, Rational)>,
}

impl ConditionReport {
    pub fn value(&self, name: &str) -> Option<&Rational> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Value {
        let values: Vec<Value> = self
            .values
            .iter()
            .map(|(k, v)| json!({"name": k, "value": render(v), "decimal": to_decimal(v, 12)}))
            .collect();
        json!({
            "id": self.id,
            "statement": condition_statement(self.id),
            "verdict": self.verdict.to_json(),
            "values": values,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub class: ClassId,
    pub conditions: Vec<ConditionReport>,
    pub overall: Verdict,
}

impl ClassReport {
    pub fn condition(&self, id: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "class": self.class.to_string(),
            "conditions": self.conditions.iter().map(ConditionReport::to_json).collect::<Vec<_>>(),
            "overall": self.overall.to_json(),
        })
    }
}

/// `abar_nk(m) = u_k a_nk + c_k sum_{j=k+1}^m f_{j+1}^2 a_nj` for `k < m`.
pub fn abar_nk_m(a: &MatrixOracle, lambda: &Lambda, n: usize, k: usize, m: usize) -> Result<Rational> {
    if k >= m {
        return Err(Error::IndexRejected { op: "abar_nk_m", detail: format!("need k < m, got k = {k}, m = {m}") });
    }
    lambda.ensure(m + 1)?;
    Ok(Kernel::shared(lambda).abar_entry(&a.row(n, m), k, m))
}

/// `abar_nk` as the limit in `m` of `abar_nk(m)`; exact for finite rows.
pub fn abar_nk(a: &MatrixOracle, lambda: &Lambda, n: usize, k: usize, t: &Truncation) -> Result<LimitEstimate> {
    let kernel = Kernel::shared(lambda);
    if let Some(len) = a.row_len(n) {
        let m = len.max(k + 1);
        lambda.ensure(m + 1)?;
        let v = kernel.abar_entry(&a.row(n, m), k, m);
        return Ok(LimitEstimate {
            verdict: Verdict::certified_true().with_evidence(vec![(m, v.clone())]),
            candidate: Some(v),
        });
    }
    lambda.ensure(t.depth + 1)?;
    let row = a.row(n, t.depth);
    let mut tail = Rational::zero();
    let mut values = Vec::with_capacity(t.depth + 1);
    let head = kernel.u(k) * &row[k.min(t.depth)];
    for (m, entry) in row.iter().enumerate() {
        if m > k {
            tail += kernel.s(m) * entry;
        }
        values.push(&head + kernel.c(k) * &tail);
    }
    Ok(estimate_limit_with(&ScalarStream::from_values(values), t))
}

/// `a_n = lim_k u_k a_nk`; zero and certified for finite rows.
pub fn row_limit_a_n(a: &MatrixOracle, lambda: &Lambda, n: usize, t: &Truncation) -> Result<LimitEstimate> {
    if let Some(len) = a.row_len(n) {
        return Ok(LimitEstimate {
            verdict: Verdict::certified_true().with_evidence(vec![(len, Rational::zero())]),
            candidate: Some(Rational::zero()),
        });
    }
    lambda.ensure(t.depth + 1)?;
    let kernel = Kernel::shared(lambda);
    let row = a.row(n, t.depth);
    let values: Vec<Rational> = row.iter().enumerate().map(|(k, x)| kernel.u(k) * x).collect();
    Ok(estimate_limit_with(&ScalarStream::from_values(values), t))
}

/// Rows `abar_n` for `n <= last_row`; unbounded rows are cut at column
/// `depth`, so their entries are `abar_nk(depth)`.
pub fn abar_rows(a: &MatrixOracle, lambda: &Lambda, last_row: usize, depth: usize) -> Result<Vec<Vec<Rational>>> {
    let widest = (0..=last_row).map(|n| a.row_len(n).unwrap_or(depth + 1)).max().unwrap_or(0);
    lambda.ensure(widest.max(depth) + 2)?;
    let kernel = Kernel::shared(lambda);
    Ok((0..=last_row).map(|n| kernel.abar_row(&Forward::entries(a, n, depth))).collect())
}

/// Lazily computed quantities of one matrix under one weight sequence.
struct Forward<'a> {
    a: &'a MatrixOracle,
    kernel: std::sync::Arc<Kernel>,
    p: &'a ClassParams,
    abar: Vec<Vec<Rational>>,
}

impl<'a> Forward<'a> {
    fn new(a: &'a MatrixOracle, lambda: &Lambda, p: &'a ClassParams) -> Result<Self> {
        let depth = p.trunc.depth;
        let abar = abar_rows(a, lambda, depth, depth)?;
        Ok(Forward { a, kernel: Kernel::shared(lambda), p, abar })
    }

    /// Nonzero prefix of row `n`, cut at `depth` for unbounded rows.
    fn entries(a: &MatrixOracle, n: usize, depth: usize) -> Vec<Rational> {
        match a.row_len(n) {
            Some(0) => Vec::new(),
            Some(len) => a.row(n, len - 1),
            None => a.row(n, depth),
        }
    }

    fn depth(&self) -> usize {
        self.p.trunc.depth
    }

    fn t(&self) -> &Truncation {
        &self.p.trunc
    }

    fn finite(&self) -> bool {
        self.a.has_finite_rows()
    }

    /// Rows from which every row is known to vanish, if inside the scan.
    fn zero_tail(&self) -> Option<usize> {
        self.a.zero_rows_from().filter(|&r| r <= self.depth())
    }

    /// Whether the scanned `abar` rows are the exact infinite rows and
    /// every later row vanishes.
    fn fully_known(&self) -> bool {
        self.finite() && self.zero_tail().is_some()
    }

    fn budget_rows(&self) -> usize {
        self.p.row_budget.min(self.depth() + 1)
    }

    fn budget_note(&self) -> String {
        format!("rows 0..{} scanned; later rows unverified", self.budget_rows())
    }

    fn abar_at(&self, n: usize, k: usize) -> Rational {
        self.abar[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn condition(&self, id: &'static str) -> Result<ConditionReport> {
        match id {
            "c26" => Ok(self.c26()),
            "c27" => Ok(self.per_row_series(id, true)),
            "c37" => Ok(self.per_row_series(id, false)),
            "c28" => Ok(self.c28()),
            "c38" => Ok(self.c38()),
            "c31" | "c49" | "c53" => Ok(self.row_limit_sequence(id)),
            "c30" => Ok(self.c30()),
            "c50" | "c54" => Ok(self.columns(id)),
            "c51" | "c56" => Ok(self.row_sums(id)),
            other => unreachable!("no forward condition {other}"),
        }
    }

    fn c25_with(&self, p: &Exponent) -> Result<ConditionReport> {
        let h = self.p.horizon;
        if h + 1 > MAX_SUBSET_FAMILY {
            return Err(Error::SubsetHorizon { requested: h, max: MAX_SUBSET_FAMILY - 1 });
        }
        let columns: Vec<Vec<Rational>> =
            (0..=h).map(|k| (0..=self.depth()).map(|n| self.abar_at(n, k)).collect()).collect();
        let best = max_subset_sum(&columns, p)?;
        let covered = self.fully_known() && self.abar.iter().all(|row| row.len() <= h + 1);
        let verdict = if covered {
            Verdict::certified_true().with_note("every nonzero abar entry lies inside the scanned block")
        } else if best.lower > self.t().threshold {
            Verdict::empirical_false(self.depth(), Some(self.t().threshold.clone()))
        } else {
            Verdict::empirical_true(self.depth())
                .with_note(format!("exhaustive over subsets of columns 0..={h}, rows 0..={}", self.depth()))
        };
        let mut values = vec![("sup_lower".to_string(), best.lower.clone())];
        if !best.exact {
            values.push(("sup_upper".to_string(), best.upper));
        }
        Ok(ConditionReport { id: "c25", verdict, values })
    }

    fn c26(&self) -> ConditionReport {
        let depth = self.depth();
        let mut parts = Vec::new();
        let mut worst = Rational::zero();
        for n in 0..self.budget_rows() {
            let len = self.a.row_len(n);
            let last = len.map_or(depth, |l| l.min(depth));
            let row = self.a.row(n, last);
            let sums: Vec<Rational> = (0..=last)
                .map(|m| {
                    let abar = self.kernel.abar_row(&row[..=m]);
                    abar[..m].iter().fold(Rational::zero(), |acc, v| acc + v.abs())
                })
                .collect();
            let sup = estimate_sup(&ScalarStream::from_values(sums), last, &self.t().threshold);
            if sup.lower_bound > worst {
                worst = sup.lower_bound.clone();
            }
            parts.push(if len.is_some() { Verdict::certified_true() } else { sup.verdict });
        }
        let verdict = if self.finite() {
            Verdict::certified_true().with_note("every row is finite")
        } else {
            Verdict::all(&parts).downgrade(depth).with_note(self.budget_note())
        };
        ConditionReport { id: "c26", verdict, values: vec![("max_row_sup".into(), worst)] }
    }

    /// `c27` (weighted by the limit-part basis sequence) or `c37` (plain).
    fn per_row_series(&self, id: &'static str, weighted: bool) -> ConditionReport {
        if self.finite() {
            return ConditionReport {
                id,
                verdict: Verdict::certified_true().with_note("every row is finite"),
                values: vec![],
            };
        }
        let depth = self.depth();
        let mut parts = Vec::new();
        for n in 0..self.budget_rows() {
            let row = self.a.row(n, depth);
            let mut harmonic = Rational::from_integer(1.into());
            let mut acc = Rational::zero();
            let partial: Vec<Rational> = row
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    if weighted && k > 0 {
                        harmonic += (fib_q(k) * fib_q(k + 1)).recip();
                        let f = fib_q(k + 1);
                        acc += &f * &f * &harmonic * x;
                    } else {
                        acc += x;
                    }
                    acc.clone()
                })
                .collect();
            parts.push(estimate_limit_with(&ScalarStream::from_values(partial), self.t()).verdict);
        }
        ConditionReport {
            id,
            verdict: Verdict::all(&parts).downgrade(depth).with_note(self.budget_note()),
            values: vec![],
        }
    }

    fn c28(&self) -> ConditionReport {
        if self.finite() {
            return ConditionReport {
                id: "c28",
                verdict: Verdict::certified_true().with_note("every row is finite, so a_n = 0"),
                values: vec![],
            };
        }
        let parts: Vec<Verdict> = (0..self.budget_rows()).map(|n| self.row_limit(n).verdict).collect();
        ConditionReport {
            id: "c28",
            verdict: Verdict::all(&parts).downgrade(self.depth()).with_note(self.budget_note()),
            values: vec![],
        }
    }

    fn row_limit(&self, n: usize) -> LimitEstimate {
        let row = self.a.row(n, self.depth());
        let values: Vec<Rational> = row.iter().enumerate().map(|(k, x)| self.kernel.u(k) * x).collect();
        estimate_limit_with(&ScalarStream::from_values(values), self.t())
    }

    fn c38(&self) -> ConditionReport {
        if self.finite() {
            return ConditionReport {
                id: "c38",
                verdict: Verdict::certified_true().with_note("every row is finite"),
                values: vec![],
            };
        }
        let parts: Vec<Verdict> = (0..self.budget_rows())
            .map(|n| {
                let row = self.a.row(n, self.depth());
                let values: Vec<Rational> = row.iter().enumerate().map(|(k, x)| (self.kernel.u(k) * x).abs()).collect();
                estimate_sup(&ScalarStream::from_values(values), self.depth(), &self.t().threshold).verdict
            })
            .collect();
        ConditionReport {
            id: "c38",
            verdict: Verdict::all(&parts).downgrade(self.depth()).with_note(self.budget_note()),
            values: vec![],
        }
    }

    /// Conditions on the sequence `(a_n)` of row limits.
    fn row_limit_sequence(&self, id: &'static str) -> ConditionReport {
        if self.finite() {
            let values = if id == "c49" { vec![("a".to_string(), Rational::zero())] } else { vec![] };
            return ConditionReport { id, verdict: Verdict::certified_true().with_note("a_n = 0 for every n"), values };
        }
        let depth = self.depth();
        let mut seq = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let est = self.row_limit(n);
            match est.candidate {
                Some(v) if est.verdict.is_true() => seq.push(v),
                _ => {
                    return ConditionReport {
                        id,
                        verdict: Verdict::indeterminate(Some(depth))
                            .with_note(format!("row limit a_{n} not established")),
                        values: vec![],
                    }
                }
            }
        }
        let t = self.t();
        let (verdict, values) = match id {
            "c31" => {
                let abs: Vec<Rational> = seq.iter().map(|v| v.abs()).collect();
                let sup = estimate_sup(&ScalarStream::from_values(abs), depth, &t.threshold);
                (sup.verdict, vec![("sup_lower".to_string(), sup.lower_bound)])
            }
            "c49" => {
                let est = estimate_limit_with(&ScalarStream::from_values(seq), t);
                let values = est.candidate.iter().map(|a| ("a".to_string(), a.clone())).collect();
                (est.verdict, values)
            }
            _ => (estimate_limit_with(&ScalarStream::from_values(seq), t).equals(&Rational::zero(), &t.tol), vec![]),
        };
        ConditionReport { id, verdict: verdict.downgrade(depth), values }
    }

    fn c30(&self) -> ConditionReport {
        let sums: Vec<Rational> =
            self.abar.iter().map(|row| row.iter().fold(Rational::zero(), |acc, v| acc + v.abs())).collect();
        let stream =
            ScalarStream::from_values(sums).stable_from(if self.fully_known() { self.zero_tail() } else { None });
        let sup = estimate_sup(&stream, self.depth(), &self.t().threshold);
        let mut verdict = sup.verdict;
        if !self.finite() {
            verdict = verdict.downgrade(self.depth()).with_note(format!("row sums cut at column {}", self.depth()));
        }
        ConditionReport { id: "c30", verdict, values: vec![("sup_lower".into(), sup.lower_bound)] }
    }

    fn columns(&self, id: &'static str) -> ConditionReport {
        let stable = if self.fully_known() { self.zero_tail() } else { None };
        let mut parts = Vec::new();
        let mut values = Vec::new();
        for k in 0..=self.p.horizon {
            let column: Vec<Rational> = (0..=self.depth()).map(|n| self.abar_at(n, k)).collect();
            let est = estimate_limit_with(&ScalarStream::from_values(column).stable_from(stable), self.t());
            if let Some(c) = &est.candidate {
                values.push((format!("alpha_{k}"), c.clone()));
            }
            parts.push(if id == "c54" { est.equals(&Rational::zero(), &self.t().tol) } else { est.verdict });
        }
        let mut verdict = Verdict::all(&parts);
        if !verdict.is_certified() {
            verdict = verdict.with_note(format!("columns 0..={} checked", self.p.horizon));
        }
        ConditionReport { id, verdict, values }
    }

    fn row_sums(&self, id: &'static str) -> ConditionReport {
        let sums: Vec<Rational> =
            self.abar.iter().map(|row| row.iter().fold(Rational::zero(), |acc, v| acc + v)).collect();
        let stable = if self.fully_known() { self.zero_tail() } else { None };
        let est = estimate_limit_with(&ScalarStream::from_values(sums).stable_from(stable), self.t());
        let values = est.candidate.iter().map(|a| ("alpha".to_string(), a.clone())).collect();
        let mut verdict = if id == "c56" { est.equals(&Rational::zero(), &self.t().tol) } else { est.verdict };
        if !self.finite() {
            verdict = verdict.downgrade(self.depth());
        }
        ConditionReport { id, verdict, values }
    }
}

/// Classical conditions on the composed matrix `C`.
struct Reverse<'a> {
    c: MatrixOracle,
    p: &'a ClassParams,
    rows: Vec<Vec<Rational>>,
}

impl<'a> Reverse<'a> {
    fn new(a: &MatrixOracle, lambda: &Lambda, p: &'a ClassParams) -> Result<Self> {
        let depth = p.trunc.depth;
        let c = MatrixOracle::compose(a, lambda);
        let widest = (0..=depth).map(|n| c.row_len(n).unwrap_or(depth + 1)).max().unwrap_or(0);
        lambda.ensure(widest.max(depth) + 1)?;
        let rows = (0..=depth).map(|n| Forward::entries(&c, n, depth)).collect();
        Ok(Reverse { c, p, rows })
    }

    fn depth(&self) -> usize {
        self.p.trunc.depth
    }

    fn t(&self) -> &Truncation {
        &self.p.trunc
    }

    /// Row from which later rows are nonincreasing multiples tending to 0
    /// (or zero), when inside the scan and rows are finite.
    fn tail(&self) -> Option<usize> {
        if !self.c.has_finite_rows() {
            return None;
        }
        self.c.zero_rows_from().or(self.c.decay_from()).filter(|&s| s <= self.depth())
    }

    fn condition(&self, id: &'static str, class: &ClassId) -> ConditionReport {
        match id {
            "c13" | "c23" => self.columns(id),
            "c14" | "c22" => self.sup_rows(id, None),
            "lp_rows" => {
                let q = match class.source() {
                    SpaceId::Lp(p) => p.conjugate(),
                    _ => unreachable!("lp source"),
                };
                self.sup_rows(id, Some(q))
            }
            "c15" | "c24" => self.row_sums(id),
            other => unreachable!("no reverse condition {other}"),
        }
    }

    fn entry(&self, n: usize, k: usize) -> Rational {
        self.rows[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn columns(&self, id: &'static str) -> ConditionReport {
        if let Some(s) = self.tail() {
            let note = format!("rows from {s} are vanishing multiples of row {s}");
            let values = (0..=self.p.horizon).map(|k| (format!("limit_{k}"), Rational::zero())).collect();
            return ConditionReport { id, verdict: Verdict::certified_true().with_note(note), values };
        }
        let mut parts = Vec::new();
        let mut values = Vec::new();
        for k in 0..=self.p.horizon {
            let column: Vec<Rational> = (0..=self.depth()).map(|n| self.entry(n, k)).collect();
            let est = estimate_limit_with(&ScalarStream::from_values(column), self.t());
            if let Some(c) = &est.candidate {
                values.push((format!("limit_{k}"), c.clone()));
            }
            parts.push(if id == "c23" { est.equals(&Rational::zero(), &self.t().tol) } else { est.verdict });
        }
        let verdict = Verdict::all(&parts).with_note(format!("columns 0..={} checked", self.p.horizon));
        ConditionReport { id, verdict, values }
    }

    /// `sup_n sum_k |c_nk|`, or with `q`: `sup_n sum_k |c_nk|^q`
    /// (`None` inside means `q = oo`, i.e. `sup_nk |c_nk|`).
    fn sup_rows(&self, id: &'static str, q: Option<Option<Exponent>>) -> ConditionReport {
        let sums: Vec<Rational> = self
            .rows
            .iter()
            .map(|row| match &q {
                None => row.iter().fold(Rational::zero(), |acc, v| acc + v.abs()),
                Some(None) => row.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero),
                Some(Some(q)) => row.iter().fold(Rational::zero(), |acc, v| acc + abs_pow(v, q).hi),
            })
            .collect();
        let stream = ScalarStream::from_values(sums).stable_from(self.tail());
        let sup = estimate_sup(&stream, self.depth(), &self.t().threshold);
        let mut verdict = sup.verdict;
        if !self.c.has_finite_rows() {
            verdict = verdict.downgrade(self.depth()).with_note(format!("row sums cut at column {}", self.depth()));
        }
        ConditionReport { id, verdict, values: vec![("sup_lower".into(), sup.lower_bound)] }
    }

    fn row_sums(&self, id: &'static str) -> ConditionReport {
        if let Some(s) = self.tail() {
            return ConditionReport {
                id,
                verdict: Verdict::certified_true()
                    .with_note(format!("rows from {s} are vanishing multiples of row {s}")),
                values: vec![("limit".into(), Rational::zero())],
            };
        }
        let sums: Vec<Rational> =
            self.rows.iter().map(|row| row.iter().fold(Rational::zero(), |acc, v| acc + v)).collect();
        let est = estimate_limit_with(&ScalarStream::from_values(sums), self.t());
        let values = est.candidate.iter().map(|v| ("limit".to_string(), v.clone())).collect();
        let mut verdict = if id == "c24" { est.equals(&Rational::zero(), &self.t().tol) } else { est.verdict };
        if !self.c.has_finite_rows() {
            verdict = verdict.downgrade(self.depth());
        }
        ConditionReport { id, verdict, values }
    }
}

/// Evaluates every condition the class requires and their conjunction.
pub fn check_class(a: &MatrixOracle, lambda: &Lambda, class: &ClassId, params: &ClassParams) -> Result<ClassReport> {
    let conditions: Vec<ConditionReport> = if class.is_reverse() {
        let r = Reverse::new(a, lambda, params)?;
        class.conditions().iter().map(|id| r.condition(id, class)).collect()
    } else {
        let f = Forward::new(a, lambda, params)?;
        let p = match class.target() {
            SpaceId::Lp(p) => p.clone(),
            _ => Exponent::one(),
        };
        let mut out = Vec::new();
        for id in class.conditions() {
            out.push(match *id {
                "c25" => f.c25_with(&p)?,
                "c29" => LpSequence { f: &f, p: &p }.c29(),
                other => f.condition(other)?,
            });
        }
        out
    };
    let overall = Verdict::all(conditions.iter().map(|c| &c.verdict));
    Ok(ClassReport { class: class.clone(), conditions, overall })
}

/// `(a_n) in l_p` for the target exponent.
struct LpSequence<'a, 'b> {
    f: &'a Forward<'b>,
    p: &'a Exponent,
}

impl LpSequence<'_, '_> {
    fn c29(&self) -> ConditionReport {
        let f = self.f;
        if f.finite() {
            return ConditionReport {
                id: "c29",
                verdict: Verdict::certified_true().with_note("a_n = 0 for every n"),
                values: vec![],
            };
        }
        let depth = f.depth();
        let mut acc = Rational::zero();
        let mut partial = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let est = f.row_limit(n);
            match est.candidate {
                Some(v) if est.verdict.is_true() => {
                    acc += abs_pow(&v, self.p).hi;
                    partial.push(acc.clone());
                }
                _ => {
                    return ConditionReport {
                        id: "c29",
                        verdict: Verdict::indeterminate(Some(depth))
                            .with_note(format!("row limit a_{n} not established")),
                        values: vec![],
                    }
                }
            }
        }
        let verdict = estimate_limit_with(&ScalarStream::from_values(partial), f.t()).verdict.downgrade(depth);
        ConditionReport { id: "c29", verdict, values: vec![] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, Status};

    const ALL: &[&str] = &[
        "c_lambda_fhat->lp(2)",
        "c_lambda_fhat->l_inf",
        "c0_lambda_fhat->l1",
        "c0_lambda_fhat->l_inf",
        "c_lambda_fhat->c",
        "c_lambda_fhat->c0",
        "c0_lambda_fhat->c",
        "c0_lambda_fhat->c0",
        "c0->c0_lambda_fhat",
        "c->c0_lambda_fhat",
        "lp(2)->c0_lambda_fhat",
        "c0->c_lambda_fhat",
        "c->c_lambda_fhat",
        "l1->c_lambda_fhat",
    ];

    #[test]
    fn parse_and_admissibility() {
        for s in ALL {
            assert_eq!(ClassId::parse(s).unwrap().to_string(), *s);
        }
        assert!(matches!(ClassId::parse("c->l_inf"), Err(Error::InadmissibleClass(_))));
        assert!(ClassId::parse("c_lambda_fhat->lp(1/2)").is_err());
    }

    #[test]
    fn entry_examples() {
        let lam = Lambda::linear();
        assert_eq!(abar_nk_m(&MatrixOracle::zero(), &lam, 3, 1, 4).unwrap(), int(0));
        assert_eq!(abar_nk_m(&MatrixOracle::a00_only(), &lam, 0, 0, 5).unwrap(), int(1));
        assert_eq!(abar_nk_m(&MatrixOracle::row_e0(), &lam, 3, 0, 9).unwrap(), int(1));
        assert!(abar_nk_m(&MatrixOracle::row_e0(), &lam, 3, 4, 4).is_err());
        let t = Truncation::default();
        let e = abar_nk(&MatrixOracle::a00_only(), &lam, 0, 0, &t).unwrap();
        assert_eq!((e.candidate, e.verdict.status), (Some(int(1)), Status::CertifiedTrue));
        for n in [0, 4, 17] {
            assert_eq!(abar_nk(&MatrixOracle::row_e0(), &lam, n, 0, &t).unwrap().candidate, Some(int(1)));
        }
        let a5 = row_limit_a_n(&MatrixOracle::identity(), &lam, 5, &t).unwrap();
        assert_eq!((a5.candidate, a5.verdict.status), (Some(int(0)), Status::CertifiedTrue));
    }

    #[test]
    fn zero_matrix_is_certified_everywhere() {
        let lam = Lambda::linear();
        let params = ClassParams { trunc: Truncation::default().with_depth(40), ..Default::default() };
        for s in ALL {
            let class = ClassId::parse(s).unwrap();
            let r = check_class(&MatrixOracle::zero(), &lam, &class, &params).unwrap();
            assert_eq!(r.overall.status, Status::CertifiedTrue, "{s}: {:?}", r.conditions);
            let ids: Vec<&str> = r.conditions.iter().map(|c| c.id).collect();
            assert_eq!(ids, class.conditions());
        }
    }

    #[test]
    fn identity_fails_bounded_target() {
        let lam = Lambda::linear();
        let params = ClassParams { trunc: Truncation::default().with_depth(60), ..Default::default() };
        let class = ClassId::parse("c_lambda_fhat->l_inf").unwrap();
        let r = check_class(&MatrixOracle::identity(), &lam, &class, &params).unwrap();
        assert_eq!(r.condition("c30").unwrap().verdict.status, Status::EmpiricalFalse);
        assert!(r.overall.is_false());
    }

    #[test]
    fn row_e0_maps_into_convergent() {
        let lam = Lambda::linear();
        let class = ClassId::parse("c_lambda_fhat->c").unwrap();
        let r = check_class(&MatrixOracle::row_e0(), &lam, &class, &ClassParams::default()).unwrap();
        assert_eq!(r.overall.status, Status::EmpiricalTrue);
        let c50 = r.condition("c50").unwrap();
        assert_eq!(c50.value("alpha_0"), Some(&int(1)));
        assert_eq!(c50.value("alpha_3"), Some(&int(0)));
        assert_eq!(r.condition("c51").unwrap().value("alpha"), Some(&int(1)));
        assert_eq!(r.condition("c49").unwrap().value("a"), Some(&int(0)));
        assert_eq!(r.condition("c30").unwrap().value("sup_lower"), Some(&int(1)));
    }

    #[test]
    fn finite_rank_reverse_classes_certify() {
        let lam = Lambda::linear();
        let class = ClassId::parse("c->c_lambda_fhat").unwrap();
        let r = check_class(&MatrixOracle::a00_only(), &lam, &class, &ClassParams::default()).unwrap();
        assert_eq!(r.overall.status, Status::CertifiedTrue);
    }
}
