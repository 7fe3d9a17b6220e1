//! Built-in verification suite: exact identities, roundtrips and the
//! witness table, sized down automatically for shallow truncations.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::compactness::{operator_norm_linf, tail_norm, CompactParams, TailKind};
use crate::duals::{abel_identity_defect, row_sum_identity_defect};
use crate::error::{Error, Result};
use crate::matrices::{verify_inverse, MatrixOracle};
use crate::numerics::rational::ten_pow_neg;
use crate::numerics::{
    cassini_residual, fib_sum_residual, frac, golden_ratio_gap, int, render, Lambda, Rational, Truncation,
};
use crate::spaces::{
    basis_vector, expand_in_basis, fbar_prefix, fhat_prefix, inclusion_witness, inverse_prefix, space_norm,
    verify_witness, SequenceOracle, SpaceId, WITNESS_NAMES,
};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Builtin sequences the corruption hook can perturb.
pub const CORRUPTIBLE: &[&str] = &["fib_square", "b_seq", "unit", "sign_witness"];

#[derive(Debug, Clone)]
pub struct SelftestParams {
    pub trunc: Truncation,
    pub seed: u64,
    /// Perturbs `x_0` of the named builtin before any check sees it.
    pub corrupt: Option<String>,
}

impl Default for SelftestParams {
    fn default() -> Self {
        SelftestParams { trunc: Truncation::default(), seed: DEFAULT_SEED, corrupt: None }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

struct Suite<'a> {
    lambda: &'a Lambda,
    params: &'a SelftestParams,
    checks: Vec<CheckOutcome>,
}

impl Suite<'_> {
    fn record(&mut self, name: &str, outcome: Result<std::result::Result<String, String>>) {
        let (passed, detail) = match outcome {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(CheckOutcome { name: name.to_string(), passed, detail });
    }

    fn depth(&self) -> usize {
        self.params.trunc.depth
    }

    fn builtin(&self, name: &str) -> Result<SequenceOracle> {
        let x = SequenceOracle::builtin(name, self.lambda)?;
        if self.params.corrupt.as_deref() != Some(name) {
            return Ok(x);
        }
        let orig = x.clone();
        Ok(SequenceOracle::new(
            format!("{name} (corrupted)"),
            move |k| {
                if k == 0 {
                    orig.get(0) + int(1)
                } else {
                    orig.get(k)
                }
            },
        ))
    }
}

type Outcome = Result<std::result::Result<String, String>>;

fn first_mismatch(got: &[Rational], want: impl Fn(usize) -> Rational) -> Option<usize> {
    got.iter().enumerate().position(|(i, v)| *v != want(i))
}

fn fib_identities(s: &Suite) -> Outcome {
    let last = s.depth().min(200);
    for n in 1..=last {
        let r = cassini_residual(n)?;
        if !r.is_zero() {
            return Ok(Err(format!("Cassini residual {} at n = {n}", render(&r))));
        }
    }
    if let Some(n) = (0..=last).find(|&n| !fib_sum_residual(n).is_zero()) {
        return Ok(Err(format!("sum-formula residual nonzero at n = {n}")));
    }
    let gap_last = s.depth().min(60);
    let mut prev = golden_ratio_gap(2.min(gap_last.max(1)))?;
    for n in 3..=gap_last {
        let gap = golden_ratio_gap(n)?;
        if gap.hi >= prev.lo {
            return Ok(Err(format!("golden-ratio gap not strictly decreasing at n = {n}")));
        }
        prev = gap;
    }
    if gap_last >= 60 && prev.hi >= ten_pow_neg(10) {
        return Ok(Err("final golden-ratio gap not below 1e-10".into()));
    }
    Ok(Ok(format!("residuals zero for n <= {last}; gaps decreasing on 2..={gap_last}")))
}

fn inverse_identity(s: &Suite) -> Outcome {
    let order = s.depth().min(48);
    let mut lambdas = vec![Lambda::linear(), Lambda::affine(int(2), int(1))?, Lambda::geometric(int(2))?];
    if !lambdas.contains(s.lambda) {
        lambdas.push(s.lambda.clone());
    }
    for lam in &lambdas {
        let v = verify_inverse(lam, order)?;
        if !v.is_true() {
            return Ok(Err(format!("{lam}: {}", v.note.unwrap_or_default())));
        }
    }
    Ok(Ok(format!("exact on {order}x{order} truncations for {} weight families", lambdas.len())))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

fn random_table(rng: &mut ChaCha8Rng, max_support: usize) -> Vec<Rational> {
    let len = rng.gen_range(1..=max_support);
    (0..len).map(|_| random_rational(rng)).collect()
}

fn roundtrip(s: &Suite, rng: &mut ChaCha8Rng) -> Outcome {
    let support = s.depth().clamp(1, 24);
    let scan = s.depth().min(48).max(support);
    let samples = if s.depth() >= 48 { 100 } else { 20 };
    for i in 0..samples {
        let y = SequenceOracle::table(random_table(rng, support));
        let x = SequenceOracle::table(inverse_prefix(&y, s.lambda, scan)?);
        let back = fbar_prefix(&x, s.lambda, scan)?;
        if let Some(n) = first_mismatch(&back, |n| y.get(n)) {
            return Ok(Err(format!("sample {i}: F-bar(inverse(y)) differs from y at n = {n}")));
        }
        let norm = space_norm(&x, s.lambda, &s.params.trunc.with_depth(scan))?;
        let want = y.prefix(scan).into_iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
        if norm.value != want {
            return Ok(Err(format!("sample {i}: norm {} but max|y| = {}", render(&norm.value), render(&want))));
        }
    }
    Ok(Ok(format!("{samples} samples, support <= {support}, scan {scan}")))
}

fn witness_fib_square(s: &Suite) -> Outcome {
    let last = s.depth().min(64);
    let x = s.builtin("fib_square")?;
    if let Some(n) = first_mismatch(&fhat_prefix(&x, last), |n| if n == 0 { int(1) } else { int(0) }) {
        return Ok(Err(format!("F-hat(fib_square) differs from e(0) at {n}")));
    }
    let lam = s.lambda;
    if let Some(n) = first_mismatch(&fbar_prefix(&x, lam, last)?, |n| lam.at(0) / lam.at(n)) {
        return Ok(Err(format!("F-bar(fib_square) differs from lambda_0/lambda_n at {n}")));
    }
    Ok(Ok(format!("closed forms exact on 0..={last}")))
}

fn witness_b_seq(s: &Suite) -> Outcome {
    let last = s.depth().min(64);
    let b = s.builtin("b_seq")?;
    if let Some(n) = first_mismatch(&fbar_prefix(&b, s.lambda, last)?, |_| Rational::one()) {
        return Ok(Err(format!("F-bar(b) differs from the all-ones sequence at {n}")));
    }
    Ok(Ok(format!("F-bar(b) = e exact on 0..={last}")))
}

fn witness_basis(s: &Suite) -> Outcome {
    let last = s.depth().min(48);
    let kmax = (s.depth() / 4).min(12);
    for k in 0..=kmax {
        let bk = SequenceOracle::basis(k, s.lambda);
        let got = fbar_prefix(&bk, s.lambda, last)?;
        if let Some(n) = first_mismatch(&got, |n| if n == k { int(1) } else { int(0) }) {
            return Ok(Err(format!("F-bar(b({k})) differs from e({k}) at {n}")));
        }
        if let Some(n) = (0..=last).find(|&n| bk.get(n) != basis_vector(k, n, s.lambda)) {
            return Ok(Err(format!("basis({k}) oracle disagrees with the closed form at {n}")));
        }
    }
    Ok(Ok(format!("k <= {kmax}, indices <= {last}")))
}

fn basis_consistency(s: &Suite) -> Outcome {
    let x = s.builtin("fib_square")?;
    let t = s.params.trunc.with_depth(s.depth().min(64));
    let mmax = (s.depth() / 4).min(30);
    for m in 0..=mmax {
        let e = expand_in_basis(&x, s.lambda, &SpaceId::C0Lambda, m, &t)?;
        let want = s.lambda.at(0) / s.lambda.at(m + 1);
        if e.residual.as_ref() != Some(&want) {
            let got = e.residual.as_ref().map(render).unwrap_or_else(|| "none".into());
            return Ok(Err(format!("residual after {m} terms is {got}, expected {}", render(&want))));
        }
    }
    Ok(Ok(format!("fib_square residual lambda_0/lambda_(m+1) for m <= {mmax}")))
}

fn dual_identities(s: &Suite, rng: &mut ChaCha8Rng) -> Outcome {
    let nmax = s.depth().min(60);
    let samples = if s.depth() >= 60 { 50 } else { 10 };
    for i in 0..samples {
        let a = SequenceOracle::table(random_table(rng, 24));
        let y = SequenceOracle::table(random_table(rng, 24));
        for n in 0..=nmax {
            let d = abel_identity_defect(&a, &y, s.lambda, n)?;
            if !d.is_zero() {
                return Ok(Err(format!("sample {i}: Abel-summation defect {} at n = {n}", render(&d))));
            }
            let d = row_sum_identity_defect(&a, s.lambda, n)?;
            if !d.is_zero() {
                return Ok(Err(format!("sample {i}: row-sum defect {} at n = {n}", render(&d))));
            }
        }
    }
    Ok(Ok(format!("{samples} samples, n <= {nmax}")))
}

fn tail_monotonicity(s: &Suite) -> Outcome {
    let p = CompactParams { trunc: s.params.trunc.with_depth(s.depth().min(40)), ..CompactParams::default() };
    let mmax = (p.trunc.depth / 2).min(8);
    for name in ["zero", "identity", "a00_only", "row_e0"] {
        let a = MatrixOracle::builtin(name, s.lambda)?;
        let norm = operator_norm_linf(&a, s.lambda, &p.trunc)?.value;
        let mut prev: Option<Rational> = None;
        for m in 0..=mmax {
            let v = tail_norm(&a, s.lambda, m, TailKind::LinfLike, &p)?;
            if v > norm {
                return Ok(Err(format!("{name}: tail norm at m = {m} exceeds the operator norm")));
            }
            if prev.as_ref().is_some_and(|q| v > *q) {
                return Ok(Err(format!("{name}: tail norm increases at m = {m}")));
            }
            prev = Some(v);
        }
    }
    Ok(Ok(format!("nonincreasing on m <= {mmax} at depth {}", p.trunc.depth)))
}

/// Divergent witnesses only cross the threshold past this depth.
const WITNESS_MIN_DEPTH: usize = 64;

fn witness_table(s: &Suite) -> Outcome {
    let t = s.params.trunc.with_depth(s.depth().max(WITNESS_MIN_DEPTH));
    let mut rows = 0;
    for name in WITNESS_NAMES {
        let name = name.replace("(k)", "(3)");
        let mut w = inclusion_witness(&name, s.lambda)?;
        if CORRUPTIBLE.contains(&name.as_str()) {
            w.oracle = s.builtin(&name)?;
        }
        for check in verify_witness(&w, s.lambda, &t)? {
            rows += 1;
            if !check.agrees() {
                return Ok(Err(format!(
                    "{name} in {}: expected {}, got {}",
                    check.space,
                    check.expected,
                    check.verdict.status.as_str()
                )));
            }
        }
    }
    Ok(Ok(format!("{rows} membership rows agree at depth {}", t.depth)))
}

/// Runs every check under `lambda`.
pub fn run_selftest(lambda: &Lambda, params: &SelftestParams) -> Result<SelftestReport> {
    if let Some(name) = &params.corrupt {
        if !CORRUPTIBLE.contains(&name.as_str()) {
            return Err(Error::UnknownBuiltin(format!("{name} (corruptible: {})", CORRUPTIBLE.join(", "))));
        }
    }
    lambda.check_window(params.trunc.depth + 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut suite = Suite { lambda, params, checks: Vec::new() };
    suite.record("fibonacci_identities", fib_identities(&suite));
    suite.record("inverse_identity", inverse_identity(&suite));
    let r = roundtrip(&suite, &mut rng);
    suite.record("roundtrip", r);
    suite.record("witness:fib_square", witness_fib_square(&suite));
    suite.record("witness:b_seq", witness_b_seq(&suite));
    suite.record("witness:basis", witness_basis(&suite));
    suite.record("basis_consistency", basis_consistency(&suite));
    let r = dual_identities(&suite, &mut rng);
    suite.record("dual_identities", r);
    suite.record("tail_norm_monotonicity", tail_monotonicity(&suite));
    suite.record("witness_table", witness_table(&suite));
    Ok(SelftestReport { checks: suite.checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shallow() -> SelftestParams {
        SelftestParams { trunc: Truncation::default().with_depth(8), ..SelftestParams::default() }
    }

    #[test]
    fn shallow_suite_passes() {
        let r = run_selftest(&Lambda::linear(), &shallow()).unwrap();
        assert!(r.passed(), "{:?}", r.to_json());
    }

    #[test]
    fn corruption_fails_a_named_check() {
        let params = SelftestParams { corrupt: Some("fib_square".into()), ..shallow() };
        let r = run_selftest(&Lambda::linear(), &params).unwrap();
        assert!(r.failures().contains(&"witness:fib_square"), "{:?}", r.to_json());
        let params = SelftestParams { corrupt: Some("b_seq".into()), ..shallow() };
        assert!(run_selftest(&Lambda::linear(), &params).unwrap().failures().contains(&"witness:b_seq"));
        let params = SelftestParams { corrupt: Some("nope".into()), ..shallow() };
        assert!(run_selftest(&Lambda::linear(), &params).is_err());
    }
}
