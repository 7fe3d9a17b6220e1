//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use fibspace_core::classes::{check_class, ClassId, ClassParams};
use fibspace_core::compactness::{
    compactness, hmnc_estimate, operator_norm_linf, tail_norm, CompactParams, CompactTarget, HmncKind, TailKind,
};
use fibspace_core::duals::{abel_identity_defect, check_b4, check_beta_conditions, row_sum_identity_defect};
use fibspace_core::matrices::{verify_inverse, MatrixOracle};
use fibspace_core::numerics::rational::ten_pow_neg;
use fibspace_core::numerics::{
    cassini_residual, fib_sum_residual, frac, golden_ratio_gap, int, render, Lambda, Rational, Status, Truncation,
};
use fibspace_core::spaces::{
    expand_in_basis, fbar_prefix, fhat_prefix, inverse_prefix, inverse_transform, space_norm, SequenceOracle, SpaceId,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned parameters and tolerances.
const SEED: u64 = 20_240_601;
const IDENTITY_MAX_N: usize = 200;
const GAP_RANGE: (usize, usize) = (2, 60);
const GAP_FINAL_EXP: u32 = 10;
const INVERSE_ORDER: usize = 48;
const WITNESS_LAST: usize = 64;
const BASIS_K_MAX: usize = 12;
const BASIS_LAST: usize = 48;
const ROUNDTRIP_SAMPLES: usize = 100;
const ROUNDTRIP_SUPPORT: usize = 24;
const ROUNDTRIP_SCAN: usize = 48;
const RESIDUAL_M_MAX: usize = 30;
const RESIDUAL_SCAN: usize = 64;
const DUAL_SAMPLES: usize = 50;
const DUAL_N_MAX: usize = 60;
const B4_THRESHOLD: i64 = 1_000_000;
const B4_DEPTH: usize = 200;
const DIVERGENCE_DEPTH: usize = 60;
const TAIL_M_MAX: usize = 8;
const BV_SAMPLES: usize = 20;
const BV_HORIZON: usize = 10;
const MAX_SECONDS: f64 = 10.0;

type Check = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Check>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lambdas() -> Vec<Lambda> {
    vec![Lambda::linear(), Lambda::affine(int(2), int(1)).unwrap(), Lambda::geometric(int(2)).unwrap()]
}

fn unit_at(k: usize) -> impl Fn(usize) -> Rational {
    move |n| if n == k { int(1) } else { int(0) }
}

fn agree(got: &[Rational], want: impl Fn(usize) -> Rational, what: &str) -> Result<(), String> {
    match got.iter().enumerate().find(|(n, v)| **v != want(*n)) {
        Some((n, v)) => Err(format!("{what}: index {n} gives {}, expected {}", render(v), render(&want(n)))),
        None => Ok(()),
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-50..=50), rng.gen_range(1..=12))
}

fn random_table(rng: &mut ChaCha8Rng, support: usize) -> SequenceOracle {
    let len = rng.gen_range(1..=support);
    SequenceOracle::table((0..len).map(|_| random_rational(rng)).collect())
}

fn fibonacci_identities() -> Check {
    for n in 1..=IDENTITY_MAX_N {
        let r = cassini_residual(n).map_err(|e| e.to_string())?;
        ensure(r.is_zero(), || format!("Cassini residual {} at n = {n}", render(&r)))?;
    }
    for n in 0..=IDENTITY_MAX_N {
        ensure(fib_sum_residual(n).is_zero(), || format!("sum residual nonzero at n = {n}"))?;
    }
    let (lo, hi) = GAP_RANGE;
    let gaps: Vec<_> = (lo..=hi).map(|n| golden_ratio_gap(n).unwrap()).collect();
    for (i, w) in gaps.windows(2).enumerate() {
        ensure(w[1].hi < w[0].lo, || format!("gap enclosures not strictly decreasing at n = {}", lo + i + 1))?;
    }
    let last = gaps.last().unwrap();
    ensure(last.hi < ten_pow_neg(GAP_FINAL_EXP), || "final gap not below 1e-10".into())?;
    Ok(format!("residuals 0 for n <= {IDENTITY_MAX_N}; gaps decreasing on {lo}..={hi}, final < 1e-{GAP_FINAL_EXP}"))
}

fn inverse_identity() -> Check {
    for lam in lambdas() {
        let v = verify_inverse(&lam, INVERSE_ORDER).map_err(|e| e.to_string())?;
        ensure(v.status == Status::CertifiedTrue, || format!("{lam}: {:?}", v.note))?;
    }
    Ok(format!("both products equal I on {INVERSE_ORDER}x{INVERSE_ORDER} blocks for linear, affine(2,1), geometric(2)"))
}

fn witness_closed_forms() -> Check {
    let fs = SequenceOracle::fib_square();
    agree(&fhat_prefix(&fs, WITNESS_LAST), unit_at(0), "F-hat(f_(k+1)^2)")?;
    for lam in lambdas() {
        let got = fbar_prefix(&fs, &lam, WITNESS_LAST).map_err(|e| e.to_string())?;
        agree(&got, |n| lam.at(0) / lam.at(n), &format!("F-bar(f_(k+1)^2) under {lam}"))?;
        let got = fbar_prefix(&SequenceOracle::b_seq(), &lam, WITNESS_LAST).map_err(|e| e.to_string())?;
        agree(&got, |_| int(1), &format!("F-bar(b) under {lam}"))?;
        for k in 0..=BASIS_K_MAX {
            let got = fbar_prefix(&SequenceOracle::basis(k, &lam), &lam, BASIS_LAST).map_err(|e| e.to_string())?;
            agree(&got, unit_at(k), &format!("F-bar(b({k})) under {lam}"))?;
        }
    }
    Ok(format!("closed forms exact on 0..={WITNESS_LAST}; basis k <= {BASIS_K_MAX} on 0..={BASIS_LAST}"))
}

fn isomorphism_roundtrip(rng: &mut ChaCha8Rng) -> Check {
    let lam = Lambda::linear();
    let t = Truncation::default().with_depth(ROUNDTRIP_SCAN);
    for i in 0..ROUNDTRIP_SAMPLES {
        let y = random_table(rng, ROUNDTRIP_SUPPORT);
        let x = inverse_prefix(&y, &lam, ROUNDTRIP_SCAN).map_err(|e| e.to_string())?;
        if i < 5 {
            for k in [0, 7, ROUNDTRIP_SUPPORT] {
                let direct = inverse_transform(&y, &lam, k).map_err(|e| e.to_string())?;
                ensure(direct == x[k], || format!("sample {i}: running sum and double sum differ at k = {k}"))?;
            }
        }
        let x = SequenceOracle::table(x);
        let back = fbar_prefix(&x, &lam, ROUNDTRIP_SCAN).map_err(|e| e.to_string())?;
        agree(&back, |n| y.get(n), &format!("sample {i}: F-bar(inverse(y))"))?;
        let norm = space_norm(&x, &lam, &t).map_err(|e| e.to_string())?;
        let want = y.prefix(ROUNDTRIP_SUPPORT).iter().map(|v| v.abs()).max().unwrap();
        ensure(norm.value == want, || format!("sample {i}: norm {} != max|y| {}", render(&norm.value), render(&want)))?;
    }
    Ok(format!("{ROUNDTRIP_SAMPLES} samples, support <= {ROUNDTRIP_SUPPORT}"))
}

fn residual_law() -> Check {
    let lam = Lambda::linear();
    let t = Truncation::default().with_depth(RESIDUAL_SCAN);
    let fs = SequenceOracle::fib_square();
    for m in 0..=RESIDUAL_M_MAX {
        let e = expand_in_basis(&fs, &lam, &SpaceId::C0Lambda, m, &t).map_err(|e| e.to_string())?;
        let want = frac(1, m as i64 + 2);
        ensure(e.residual.as_ref() == Some(&want), || {
            format!("m = {m}: residual {:?}", e.residual.as_ref().map(render))
        })?;
    }
    Ok(format!("residual = 1/(m+2) for m <= {RESIDUAL_M_MAX}"))
}

fn non_absoluteness() -> Check {
    let lam = Lambda::linear();
    let t = Truncation::default();
    let signed = space_norm(&SequenceOracle::table(vec![int(1), int(-4)]), &lam, &t).map_err(|e| e.to_string())?;
    let absolute = space_norm(&SequenceOracle::table(vec![int(1), int(4)]), &lam, &t).map_err(|e| e.to_string())?;
    ensure(signed.value == frac(3, 2), || format!("norm of (1,-4) is {}", render(&signed.value)))?;
    ensure(absolute.value == frac(5, 3), || format!("norm of (1,4) is {}", render(&absolute.value)))?;
    ensure(signed.value != absolute.value, || "norms coincide".into())?;
    Ok("||(1,-4)|| = 3/2, ||(1,4)|| = 5/3".into())
}

fn dual_identities(rng: &mut ChaCha8Rng) -> Check {
    let lam = Lambda::linear();
    for i in 0..DUAL_SAMPLES {
        let a = random_table(rng, ROUNDTRIP_SUPPORT);
        let y = random_table(rng, ROUNDTRIP_SUPPORT);
        for n in 0..=DUAL_N_MAX {
            let d = abel_identity_defect(&a, &y, &lam, n).map_err(|e| e.to_string())?;
            ensure(d.is_zero(), || format!("sample {i}: Abel defect {} at n = {n}", render(&d)))?;
            let d = row_sum_identity_defect(&a, &lam, n).map_err(|e| e.to_string())?;
            ensure(d.is_zero(), || format!("sample {i}: row-sum defect {} at n = {n}", render(&d)))?;
        }
    }
    let t = Truncation::default();
    let r = check_beta_conditions(&SequenceOracle::unit_vector(0), &lam, &t).map_err(|e| e.to_string())?;
    for (name, c) in [("b2", &r.b2), ("b3", &r.b3), ("b4", &r.b4)] {
        ensure(c.verdict.is_true(), || format!("e(0) fails {name}: {:?}", c.verdict.status))?;
        ensure(c.bound == Some(int(1)), || format!("e(0) {name} bound {:?}", c.bound.as_ref().map(render)))?;
    }
    let t4 = Truncation { depth: B4_DEPTH, threshold: int(B4_THRESHOLD), ..Truncation::default() };
    let b4 = check_b4(&SequenceOracle::unit(), &lam, &t4).map_err(|e| e.to_string())?;
    let reached =
        b4.bound.as_ref().map(|b| format!("{:.3}", fibspace_core::numerics::rational::to_f64(b))).unwrap_or_default();
    ensure(b4.verdict.is_false(), || {
        format!(
            "a = e: b4 reports {} at depth {B4_DEPTH}; running sup reaches {reached}, below the threshold {B4_THRESHOLD}",
            b4.verdict.status.as_str()
        )
    })?;
    Ok(format!("identities exact for {DUAL_SAMPLES} samples, n <= {DUAL_N_MAX}; e(0) bounds (1,1,1); e fails b4"))
}

fn all_spaces() -> Vec<SpaceId> {
    ["c0", "c", "l_inf", "l1", "lp(2)", "lp(3/2)", "c0_lambda_fhat", "c_lambda_fhat"]
        .iter()
        .map(|s| SpaceId::parse(s).unwrap())
        .collect()
}

fn class_checks() -> Check {
    let lam = Lambda::linear();
    let params = ClassParams::default();
    let zero = MatrixOracle::zero();
    let mut classes = 0;
    for src in all_spaces() {
        for tgt in all_spaces() {
            let Ok(id) = ClassId::new(src.clone(), tgt.clone()) else { continue };
            classes += 1;
            let r = check_class(&zero, &lam, &id, &params).map_err(|e| e.to_string())?;
            ensure(r.overall.status == Status::CertifiedTrue, || format!("zero in {id}: {:?}", r.overall.status))?;
        }
    }
    let shallow = ClassParams { trunc: Truncation::default().with_depth(DIVERGENCE_DEPTH), ..ClassParams::default() };
    let id = ClassId::parse("c_lambda_fhat->l_inf").unwrap();
    let r = check_class(&MatrixOracle::identity(), &lam, &id, &shallow).map_err(|e| e.to_string())?;
    let c30 = r.condition("c30").ok_or("identity report lacks c30")?;
    ensure(c30.verdict.is_false(), || format!("identity c30: {:?}", c30.verdict.status))?;
    let id = ClassId::parse("c_lambda_fhat->c").unwrap();
    let r = check_class(&MatrixOracle::row_e0(), &lam, &id, &params).map_err(|e| e.to_string())?;
    ensure(r.overall.is_true(), || format!("row_e0 overall {:?}", r.overall.status))?;
    let c50 = r.condition("c50").ok_or("missing c50")?;
    let c51 = r.condition("c51").ok_or("missing c51")?;
    let c49 = r.condition("c49").ok_or("missing c49")?;
    ensure(c50.value("alpha_0") == Some(&int(1)), || "alpha_0 != 1".into())?;
    ensure(c51.value("alpha") == Some(&int(1)), || "alpha != 1".into())?;
    ensure(c49.value("a") == Some(&int(0)), || "a != 0".into())?;
    Ok(format!("zero certified in {classes} classes; identity fails c30 by depth {DIVERGENCE_DEPTH}; row_e0 alpha_0 = 1, alpha = 1, a = 0"))
}

fn compactness_checks() -> Check {
    let lam = Lambda::linear();
    let p = CompactParams::default();
    let a00 = MatrixOracle::a00_only();
    let norm = operator_norm_linf(&a00, &lam, &p.trunc).map_err(|e| e.to_string())?;
    ensure(norm.value == int(1), || format!("a00_only norm bound {}", render(&norm.value)))?;
    for m in 0..=TAIL_M_MAX {
        let v = tail_norm(&a00, &lam, m, TailKind::LinfLike, &p).map_err(|e| e.to_string())?;
        ensure(v.is_zero(), || format!("a00_only tail at m = {m} is {}", render(&v)))?;
    }
    let r = compactness(&a00, &lam, CompactTarget::C0, &p).map_err(|e| e.to_string())?;
    ensure(r.hmnc.kind == HmncKind::Equality && r.hmnc.upper.is_zero(), || {
        format!("a00_only hmnc {:?}", r.hmnc.to_json())
    })?;
    ensure(r.verdict.status == Status::CertifiedTrue, || format!("a00_only compactness {:?}", r.verdict.status))?;

    let row = MatrixOracle::row_e0();
    for m in 0..=TAIL_M_MAX {
        let v = tail_norm(&row, &lam, m, TailKind::LinfLike, &p).map_err(|e| e.to_string())?;
        ensure(v == int(1), || format!("row_e0 tail at m = {m} is {}", render(&v)))?;
    }
    let r = compactness(&row, &lam, CompactTarget::C, &p).map_err(|e| e.to_string())?;
    ensure(r.hmnc.kind == HmncKind::Interval, || "row_e0 target c is not an interval".into())?;
    ensure(r.hmnc.lower == frac(1, 2) && r.hmnc.upper == int(1), || format!("row_e0 interval {:?}", r.hmnc.to_json()))?;
    ensure(r.verdict.is_false(), || format!("row_e0 target c: {:?}", r.verdict.status))?;
    let r = compactness(&row, &lam, CompactTarget::LInf, &p).map_err(|e| e.to_string())?;
    ensure(r.verdict.status == Status::Indeterminate, || format!("row_e0 target l_inf: {:?}", r.verdict.status))?;
    Ok("a00_only compact (HMNC 0); row_e0 HMNC in [1/2, 1], not compact into c, indeterminate into l_inf".into())
}

fn random_sparse(rng: &mut ChaCha8Rng) -> MatrixOracle {
    let count = rng.gen_range(1..=12);
    let entries = (0..count).map(|_| (rng.gen_range(0..14), rng.gen_range(0..14), random_rational(rng))).collect();
    MatrixOracle::sparse(entries)
}

fn bv_agreement(rng: &mut ChaCha8Rng) -> Check {
    let lam = Lambda::linear();
    let p = CompactParams { horizon: BV_HORIZON, ..CompactParams::default() };
    for i in 0..BV_SAMPLES {
        let a = random_sparse(rng);
        let diff = MatrixOracle::row_difference(&a);
        for m in 0..=TAIL_M_MAX {
            let bv = tail_norm(&a, &lam, m, TailKind::Bv, &p).map_err(|e| e.to_string())?;
            let l1 = tail_norm(&diff, &lam, m, TailKind::L1, &p).map_err(|e| e.to_string())?;
            ensure(bv == l1, || {
                format!("sample {i}, m = {m}: bv {} vs l1 of differences {}", render(&bv), render(&l1))
            })?;
        }
    }
    // The c-sandwich must hold on the same family.
    let h = hmnc_estimate(&random_sparse(rng), &lam, CompactTarget::C, &p).map_err(|e| e.to_string())?;
    ensure(h.lower.clone() * int(2) == h.upper, || "c interval is not [v/2, v]".into())?;
    Ok(format!("{BV_SAMPLES} sparse matrices, m <= {TAIL_M_MAX}, horizon {BV_HORIZON}"))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("Fibonacci identities", Box::new(|_| fibonacci_identities())),
        ("inverse identity", Box::new(|_| inverse_identity())),
        ("witness closed forms", Box::new(|_| witness_closed_forms())),
        ("isomorphism roundtrip", Box::new(isomorphism_roundtrip)),
        ("expansion residual law", Box::new(|_| residual_law())),
        ("non-absolute norm", Box::new(|_| non_absoluteness())),
        ("dual identities and conditions", Box::new(dual_identities)),
        ("class checks", Box::new(|_| class_checks())),
        ("compactness", Box::new(|_| compactness_checks())),
        ("bv path agreement", Box::new(bv_agreement)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut rng);
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|d| {
            if secs < MAX_SECONDS {
                Ok(d)
            } else {
                Err(format!("{d}; took {secs:.1}s, budget {MAX_SECONDS}s"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {reason} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
