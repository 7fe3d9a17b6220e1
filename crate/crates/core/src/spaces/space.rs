use std::fmt;

use num_traits::{Signed, Zero};

use super::sequence::SequenceOracle;
use super::transform::fbar_prefix;
use crate::error::{Error, Result};
use crate::numerics::{
    abs_pow, estimate_limit_with, estimate_sup, estimate_sup_abs, parse_rational, render, Exponent, Lambda, Rational,
    ScalarStream, Status, Truncation, Verdict,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceId {
    C0,
    C,
    LInf,
    Lp(Exponent),
    C0Lambda,
    CLambda,
}

impl SpaceId {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        Ok(match t {
            "c0" => SpaceId::C0,
            "c" => SpaceId::C,
            "l_inf" | "linf" => SpaceId::LInf,
            "l1" => SpaceId::Lp(Exponent::one()),
            "c0_lambda_fhat" => SpaceId::C0Lambda,
            "c_lambda_fhat" => SpaceId::CLambda,
            _ => {
                let inner = t
                    .strip_prefix("lp(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::UnknownSpace(t.to_string()))?;
                let p = parse_rational(inner).map_err(|_| Error::UnknownSpace(t.to_string()))?;
                SpaceId::Lp(Exponent::new(p)?)
            }
        })
    }

    pub fn is_lambda_space(&self) -> bool {
        matches!(self, SpaceId::C0Lambda | SpaceId::CLambda)
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceId::C0 => write!(f, "c0"),
            SpaceId::C => write!(f, "c"),
            SpaceId::LInf => write!(f, "l_inf"),
            SpaceId::Lp(p) if p.as_integer() == Some(1) => write!(f, "l1"),
            SpaceId::Lp(p) => write!(f, "lp({})", render(p.value())),
            SpaceId::C0Lambda => write!(f, "c0_lambda_fhat"),
            SpaceId::CLambda => write!(f, "c_lambda_fhat"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    /// Exact `max_{n <= depth} |fbar_n(x)|`, a lower bound for the norm.
    pub value: Rational,
    pub argmax: usize,
    pub verdict: Verdict,
}

/// `sup_n |fbar_n(x)|` at finite depth.
///
/// A known closed form of the transform, or finite support (after which
/// `|fbar_n(x)|` is a constant over the increasing weights), pins the
/// supremum inside the scan and certifies boundedness.
pub fn space_norm(x: &SequenceOracle, lambda: &Lambda, t: &Truncation) -> Result<NormEstimate> {
    let values = fbar_prefix(x, lambda, t.depth)?;
    let abs: Vec<Rational> = values.iter().map(|v| v.abs()).collect();
    let stream = ScalarStream::from_values(abs.clone());
    let sup = estimate_sup(&stream, t.depth, &t.threshold);
    let attained_in_scan = x.fbar_form().is_some_and(|form| closed_form_holds(form, &values, lambda).is_none())
        || x.zero_from().is_some_and(|s| s <= t.depth);
    let mut verdict = if attained_in_scan && !sup.verdict.is_false() {
        Verdict::certified_true().with_evidence(sup.verdict.evidence.clone())
    } else {
        sup.verdict.clone()
    };
    if !x.is_builtin() && verdict.is_certified() {
        verdict = verdict.downgrade(t.depth);
    }
    Ok(NormEstimate { value: sup.lower_bound, argmax: sup.argmax, verdict })
}

/// First index where the transform disagrees with the declared closed form.
pub(crate) fn closed_form_holds(
    form: super::sequence::FbarForm,
    values: &[Rational],
    lambda: &Lambda,
) -> Option<usize> {
    values.iter().enumerate().find(|(n, v)| **v != form.value(lambda, *n)).map(|(n, _)| n)
}

/// Membership verdict for `x` in `space`.
///
/// Certified verdicts come from structure only: a declared eventual value,
/// a closed form of the transform verified on the whole scan, or the
/// inclusions `c0 < c0^lambda`, `c < c^lambda` under the weight hypothesis.
/// User sequences never keep a certified status.
pub fn membership(x: &SequenceOracle, space: &SpaceId, lambda: &Lambda, t: &Truncation) -> Result<Verdict> {
    let v = membership_inner(x, space, lambda, t)?;
    if !x.is_builtin() && v.is_certified() {
        return Ok(v.downgrade(t.depth).with_note("user data: certificates are reported as empirical"));
    }
    Ok(v)
}

fn membership_inner(x: &SequenceOracle, space: &SpaceId, lambda: &Lambda, t: &Truncation) -> Result<Verdict> {
    match space {
        SpaceId::C0 | SpaceId::C | SpaceId::LInf | SpaceId::Lp(_) => Ok(classical(x, space, t)),
        SpaceId::C0Lambda | SpaceId::CLambda => lambda_space(x, space, lambda, t),
    }
}

fn classical(x: &SequenceOracle, space: &SpaceId, t: &Truncation) -> Verdict {
    if let Some((s, v)) = x.eventual() {
        let note = format!("x_k = {} for k >= {s}", render(v));
        let holds = match space {
            SpaceId::C0 | SpaceId::Lp(_) => v.is_zero(),
            _ => true,
        };
        let out = if holds { Verdict::certified_true() } else { Verdict::certified_false() };
        return out.with_evidence(vec![(*s, v.clone())]).with_note(note);
    }
    let terms = ScalarStream::new(|k| x.get(k));
    match space {
        SpaceId::C0 => estimate_limit_with(&terms, t).equals(&Rational::zero(), &t.tol),
        SpaceId::C => estimate_limit_with(&terms, t).verdict,
        SpaceId::LInf => estimate_sup_abs(&terms, t.depth, &t.threshold).verdict,
        SpaceId::Lp(p) => {
            // upper enclosure ends of the partial sums of |x_k|^p
            let mut partial = Vec::with_capacity(t.depth + 1);
            let mut acc = Rational::zero();
            for k in 0..=t.depth {
                acc += abs_pow(&x.get(k), p).hi;
                partial.push(acc.clone());
            }
            let est = estimate_limit_with(&ScalarStream::from_values(partial), t);
            est.verdict
        }
        _ => unreachable!("not a classical space"),
    }
}

fn lambda_space(x: &SequenceOracle, space: &SpaceId, lambda: &Lambda, t: &Truncation) -> Result<Verdict> {
    let values = fbar_prefix(x, lambda, t.depth)?;
    if let Some(form) = x.fbar_form() {
        match closed_form_holds(form, &values, lambda) {
            None => {
                let limit = form.limit();
                let holds = *space == SpaceId::CLambda || limit.is_zero();
                let out = if holds { Verdict::certified_true() } else { Verdict::certified_false() };
                return Ok(out.with_evidence(vec![(t.depth, values[t.depth].clone())]).with_note(format!(
                    "closed-form transform {form:?} verified on 0..={}, limit {}",
                    t.depth,
                    render(&limit)
                )));
            }
            Some(n) => {
                let fallback = empirical_lambda(&values, space, t);
                return Ok(fallback.with_note(format!("declared closed form {form:?} fails at n = {n}")));
            }
        }
    }
    if let Some(s) = x.zero_from() {
        return Ok(Verdict::certified_true()
            .with_evidence(vec![(s, Rational::zero())])
            .with_note(format!("finite support below {s}: the transform is a constant over lambda_n from n = {s}")));
    }
    let base = if *space == SpaceId::CLambda { SpaceId::C } else { SpaceId::C0 };
    let classical_verdict = classical(x, &base, t);
    if classical_verdict.status == Status::CertifiedTrue && lambda.liminf_ratio_is_one() == Some(true) {
        return Ok(Verdict::certified_true().with_note(format!("x in {base} and liminf lambda_(n+1)/lambda_n = 1")));
    }
    Ok(empirical_lambda(&values, space, t))
}

fn empirical_lambda(values: &[Rational], space: &SpaceId, t: &Truncation) -> Verdict {
    let stream = ScalarStream::from_values(values.to_vec());
    let est = estimate_limit_with(&stream, t);
    if *space == SpaceId::C0Lambda {
        est.equals(&Rational::zero(), &t.tol)
    } else {
        est.verdict
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frac, int};

    fn trunc() -> Truncation {
        Truncation::default()
    }

    #[test]
    fn parse_spaces() {
        assert_eq!(SpaceId::parse("lp(3/2)").unwrap().to_string(), "lp(3/2)");
        assert_eq!(SpaceId::parse("l1").unwrap(), SpaceId::Lp(Exponent::one()));
        assert!(SpaceId::parse("lp(1/2)").is_err());
        assert!(SpaceId::parse("bv").is_err());
    }

    #[test]
    fn norm_examples() {
        let lam = Lambda::linear();
        let t = trunc().with_depth(100);
        let n = space_norm(&SequenceOracle::fib_square(), &lam, &t).unwrap();
        assert_eq!(n.value, int(1));
        assert_eq!(n.argmax, 0);
        let t = trunc().with_depth(50);
        assert_eq!(space_norm(&SequenceOracle::sign_witness(), &lam, &t).unwrap().value, frac(3, 2));
        assert_eq!(space_norm(&SequenceOracle::abs_sign_witness(), &lam, &t).unwrap().value, frac(5, 3));
        assert_eq!(space_norm(&SequenceOracle::zero(), &lam, &t).unwrap().value, int(0));
    }

    #[test]
    fn membership_examples() {
        let lam = Lambda::linear();
        let t = Truncation { threshold: int(1_000_000), ..trunc() };
        let fs = SequenceOracle::fib_square();
        assert_eq!(membership(&fs, &SpaceId::C0Lambda, &lam, &t).unwrap().status, Status::CertifiedTrue);
        assert_eq!(membership(&fs, &SpaceId::LInf, &lam, &t).unwrap().status, Status::EmpiricalFalse);
        let b = SequenceOracle::b_seq();
        assert_eq!(membership(&b, &SpaceId::CLambda, &lam, &t).unwrap().status, Status::CertifiedTrue);
        assert_eq!(membership(&b, &SpaceId::C0Lambda, &lam, &t).unwrap().status, Status::CertifiedFalse);
    }

    #[test]
    fn user_data_is_never_certified() {
        let lam = Lambda::linear();
        let x = SequenceOracle::table(vec![int(1), int(2)]);
        let v = membership(&x, &SpaceId::C0Lambda, &lam, &trunc()).unwrap();
        assert_eq!(v.status, Status::EmpiricalTrue);
    }

    #[test]
    fn unit_sequence_inclusion_is_gated_by_weights() {
        let t = trunc();
        let e = SequenceOracle::unit();
        assert_eq!(membership(&e, &SpaceId::C, &Lambda::linear(), &t).unwrap().status, Status::CertifiedTrue);
        assert_eq!(membership(&e, &SpaceId::CLambda, &Lambda::linear(), &t).unwrap().status, Status::CertifiedTrue);
        let geo = Lambda::geometric(int(2)).unwrap();
        assert!(!membership(&e, &SpaceId::CLambda, &geo, &t).unwrap().is_certified());
    }

    #[test]
    fn lp_membership() {
        let lam = Lambda::linear();
        let t = trunc();
        let harmonic = SequenceOracle::rule("harmonic", &Default::default()).unwrap();
        // 1/k is too slow to settle within the default window tolerance
        assert_eq!(membership(&harmonic, &SpaceId::C0, &lam, &t).unwrap().status, Status::Indeterminate);
        let geo =
            SequenceOracle::rule("geometric", &super::super::sequence::RuleParams(vec![("ratio".into(), frac(1, 2))]))
                .unwrap();
        assert_eq!(membership(&geo, &SpaceId::Lp(Exponent::one()), &lam, &t).unwrap().status, Status::EmpiricalTrue);
        assert_eq!(membership(&geo, &SpaceId::C0, &lam, &t).unwrap().status, Status::EmpiricalTrue);
    }
}
