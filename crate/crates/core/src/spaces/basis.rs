use std::sync::RwLock;

use num_traits::{Signed, Zero};

use super::sequence::SequenceOracle;
use super::space::{membership, SpaceId};
use super::transform::fbar_prefix;
use crate::error::{Error, Result};
use crate::numerics::{estimate_limit_with, fib_q, Lambda, Rational, ScalarStream, Truncation, Verdict};

/// `b^(k)_n`, the n-th term of the k-th basis sequence.
pub fn basis_vector(k: usize, n: usize, lambda: &Lambda) -> Rational {
    if n < k {
        return Rational::zero();
    }
    let lam_k = lambda.at(k);
    let fn1 = fib_q(n + 1);
    let sq = &fn1 * &fn1;
    let head = &lam_k / lambda.diff(k) * &sq / (fib_q(k) * fib_q(k + 1));
    if n == k {
        head
    } else {
        head - lam_k / lambda.diff(k + 1) * sq / (fib_q(k + 1) * fib_q(k + 2))
    }
}

/// `b_n = f_{n+1}^2 (1 + sum_{j=1}^n 1/(f_j f_{j+1}))`.
pub fn b_sequence(n: usize) -> Rational {
    static PARTIAL: RwLock<Vec<Rational>> = RwLock::new(Vec::new());
    let cached = PARTIAL.read().expect("b_sequence cache poisoned").get(n).cloned();
    let acc = match cached {
        Some(acc) => acc,
        None => {
            let mut sums = PARTIAL.write().expect("b_sequence cache poisoned");
            if sums.is_empty() {
                sums.push(Rational::from_integer(1.into()));
            }
            while sums.len() <= n {
                let j = sums.len();
                let next = &sums[j - 1] + (fib_q(j) * fib_q(j + 1)).recip();
                sums.push(next);
            }
            sums[n].clone()
        }
    };
    let f = fib_q(n + 1);
    acc * &f * &f
}

#[derive(Debug, Clone)]
pub struct BasisExpansion {
    pub space: SpaceId,
    pub order: usize,
    /// `alpha_k = fbar_k(x)` for `k <= order`.
    pub alphas: Vec<Rational>,
    /// Limit `l` of the transform (c-type space only).
    pub limit: Option<Rational>,
    /// Coefficients applied to `b^(k)`: `alpha_k` or `alpha_k - l`.
    pub coefficients: Vec<Rational>,
    /// `max_{n <= scan} |fbar_n(x - x^[m])|`.
    pub residual: Option<Rational>,
    pub scan: usize,
    pub verdict: Verdict,
}

/// Expands `x` in the basis of a lambda space up to `order` and measures
/// the residual in the space norm over `n <= max(depth, order + 1)`.
pub fn expand_in_basis(
    x: &SequenceOracle,
    lambda: &Lambda,
    space: &SpaceId,
    order: usize,
    t: &Truncation,
) -> Result<BasisExpansion> {
    if !space.is_lambda_space() {
        return Err(Error::UnknownSpace(format!("{space} has no Fibonacci basis")));
    }
    let scan = t.depth.max(order + 1);
    let transform = fbar_prefix(x, lambda, scan)?;
    let alphas = transform[..=order].to_vec();
    let (limit, verdict) = if *space == SpaceId::CLambda {
        let est = estimate_limit_with(&ScalarStream::from_values(transform.clone()), t);
        match (&est.candidate, est.verdict.is_true()) {
            (Some(l), true) => {
                let l = x
                    .fbar_form()
                    .map(|f| f.limit())
                    .filter(|_| est.verdict.is_certified())
                    .unwrap_or_else(|| l.clone());
                (Some(l), est.verdict)
            }
            _ => {
                let v = if est.verdict.is_false() { est.verdict } else { Verdict::indeterminate(Some(t.depth)) };
                (None, v.with_note("limit of the transform not established"))
            }
        }
    } else {
        (None, membership(x, space, lambda, t)?)
    };
    if *space == SpaceId::CLambda && limit.is_none() {
        return Ok(BasisExpansion {
            space: space.clone(),
            order,
            alphas,
            limit,
            coefficients: vec![],
            residual: None,
            scan,
            verdict,
        });
    }
    let coefficients: Vec<Rational> = match &limit {
        Some(l) => alphas.iter().map(|a| a - l).collect(),
        None => alphas.clone(),
    };
    let (coef, lim, lam) = (coefficients.clone(), limit.clone(), lambda.clone());
    let partial = SequenceOracle::new(format!("partial[{order}]"), move |n| {
        let mut acc = match &lim {
            Some(l) => l * b_sequence(n),
            None => Rational::zero(),
        };
        for (k, c) in coef.iter().enumerate().take(n.min(order) + 1) {
            if !c.is_zero() {
                acc += c * basis_vector(k, n, &lam);
            }
        }
        acc
    });
    let diff = x.minus(&partial);
    let residual = fbar_prefix(&diff, lambda, scan)?.into_iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    Ok(BasisExpansion {
        space: space.clone(),
        order,
        alphas,
        limit,
        coefficients,
        residual: Some(residual),
        scan,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frac, int, Status};

    #[test]
    fn basis_examples() {
        let lam = Lambda::linear();
        assert_eq!(basis_vector(0, 2, &lam), frac(9, 2));
        assert_eq!(basis_vector(1, 1, &lam), int(4));
        assert_eq!(basis_vector(3, 1, &lam), int(0));
        assert_eq!(b_sequence(0), int(1));
        assert_eq!(b_sequence(1), int(6));
        assert_eq!(b_sequence(2), int(15));
    }

    #[test]
    fn basis_transform_is_unit_vector() {
        let lam = Lambda::geometric(int(2)).unwrap();
        for k in 0..6 {
            let v = fbar_prefix(&SequenceOracle::basis(k, &lam), &lam, 12).unwrap();
            for (n, x) in v.iter().enumerate() {
                assert_eq!(*x, int(i64::from(n == k)), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn fib_square_residual_is_reciprocal_weight() {
        let lam = Lambda::linear();
        let t = Truncation::default().with_depth(60);
        for m in [0usize, 3, 10] {
            let e = expand_in_basis(&SequenceOracle::fib_square(), &lam, &SpaceId::C0Lambda, m, &t).unwrap();
            assert_eq!(e.residual, Some(frac(1, m as i64 + 2)));
            assert_eq!(e.verdict.status, Status::CertifiedTrue);
        }
    }

    #[test]
    fn c_space_expansion_of_b_seq_is_exact() {
        let lam = Lambda::linear();
        let t = Truncation::default().with_depth(40);
        let e = expand_in_basis(&SequenceOracle::b_seq(), &lam, &SpaceId::CLambda, 5, &t).unwrap();
        assert_eq!(e.limit, Some(int(1)));
        assert_eq!(e.residual, Some(int(0)));
    }
}
