//! Forward and inverse sequence transforms.
//!
//! The weighted-mean transform is computed from weighted prefix sums of the
//! Fibonacci difference transform; the row form through the matrix entries
//! is kept as an independent oracle.

use num_traits::Zero;

use super::sequence::SequenceOracle;
use crate::error::Result;
use crate::matrices::fbar_entry;
use crate::numerics::{fib_q, Lambda, Rational};

/// `(f_n/f_{n+1}) x_n - (f_{n+1}/f_n) x_{n-1}`.
pub fn fhat_transform(x: &SequenceOracle, n: usize) -> Rational {
    let here = fib_q(n) / fib_q(n + 1) * x.get(n);
    if n == 0 {
        here
    } else {
        here - fib_q(n + 1) / fib_q(n) * x.get(n - 1)
    }
}

pub fn fhat_prefix(x: &SequenceOracle, last: usize) -> Vec<Rational> {
    (0..=last).map(|n| fhat_transform(x, n)).collect()
}

/// `(1/lambda_n) sum_{k<=n} (lambda_k - lambda_{k-1}) fhat_k(x)`.
pub fn fbar_transform(x: &SequenceOracle, lambda: &Lambda, n: usize) -> Result<Rational> {
    lambda.ensure(n)?;
    let total = (0..=n).fold(Rational::zero(), |acc, k| acc + lambda.diff(k) * fhat_transform(x, k));
    Ok(total / lambda.at(n))
}

/// `fbar_0(x) ..= fbar_last(x)` in one pass over the weighted prefix sums.
pub fn fbar_prefix(x: &SequenceOracle, lambda: &Lambda, last: usize) -> Result<Vec<Rational>> {
    lambda.ensure(last)?;
    let mut acc = Rational::zero();
    let mut out = Vec::with_capacity(last + 1);
    for n in 0..=last {
        acc += lambda.diff(n) * fhat_transform(x, n);
        out.push(&acc / lambda.at(n));
    }
    Ok(out)
}

/// Row form `sum_k fbar_nk x_k`.
pub fn fbar_transform_rows(x: &SequenceOracle, lambda: &Lambda, n: usize) -> Result<Rational> {
    lambda.ensure(n)?;
    Ok((0..=n).fold(Rational::zero(), |acc, k| acc + fbar_entry(lambda, n, k) * x.get(k)))
}

/// Inverse transform by its double sum:
/// `x_k = sum_{j<=k} sum_{i=j-1}^{j} (-1)^{j-i} lambda_i y_i / d_j * f_{k+1}^2 / (f_j f_{j+1})`.
pub fn inverse_transform(y: &SequenceOracle, lambda: &Lambda, k: usize) -> Result<Rational> {
    lambda.ensure(k)?;
    let fk1 = fib_q(k + 1);
    let sq = &fk1 * &fk1;
    let mut total = Rational::zero();
    for j in 0..=k {
        let scale = &sq / (lambda.diff(j) * fib_q(j) * fib_q(j + 1));
        let mut inner = lambda.at(j) * y.get(j);
        if j > 0 {
            inner -= lambda.at(j - 1) * y.get(j - 1);
        }
        total += scale * inner;
    }
    Ok(total)
}

/// `x_0 ..= x_last` of the inverse transform via running sums of
/// `(lambda_j y_j - lambda_{j-1} y_{j-1}) / (d_j f_j f_{j+1})`.
pub fn inverse_prefix(y: &SequenceOracle, lambda: &Lambda, last: usize) -> Result<Vec<Rational>> {
    lambda.ensure(last)?;
    let mut acc = Rational::zero();
    let mut out = Vec::with_capacity(last + 1);
    for k in 0..=last {
        let mut inner = lambda.at(k) * y.get(k);
        if k > 0 {
            inner -= lambda.at(k - 1) * y.get(k - 1);
        }
        acc += inner / (lambda.diff(k) * fib_q(k) * fib_q(k + 1));
        let f = fib_q(k + 1);
        out.push(&acc * &f * &f);
    }
    Ok(out)
}

/// The inverse transform as a lazy sequence.
pub fn inverse_oracle(y: &SequenceOracle, lambda: &Lambda) -> SequenceOracle {
    let (yy, lam) = (y.clone(), lambda.clone());
    SequenceOracle::new(format!("inverse({})", y.description()), move |k| {
        inverse_transform(&yy, &lam, k).unwrap_or_else(|e| panic!("{e}"))
    })
    .with_origin(y.origin())
}
