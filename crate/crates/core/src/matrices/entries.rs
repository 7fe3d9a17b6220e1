use num_traits::Zero;

use super::MatrixOracle;
use crate::numerics::{fib_q, Lambda, Rational};

/// Two-band Fibonacci difference matrix.
pub fn fhat_entry(n: usize, k: usize) -> Rational {
    if k == n {
        fib_q(n) / fib_q(n + 1)
    } else if k + 1 == n {
        -(fib_q(n + 1) / fib_q(n))
    } else {
        Rational::zero()
    }
}

/// Weighted-mean Fibonacci difference matrix.
pub fn fbar_entry(lambda: &Lambda, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let scale = lambda.at(n).recip();
    if k == n {
        return scale * lambda.diff(n) * fib_q(n) / fib_q(n + 1);
    }
    let f1 = fib_q(k + 1);
    scale * (lambda.diff(k) * fib_q(k) / &f1 - lambda.diff(k + 1) * fib_q(k + 2) / &f1)
}

/// Closed-form inverse of [`fbar_entry`].
pub fn fbar_inv_entry(lambda: &Lambda, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let fn1 = fib_q(n + 1);
    if k == n {
        return lambda.at(n) * &fn1 / (lambda.diff(n) * fib_q(n));
    }
    let (f0, f1, f2) = (fib_q(k), fib_q(k + 1), fib_q(k + 2));
    let bracket = (lambda.diff(k) * &f0 * &f1).recip() - (lambda.diff(k + 1) * &f1 * &f2).recip();
    lambda.at(k) * &fn1 * &fn1 * bracket
}

/// Entry of the composition matrix by its defining finite sum.
pub fn compose_entry(a: &MatrixOracle, lambda: &Lambda, n: usize, k: usize) -> Rational {
    let mut total = Rational::zero();
    for i in 0..=n {
        let mut term = fib_q(i) / fib_q(i + 1) * a.entry(i, k);
        if i > 0 {
            term -= fib_q(i + 1) / fib_q(i) * a.entry(i - 1, k);
        }
        total += lambda.diff(i) * term;
    }
    total / lambda.at(n)
}
