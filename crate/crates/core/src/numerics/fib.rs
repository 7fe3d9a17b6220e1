//! Fibonacci numbers with the `f_0 = f_1 = 1` convention and the classical
//! identities they satisfy.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{from_bigint, int, sqrt5_enclosure, ten_pow_neg, Interval, Rational};
use crate::error::{Error, Result};

/// Append-only table of `f_0, f_1, ...`. Existing entries are never mutated.
pub struct FibonacciCache {
    values: RwLock<Vec<BigInt>>,
}

impl FibonacciCache {
    pub fn new() -> Self {
        FibonacciCache { values: RwLock::new(vec![BigInt::one(), BigInt::one()]) }
    }

    pub fn get(&self, n: usize) -> BigInt {
        {
            let values = self.values.read().expect("fibonacci cache poisoned");
            if let Some(v) = values.get(n) {
                return v.clone();
            }
        }
        let mut values = self.values.write().expect("fibonacci cache poisoned");
        while values.len() <= n {
            let len = values.len();
            let next = &values[len - 1] + &values[len - 2];
            values.push(next);
        }
        values[n].clone()
    }

    /// Number of cached terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.values.read().expect("fibonacci cache poisoned").len()
    }
}

impl Default for FibonacciCache {
    fn default() -> Self {
        Self::new()
    }
}

fn global() -> &'static FibonacciCache {
    static CACHE: OnceLock<FibonacciCache> = OnceLock::new();
    CACHE.get_or_init(FibonacciCache::new)
}

/// `f_n` with `f_0 = f_1 = 1`.
pub fn fib(n: usize) -> BigInt {
    global().get(n)
}

/// `f_n` as a rational.
pub fn fib_q(n: usize) -> Rational {
    from_bigint(fib(n))
}

/// `f_{n+1} / f_n`.
pub fn fib_ratio(n: usize) -> Rational {
    Rational::new(fib(n + 1), fib(n))
}

/// `f_{n-1} f_{n+1} - f_n^2 - (-1)^{n+1}`; identically zero.
pub fn cassini_residual(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::IndexRejected {
            op: "cassini_residual",
            detail: "the identity is stated for n >= 1".into(),
        });
    }
    let lhs = fib(n - 1) * fib(n + 1) - fib(n) * fib(n);
    let sign = if (n + 1).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    Ok(from_bigint(lhs - sign))
}

/// `sum_{k=0}^{n} f_k - (f_{n+2} - 1)`; identically zero.
pub fn fib_sum_residual(n: usize) -> Rational {
    let sum: BigInt = (0..=n).map(fib).sum();
    from_bigint(sum - (fib(n + 2) - BigInt::one()))
}

/// Rational enclosure of `|f_{n+1}/f_n - (1+sqrt 5)/2|`.
///
/// The enclosure of sqrt(5) is tightened until the result is narrower than
/// `10^-12` and narrower than a thousandth of its own lower end, so
/// neighbouring gaps can be compared from their enclosures alone.
pub fn golden_ratio_gap(n: usize) -> Result<Interval> {
    if n == 0 {
        return Err(Error::IndexRejected { op: "golden_ratio_gap", detail: "n >= 1 required".into() });
    }
    let ratio = fib_ratio(n);
    let absolute = ten_pow_neg(12);
    let mut bits = 48u32;
    loop {
        let root5 = sqrt5_enclosure(bits);
        let half = int(2);
        let phi_lo = (int(1) + &root5.lo) / &half;
        let phi_hi = (int(1) + &root5.hi) / &half;
        let diff = Interval::new(&ratio - &phi_hi, &ratio - &phi_lo).abs();
        let width = diff.width();
        if !diff.lo.is_zero() && width <= absolute && width * int(1000) <= diff.lo {
            return Ok(diff);
        }
        bits += 32;
    }
}

/// Closed form of the gap obtained from Cassini: `1 / (f_n (f_{n+1} + f_n phi))`,
/// enclosed with the same sqrt(5) machinery. Used as an independent check.
pub fn golden_ratio_gap_closed_form(n: usize, bits: u32) -> Interval {
    let root5 = sqrt5_enclosure(bits);
    let fn_ = fib_q(n);
    let fn1 = fib_q(n + 1);
    let phi_lo = (int(1) + &root5.lo) / int(2);
    let phi_hi = (int(1) + &root5.hi) / int(2);
    let den_lo = &fn_ * (&fn1 + &fn_ * phi_lo);
    let den_hi = &fn_ * (&fn1 + &fn_ * phi_hi);
    Interval::new(den_hi.recip(), den_lo.recip())
}
