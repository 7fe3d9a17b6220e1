//! Exact arithmetic, Fibonacci numbers, weight sequences and the
//! finite-depth estimation machinery used by every other module.

pub mod estimate;
pub mod fib;
pub mod lambda;
pub mod rational;
pub mod subsets;
pub mod verdict;

pub use estimate::{
    estimate_limit, estimate_limit_with, estimate_sup, estimate_sup_abs, LimitEstimate, ScalarStream, SupEstimate,
    Truncation,
};
pub use fib::{cassini_residual, fib, fib_q, fib_ratio, fib_sum_residual, golden_ratio_gap, FibonacciCache};
pub use lambda::{Extension, Lambda, LambdaFamily};
pub use rational::{abs_pow, frac, int, parse_rational, render, to_decimal, Exponent, Interval, Rational};
pub use verdict::{Status, Verdict};
