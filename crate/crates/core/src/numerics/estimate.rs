//! Finite-depth realisations of `lim_n` and `sup_n`.

use num_traits::{Signed, Zero};

use super::rational::{int, ten_pow_neg, Rational};
use super::verdict::{Status, Verdict};

/// Truncation parameters shared by every estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub depth: usize,
    pub window: usize,
    pub tol: Rational,
    pub threshold: Rational,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { depth: 200, window: 16, tol: ten_pow_neg(6), threshold: int(1_000_000_000) }
    }
}

impl Truncation {
    pub fn with_depth(&self, depth: usize) -> Self {
        Truncation { depth, ..self.clone() }
    }
}

/// Deterministic term oracle `n -> s(n)`.
///
/// `stable_from = Some(s)` records a structural fact: `s(n) = s(s)` for all
/// `n >= s`. Estimates upgrade to certified verdicts when it is known.
pub struct ScalarStream<'a> {
    term: Box<dyn Fn(usize) -> Rational + 'a>,
    stable_from: Option<usize>,
}

impl<'a> ScalarStream<'a> {
    pub fn new(term: impl Fn(usize) -> Rational + 'a) -> Self {
        ScalarStream { term: Box::new(term), stable_from: None }
    }

    /// Stream over precomputed values; indices past the table repeat the
    /// last value, which is only sound together with `stable_from`.
    pub fn from_values(values: Vec<Rational>) -> ScalarStream<'static> {
        assert!(!values.is_empty(), "empty value table");
        ScalarStream::new(move |n| values[n.min(values.len() - 1)].clone())
    }

    pub fn stable_from(mut self, index: Option<usize>) -> Self {
        self.stable_from = index;
        self
    }

    pub fn stable_index(&self) -> Option<usize> {
        self.stable_from
    }

    pub fn eval(&self, n: usize) -> Rational {
        (self.term)(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub verdict: Verdict,
    pub candidate: Option<Rational>,
}

impl LimitEstimate {
    /// Compares the estimated limit with `target`.
    pub fn equals(&self, target: &Rational, tol: &Rational) -> Verdict {
        let v = &self.verdict;
        match (v.status, &self.candidate) {
            (Status::CertifiedTrue, Some(c)) => {
                let out = if c == target { Verdict::certified_true() } else { Verdict::certified_false() };
                out.with_evidence(v.evidence.clone())
            }
            (Status::EmpiricalTrue, Some(c)) => {
                let depth = v.depth.unwrap_or(0);
                let out = if (c - target).abs() <= *tol {
                    Verdict::empirical_true(depth)
                } else {
                    Verdict::empirical_false(depth, None)
                };
                out.with_evidence(v.evidence.clone())
            }
            (Status::EmpiricalFalse, _) | (Status::CertifiedFalse, _) => v.clone(),
            _ => Verdict::indeterminate(v.depth).with_evidence(v.evidence.clone()),
        }
    }
}

/// Estimates `lim_n s(n)` from the window `depth-window ..= depth`.
///
/// Window spread within `tol` gives `empirical_true` with the last value as
/// candidate; any window value above `threshold` in magnitude gives
/// `empirical_false`; anything else is `indeterminate`.
pub fn estimate_limit(
    s: &ScalarStream<'_>,
    depth: usize,
    window: usize,
    tol: &Rational,
    threshold: &Rational,
) -> LimitEstimate {
    if let Some(stable) = s.stable_index() {
        if stable <= depth {
            let value = s.eval(stable);
            return LimitEstimate {
                verdict: Verdict::certified_true().with_evidence(vec![(stable, value.clone())]),
                candidate: Some(value),
            };
        }
    }
    let start = depth.saturating_sub(window);
    let values: Vec<(usize, Rational)> = (start..=depth).map(|n| (n, s.eval(n))).collect();
    let evidence = values.clone();
    if values.iter().any(|(_, v)| v.abs() > *threshold) {
        return LimitEstimate {
            verdict: Verdict::empirical_false(depth, Some(threshold.clone())).with_evidence(evidence),
            candidate: None,
        };
    }
    let max = values.iter().map(|(_, v)| v).max().expect("window is non-empty");
    let min = values.iter().map(|(_, v)| v).min().expect("window is non-empty");
    if max - min <= *tol {
        let last = values.last().expect("window is non-empty").1.clone();
        LimitEstimate { verdict: Verdict::empirical_true(depth).with_evidence(evidence), candidate: Some(last) }
    } else {
        LimitEstimate { verdict: Verdict::indeterminate(Some(depth)).with_evidence(evidence), candidate: None }
    }
}

pub fn estimate_limit_with(s: &ScalarStream<'_>, t: &Truncation) -> LimitEstimate {
    estimate_limit(s, t.depth, t.window, &t.tol, &t.threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupEstimate {
    pub verdict: Verdict,
    /// Exact maximum over the scanned prefix; a lower bound for the sup.
    pub lower_bound: Rational,
    pub argmax: usize,
    /// Last index evaluated.
    pub scanned: usize,
}

/// Estimates `sup_n s(n)` over `0 ..= depth`.
///
/// The scan stops as soon as the running maximum exceeds `threshold`
/// (`empirical_false`, unbounded). A stream known to be stable within the
/// scan has an exactly known supremum and is `certified_true`.
pub fn estimate_sup(s: &ScalarStream<'_>, depth: usize, threshold: &Rational) -> SupEstimate {
    let stable = s.stable_index().filter(|&k| k <= depth);
    let last = stable.unwrap_or(depth);
    let mut best = s.eval(0);
    let mut argmax = 0;
    let mut scanned = 0;
    for n in 1..=last {
        if stable.is_none() && best > *threshold {
            break;
        }
        let v = s.eval(n);
        scanned = n;
        if v > best {
            best = v;
            argmax = n;
        }
    }
    let evidence = vec![(argmax, best.clone())];
    let verdict = if stable.is_some() {
        Verdict::certified_true()
    } else if best > *threshold {
        Verdict::empirical_false(scanned, Some(threshold.clone()))
    } else {
        Verdict::empirical_true(depth)
    };
    SupEstimate { verdict: verdict.with_evidence(evidence), lower_bound: best, argmax, scanned }
}

/// `estimate_sup` of `|s(n)|`.
pub fn estimate_sup_abs(s: &ScalarStream<'_>, depth: usize, threshold: &Rational) -> SupEstimate {
    let abs = ScalarStream::new(|n| s.eval(n).abs()).stable_from(s.stable_index());
    estimate_sup(&abs, depth, threshold)
}

/// Zero stream, stable from the start.
pub fn zero_stream() -> ScalarStream<'static> {
    ScalarStream::new(|_| Rational::zero()).stable_from(Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fib::fib_ratio;
    use crate::numerics::rational::frac;

    #[test]
    fn limit_of_harmonic_null_sequence() {
        let s = ScalarStream::new(|n| frac(1, n as i64 + 1));
        let est = estimate_limit(&s, 1000, 16, &frac(1, 100), &int(1_000_000));
        assert_eq!(est.verdict.status, Status::EmpiricalTrue);
        assert_eq!(est.candidate, Some(frac(1, 1001)));
        assert_eq!(est.equals(&int(0), &frac(1, 100)).status, Status::EmpiricalTrue);
    }

    #[test]
    fn limit_of_identity_is_indeterminate_below_threshold() {
        let s = ScalarStream::new(|n| int(n as i64));
        let est = estimate_limit(&s, 100, 16, &ten_pow_neg(6), &int(1_000_000));
        assert_eq!(est.verdict.status, Status::Indeterminate);
        assert!(est.candidate.is_none());
    }

    #[test]
    fn limit_exceeding_threshold_is_false() {
        let s = ScalarStream::new(|n| int(n as i64 * 1000));
        let est = estimate_limit(&s, 2000, 16, &ten_pow_neg(6), &int(1_000_000));
        assert_eq!(est.verdict.status, Status::EmpiricalFalse);
    }

    #[test]
    fn stable_stream_is_certified() {
        let s = ScalarStream::new(|n| if n < 3 { int(n as i64) } else { int(7) }).stable_from(Some(3));
        let est = estimate_limit(&s, 10, 4, &ten_pow_neg(6), &int(100));
        assert_eq!(est.verdict.status, Status::CertifiedTrue);
        assert_eq!(est.candidate, Some(int(7)));
        assert_eq!(est.equals(&int(7), &ten_pow_neg(6)).status, Status::CertifiedTrue);
        assert_eq!(est.equals(&int(0), &ten_pow_neg(6)).status, Status::CertifiedFalse);
    }

    #[test]
    fn sup_examples() {
        let s = ScalarStream::new(|n| frac(1, n as i64 + 1));
        let est = estimate_sup(&s, 50, &int(1000));
        assert_eq!(est.lower_bound, int(1));
        assert_eq!(est.verdict.status, Status::EmpiricalTrue);

        let z = ScalarStream::new(|_| int(0));
        let est = estimate_sup(&z, 17, &int(1000));
        assert_eq!(est.lower_bound, int(0));
        assert_eq!(est.verdict.status, Status::EmpiricalTrue);
    }

    #[test]
    fn sup_of_scaled_fibonacci_ratio_stays_below_a_thousand_at_depth_60() {
        // (n+1) f_{n+1}/f_n grows like phi * n: about 98.7 at n = 60, so a
        // threshold of 10^3 is not crossed at this depth.
        let s = ScalarStream::new(|n| int(n as i64 + 1) * fib_ratio(n));
        let est = estimate_sup(&s, 60, &int(1000));
        assert_eq!(est.verdict.status, Status::EmpiricalTrue);
        assert_eq!(est.argmax, 60);
        assert!(est.lower_bound > int(98) && est.lower_bound < int(99));
        // the same stream crosses 10^3 near n = 618
        let est = estimate_sup(&s, 700, &int(1000));
        assert_eq!(est.verdict.status, Status::EmpiricalFalse);
    }

    #[test]
    fn sup_matches_brute_force_rescan() {
        let s = ScalarStream::new(|n| frac(((n * 37) % 11) as i64 - 5, 3));
        let est = estimate_sup(&s, 40, &int(1000));
        let brute = (0..=40).map(|n| s.eval(n)).max().unwrap();
        assert_eq!(est.lower_bound, brute);
    }
}
