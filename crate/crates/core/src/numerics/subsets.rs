//! Exhaustive maximisation of `sum_i |sum_{j in S} v_j[i]|^p` over every
//! subset `S` of a small family of vectors.
//!
//! Vectors are scaled to a common denominator once, then all subsets are
//! visited in Gray-code order so each step is a single vector update.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::rational::{abs_pow, Exponent, Rational};
use crate::error::{Error, Result};

/// Largest number of vectors accepted (2^17 subsets when the horizon is 16
/// and the family is `0..=16`).
pub const MAX_SUBSET_FAMILY: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMax {
    /// Exact maximum for integer `p`; a lower enclosure end otherwise.
    pub lower: Rational,
    /// Equal to `lower` for integer `p`.
    pub upper: Rational,
    /// Indices (into the vector family) of a maximising subset.
    pub subset: Vec<usize>,
    pub exact: bool,
}

impl SubsetMax {
    fn zero() -> Self {
        SubsetMax { lower: Rational::zero(), upper: Rational::zero(), subset: Vec::new(), exact: true }
    }
}

struct Scaled {
    denom: BigInt,
    vectors: Vec<Vec<BigInt>>,
}

fn scale(vectors: &[Vec<Rational>]) -> Scaled {
    let width = vectors.iter().map(Vec::len).max().unwrap_or(0);
    // drop coordinates where every vector vanishes
    let live: Vec<usize> =
        (0..width).filter(|&i| vectors.iter().any(|v| v.get(i).is_some_and(|x| !x.is_zero()))).collect();
    let mut denom = BigInt::one();
    for v in vectors {
        for &i in &live {
            if let Some(x) = v.get(i) {
                denom = denom.lcm(x.denom());
            }
        }
    }
    let vectors = vectors
        .iter()
        .map(|v| {
            live.iter()
                .map(|&i| match v.get(i) {
                    Some(x) => x.numer() * (&denom / x.denom()),
                    None => BigInt::zero(),
                })
                .collect()
        })
        .collect();
    Scaled { denom, vectors }
}

fn check_family(len: usize) -> Result<()> {
    if len > MAX_SUBSET_FAMILY {
        return Err(Error::SubsetHorizon { requested: len.saturating_sub(1), max: MAX_SUBSET_FAMILY - 1 });
    }
    Ok(())
}

/// Visits every subset in Gray-code order, handing the running coordinate
/// sums and the membership mask to `visit`.
fn gray_walk(s: &Scaled, mut visit: impl FnMut(&[BigInt], u32)) {
    let width = s.vectors.first().map_or(0, Vec::len);
    let mut current = vec![BigInt::zero(); width];
    let mut mask: u32 = 0;
    visit(&current, mask);
    let count: u64 = 1 << s.vectors.len();
    for step in 1..count {
        let j = step.trailing_zeros() as usize;
        let bit = 1u32 << j;
        let v = &s.vectors[j];
        if mask & bit == 0 {
            for (c, x) in current.iter_mut().zip(v) {
                *c += x;
            }
        } else {
            for (c, x) in current.iter_mut().zip(v) {
                *c -= x;
            }
        }
        mask ^= bit;
        visit(&current, mask);
    }
}

fn mask_to_subset(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask & (1 << j) != 0).collect()
}

/// Exact `max_S sum_i |sum_{j in S} v_j[i]|^p` for integer `p >= 1`.
pub fn max_subset_power_sum(vectors: &[Vec<Rational>], p: u32) -> Result<SubsetMax> {
    check_family(vectors.len())?;
    assert!(p >= 1, "exponent must be at least 1");
    if vectors.is_empty() {
        return Ok(SubsetMax::zero());
    }
    let s = scale(vectors);
    let mut best = BigInt::zero();
    let mut best_mask = 0u32;
    gray_walk(&s, |current, mask| {
        let score: BigInt = if p == 1 {
            current.iter().map(|c| c.abs()).sum()
        } else {
            current.iter().map(|c| Pow::pow(c.abs(), p)).sum()
        };
        if score > best {
            best = score;
            best_mask = mask;
        }
    });
    let value = Rational::new(best, Pow::pow(&s.denom, p));
    Ok(SubsetMax { lower: value.clone(), upper: value, subset: mask_to_subset(best_mask), exact: true })
}

/// `max_S sum_i |sum_{j in S} v_j[i]|^p` for a rational exponent.
///
/// Integer exponents are exact. Otherwise subsets are ranked in `f64` and
/// the near-maximal candidates are re-evaluated with rational enclosures, so
/// the result is an enclosure that is never reported as exact.
pub fn max_subset_sum(vectors: &[Vec<Rational>], p: &Exponent) -> Result<SubsetMax> {
    if let Some(e) = p.as_integer() {
        return max_subset_power_sum(vectors, e);
    }
    check_family(vectors.len())?;
    if vectors.is_empty() {
        return Ok(SubsetMax::zero());
    }
    let s = scale(vectors);
    let pf = p.value().to_f64().unwrap_or(1.0);
    let denom_f = s.denom.to_f64().unwrap_or(f64::INFINITY);
    let mut scored: Vec<(f64, u32)> = Vec::with_capacity(1 << vectors.len());
    gray_walk(&s, |current, mask| {
        let score: f64 = current.iter().map(|c| (c.to_f64().unwrap_or(f64::INFINITY) / denom_f).abs().powf(pf)).sum();
        scored.push((score, mask));
    });
    let top = scored.iter().map(|(x, _)| *x).fold(0.0f64, f64::max);
    let margin = top * 1e-9;
    let candidates: Vec<u32> = scored.iter().filter(|(x, _)| *x >= top - margin).map(|(_, m)| *m).collect();
    let mut out = SubsetMax { exact: false, ..SubsetMax::zero() };
    let mut first = true;
    for mask in candidates {
        let (lo, hi) = enclose_mask(vectors, mask, p);
        if first || lo > out.lower {
            out.lower = lo.clone();
            out.subset = mask_to_subset(mask);
        }
        if first || hi > out.upper {
            out.upper = hi;
        }
        first = false;
    }
    Ok(out)
}

fn enclose_mask(vectors: &[Vec<Rational>], mask: u32, p: &Exponent) -> (Rational, Rational) {
    let width = vectors.iter().map(Vec::len).max().unwrap_or(0);
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for i in 0..width {
        let sum: Rational = mask_to_subset(mask)
            .into_iter()
            .filter_map(|j| vectors[j].get(i).cloned())
            .fold(Rational::zero(), |a, b| a + b);
        let enc = abs_pow(&sum, p);
        lo += enc.lo;
        hi += enc.hi;
    }
    (lo, hi)
}
