use num_traits::{One, Zero};

use super::MatrixOracle;
use crate::error::{Error, Result};
use crate::numerics::{render, Lambda, Rational, Verdict};

/// Leading `N x N` block of a matrix oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTruncation {
    order: usize,
    entries: Vec<Vec<Rational>>,
}

impl DenseTruncation {
    pub fn from_rows(entries: Vec<Vec<Rational>>) -> Self {
        let order = entries.len();
        assert!(entries.iter().all(|r| r.len() == order), "dense truncation must be square");
        DenseTruncation { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, n: usize, k: usize) -> &Rational {
        &self.entries[n][k]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn mul(&self, other: &DenseTruncation) -> DenseTruncation {
        assert_eq!(self.order, other.order, "order mismatch");
        let n = self.order;
        let mut out = vec![vec![Rational::zero(); n]; n];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, b) in other.entries[j].iter().enumerate() {
                    if !b.is_zero() {
                        out[i][k] += a * b;
                    }
                }
            }
        }
        DenseTruncation { order: n, entries: out }
    }

    /// First entry that differs from the identity, if any.
    pub fn identity_defect(&self) -> Option<(usize, usize)> {
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let ok = if i == j { v.is_one() } else { v.is_zero() };
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Rows of `p/q` strings separated by commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.entries {
            let line: Vec<String> = row.iter().map(render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Materialises the leading `order x order` block of `a`, validating the
/// triangle pattern when the oracle claims it.
pub fn truncate(a: &MatrixOracle, order: usize) -> Result<DenseTruncation> {
    if order == 0 {
        return Err(Error::InvalidParameter("truncation order must be at least 1".into()));
    }
    let entries: Vec<Vec<Rational>> = (0..order).map(|n| a.row(n, order - 1)).collect();
    if a.is_triangle() {
        for (n, row) in entries.iter().enumerate() {
            if row[n].is_zero() {
                return Err(Error::NotTriangle { n, k: n });
            }
            if let Some(k) = (n + 1..order).find(|&k| !row[k].is_zero()) {
                return Err(Error::NotTriangle { n, k });
            }
        }
    }
    Ok(DenseTruncation { order, entries })
}

/// Checks both products of the truncated matrix and its closed-form inverse
/// against the identity. Products of lower triangles are exact on the
/// leading block, so agreement is a certificate for that block.
pub fn verify_inverse(lambda: &Lambda, order: usize) -> Result<Verdict> {
    lambda.ensure(order + 1)?;
    let fbar = truncate(&MatrixOracle::fbar(lambda), order)?;
    let inv = truncate(&MatrixOracle::fbar_inv(lambda), order)?;
    for (label, product) in [("inverse*fbar", inv.mul(&fbar)), ("fbar*inverse", fbar.mul(&inv))] {
        if let Some((i, j)) = product.identity_defect() {
            return Ok(Verdict::certified_false()
                .with_evidence(vec![(i, product.get(i, j).clone())])
                .with_note(format!("{label} differs from the identity at ({i}, {j})")));
        }
    }
    Ok(Verdict::certified_true().with_note(format!("exact on the leading {order}x{order} block")))
}
