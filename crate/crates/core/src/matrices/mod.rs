//! Lazy infinite matrices, the concrete Fibonacci matrices, and exact
//! algebra on their finite truncations.

mod dense;
mod entries;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{fib_q, frac, int, Lambda, Rational};

pub use dense::{truncate, verify_inverse, DenseTruncation};
pub use entries::{compose_entry, fbar_entry, fbar_inv_entry, fhat_entry};

type EntryFn = dyn Fn(usize, usize) -> Rational + Send + Sync;

/// Which columns of a row may be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub enum RowSupport {
    /// No structural information.
    Unbounded,
    /// Row `n` lives in columns `0..=n`.
    Triangle,
    /// Every row lives in columns `0..len`.
    Fixed(usize),
    /// Row `n` lives in columns `0..=n+hi`.
    Band { hi: usize },
    /// Row `n` lives in columns `0..lens[n]`; rows past the table are empty.
    PerRow(Arc<Vec<usize>>),
}

/// Named entry rules for banded matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandRule {
    Ones,
    Alternating,
    InverseRow,
    Fhat,
}

impl BandRule {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "ones" => BandRule::Ones,
            "alternating" => BandRule::Alternating,
            "inverse_row" => BandRule::InverseRow,
            "fhat" => BandRule::Fhat,
            other => return Err(Error::UnknownBuiltin(format!("band rule {other}"))),
        })
    }

    fn value(self, n: usize, k: usize) -> Rational {
        match self {
            BandRule::Ones => int(1),
            BandRule::Alternating => int(if (n + k).is_multiple_of(2) { 1 } else { -1 }),
            BandRule::InverseRow => frac(1, n as i64 + 1),
            BandRule::Fhat => fhat_entry(n, k),
        }
    }
}

struct Inner {
    entry: Box<EntryFn>,
    memo: RwLock<HashMap<(usize, usize), Rational>>,
    triangle: bool,
    support: RowSupport,
    zero_rows_from: Option<usize>,
    decay_from: Option<usize>,
    description: String,
}

/// Entry-addressable infinite matrix `A = (a_nk)`.
///
/// Besides the entry rule an oracle may carry structural facts that let
/// downstream checks certify instead of sample:
///
/// * `support` bounds the nonzero columns of each row,
/// * `zero_rows_from = Some(r)` means rows `n >= r` vanish,
/// * `decay_from = Some(s)` means every row `n >= s` is `rho_n` times row `s`
///   with `1 >= rho_n`, `rho_n` nonincreasing and tending to 0.
#[derive(Clone)]
pub struct MatrixOracle {
    inner: Arc<Inner>,
}

impl fmt::Debug for MatrixOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixOracle")
            .field("description", &self.inner.description)
            .field("triangle", &self.inner.triangle)
            .field("support", &self.inner.support)
            .field("zero_rows_from", &self.inner.zero_rows_from)
            .field("decay_from", &self.inner.decay_from)
            .finish()
    }
}

/// Builder for [`MatrixOracle`].
pub struct MatrixBuilder {
    entry: Box<EntryFn>,
    triangle: bool,
    support: RowSupport,
    zero_rows_from: Option<usize>,
    decay_from: Option<usize>,
    description: String,
}

impl MatrixBuilder {
    pub fn triangle(mut self, flag: bool) -> Self {
        self.triangle = flag;
        self
    }

    pub fn support(mut self, support: RowSupport) -> Self {
        self.support = support;
        self
    }

    pub fn zero_rows_from(mut self, r: Option<usize>) -> Self {
        self.zero_rows_from = r;
        if r.is_some() && self.decay_from.is_none() {
            self.decay_from = r;
        }
        self
    }

    pub fn decay_from(mut self, s: Option<usize>) -> Self {
        self.decay_from = s;
        self
    }

    pub fn build(self) -> MatrixOracle {
        MatrixOracle {
            inner: Arc::new(Inner {
                entry: self.entry,
                memo: RwLock::new(HashMap::new()),
                triangle: self.triangle,
                support: self.support,
                zero_rows_from: self.zero_rows_from,
                decay_from: self.decay_from,
                description: self.description,
            }),
        }
    }
}

impl MatrixOracle {
    pub fn builder(
        description: impl Into<String>,
        entry: impl Fn(usize, usize) -> Rational + Send + Sync + 'static,
    ) -> MatrixBuilder {
        MatrixBuilder {
            entry: Box::new(entry),
            triangle: false,
            support: RowSupport::Unbounded,
            zero_rows_from: None,
            decay_from: None,
            description: description.into(),
        }
    }

    pub fn entry(&self, n: usize, k: usize) -> Rational {
        if let Some(len) = self.row_len(n) {
            if k >= len {
                return Rational::zero();
            }
        }
        if let Some(v) = self.inner.memo.read().expect("matrix memo poisoned").get(&(n, k)) {
            return v.clone();
        }
        let v = (self.inner.entry)(n, k);
        self.inner.memo.write().expect("matrix memo poisoned").insert((n, k), v.clone());
        v
    }

    pub fn is_triangle(&self) -> bool {
        self.inner.triangle
    }

    pub fn description(&self) -> &str {
        &self.inner.description
    }

    pub fn support(&self) -> &RowSupport {
        &self.inner.support
    }

    pub fn zero_rows_from(&self) -> Option<usize> {
        self.inner.zero_rows_from
    }

    pub fn decay_from(&self) -> Option<usize> {
        self.inner.decay_from
    }

    /// Number of leading columns of row `n` that may be nonzero.
    pub fn row_len(&self, n: usize) -> Option<usize> {
        if self.inner.zero_rows_from.is_some_and(|r| n >= r) {
            return Some(0);
        }
        match &self.inner.support {
            RowSupport::Unbounded => None,
            RowSupport::Triangle => Some(n + 1),
            RowSupport::Fixed(len) => Some(*len),
            RowSupport::Band { hi } => Some(n + hi + 1),
            RowSupport::PerRow(lens) => Some(lens.get(n).copied().unwrap_or(0)),
        }
    }

    /// Whether every row is known to have finitely many nonzero entries.
    pub fn has_finite_rows(&self) -> bool {
        self.inner.zero_rows_from == Some(0) || self.inner.support != RowSupport::Unbounded
    }

    /// Leading entries `a_n0 ..= a_n,last` of row `n`.
    pub fn row(&self, n: usize, last: usize) -> Vec<Rational> {
        let stop = match self.row_len(n) {
            Some(len) => len.min(last + 1),
            None => last + 1,
        };
        let mut out: Vec<Rational> = (0..stop).map(|k| self.entry(n, k)).collect();
        out.resize(last + 1, Rational::zero());
        out
    }

    /// Copy with the triangle flag forced, for validating truncation.
    pub fn with_triangle_flag(&self, flag: bool) -> MatrixOracle {
        let me = self.clone();
        MatrixOracle::builder(self.description().to_string(), move |n, k| me.entry(n, k))
            .triangle(flag)
            .support(self.support().clone())
            .zero_rows_from(self.zero_rows_from())
            .decay_from(self.decay_from())
            .build()
    }

    pub fn fhat() -> Self {
        MatrixOracle::builder("fhat", fhat_entry).triangle(true).support(RowSupport::Triangle).build()
    }

    pub fn fbar(lambda: &Lambda) -> Self {
        let lam = lambda.clone();
        MatrixOracle::builder(format!("fbar[{lambda}]"), move |n, k| fbar_entry(&lam, n, k))
            .triangle(true)
            .support(RowSupport::Triangle)
            .build()
    }

    pub fn fbar_inv(lambda: &Lambda) -> Self {
        let lam = lambda.clone();
        MatrixOracle::builder(format!("fbar_inv[{lambda}]"), move |n, k| fbar_inv_entry(&lam, n, k))
            .triangle(true)
            .support(RowSupport::Triangle)
            .build()
    }

    pub fn identity() -> Self {
        MatrixOracle::builder("identity", |n, k| if n == k { int(1) } else { Rational::zero() })
            .triangle(true)
            .support(RowSupport::Triangle)
            .build()
    }

    pub fn zero() -> Self {
        MatrixOracle::builder("zero", |_, _| Rational::zero())
            .support(RowSupport::Fixed(0))
            .zero_rows_from(Some(0))
            .build()
    }

    /// `a_00 = 1`, every other entry 0.
    pub fn a00_only() -> Self {
        Self::sparse(vec![(0, 0, int(1))]).renamed("a00_only")
    }

    /// Every row equal to `e^(0)`: `a_nk = 1` if `k = 0`.
    pub fn row_e0() -> Self {
        Self::row_constant(0, int(1)).renamed("row_e0")
    }

    /// Finitely many listed entries; everything else 0.
    pub fn sparse(entries: Vec<(usize, usize, Rational)>) -> Self {
        let mut map: HashMap<(usize, usize), Rational> = HashMap::new();
        for (n, k, v) in entries {
            *map.entry((n, k)).or_insert_with(Rational::zero) += v;
        }
        map.retain(|_, v| !v.is_zero());
        let rows = map.keys().map(|(n, _)| n + 1).max().unwrap_or(0);
        let mut lens = vec![0usize; rows];
        for (n, k) in map.keys() {
            lens[*n] = lens[*n].max(k + 1);
        }
        let count = map.len();
        MatrixOracle::builder(format!("sparse[{count}]"), move |n, k| {
            map.get(&(n, k)).cloned().unwrap_or_else(Rational::zero)
        })
        .support(RowSupport::PerRow(Arc::new(lens)))
        .zero_rows_from(Some(rows))
        .build()
    }

    /// Entries inside `n - lo <= k <= n + hi` follow `rule`; the rest are 0.
    pub fn banded(lo: usize, hi: usize, rule: BandRule) -> Self {
        MatrixOracle::builder(format!("banded[{lo},{hi}]"), move |n, k| {
            if k + lo >= n && k <= n + hi {
                rule.value(n, k)
            } else {
                Rational::zero()
            }
        })
        .triangle(hi == 0)
        .support(RowSupport::Band { hi })
        .build()
    }

    /// Every row has the single nonzero entry `a_{n,col} = value`.
    pub fn row_constant(col: usize, value: Rational) -> Self {
        let zero = value.is_zero();
        MatrixOracle::builder(
            format!("row_constant[{col}]"),
            move |_, k| if k == col { value.clone() } else { Rational::zero() },
        )
        .support(RowSupport::Fixed(col + 1))
        .zero_rows_from(if zero { Some(0) } else { None })
        .build()
    }

    /// `c_nk = (1/lambda_n) sum_{i<=n} d_i (f_i/f_{i+1} a_ik - f_{i+1}/f_i a_{i-1,k})`,
    /// evaluated through the recurrence on `lambda_n c_nk`.
    pub fn compose(a: &MatrixOracle, lambda: &Lambda) -> Self {
        let src = a.clone();
        let lam = lambda.clone();
        let columns: RwLock<HashMap<usize, Vec<Rational>>> = RwLock::new(HashMap::new());
        let entry = move |n: usize, k: usize| {
            {
                let cols = columns.read().expect("compose memo poisoned");
                if let Some(col) = cols.get(&k) {
                    if let Some(v) = col.get(n) {
                        return v / lam.at(n);
                    }
                }
            }
            let mut cols = columns.write().expect("compose memo poisoned");
            let col = cols.entry(k).or_default();
            while col.len() <= n {
                let i = col.len();
                let prev = col.last().cloned().unwrap_or_else(Rational::zero);
                let mut term = fib_q(i) / fib_q(i + 1) * src.entry(i, k);
                if i > 0 {
                    term -= fib_q(i + 1) / fib_q(i) * src.entry(i - 1, k);
                }
                col.push(prev + lam.diff(i) * term);
            }
            &col[n] / lam.at(n)
        };
        let support = match a.support() {
            RowSupport::Unbounded => RowSupport::Unbounded,
            RowSupport::Triangle => RowSupport::Triangle,
            RowSupport::Fixed(len) => RowSupport::Fixed(*len),
            RowSupport::Band { hi } => RowSupport::Band { hi: *hi },
            RowSupport::PerRow(lens) => RowSupport::Fixed(lens.iter().copied().max().unwrap_or(0)),
        };
        let all_zero = a.zero_rows_from() == Some(0);
        MatrixOracle::builder(format!("compose[{} ; {lambda}]", a.description()), entry)
            .triangle(a.is_triangle())
            .support(support)
            .zero_rows_from(if all_zero { Some(0) } else { None })
            .decay_from(a.zero_rows_from())
            .build()
    }

    /// `d_nk = a_nk - a_{n-1,k}` with `a_{-1,k} = 0`.
    pub fn row_difference(a: &MatrixOracle) -> Self {
        let src = a.clone();
        let entry = move |n: usize, k: usize| {
            let here = src.entry(n, k);
            if n == 0 {
                here
            } else {
                here - src.entry(n - 1, k)
            }
        };
        let support = match a.support() {
            RowSupport::PerRow(lens) => {
                let mut out: Vec<usize> = Vec::with_capacity(lens.len() + 1);
                for n in 0..=lens.len() {
                    let here = lens.get(n).copied().unwrap_or(0);
                    let before = if n == 0 { 0 } else { lens[n - 1] };
                    out.push(here.max(before));
                }
                RowSupport::PerRow(Arc::new(out))
            }
            other => other.clone(),
        };
        MatrixOracle::builder(format!("row_difference[{}]", a.description()), entry)
            .triangle(a.is_triangle())
            .support(support)
            .zero_rows_from(a.zero_rows_from().map(|r| r + 1))
            .decay_from(None)
            .build()
    }

    fn renamed(self, name: &str) -> Self {
        let me = self.clone();
        MatrixOracle::builder(name, move |n, k| me.entry(n, k))
            .triangle(self.is_triangle())
            .support(self.support().clone())
            .zero_rows_from(self.zero_rows_from())
            .decay_from(self.decay_from())
            .build()
    }

    /// Looks up a builtin by name. `fbar` and `fbar_inv` use `lambda`.
    pub fn builtin(name: &str, lambda: &Lambda) -> Result<Self> {
        Ok(match name {
            "fhat" => Self::fhat(),
            "fbar" => Self::fbar(lambda),
            "fbar_inv" => Self::fbar_inv(lambda),
            "identity" => Self::identity(),
            "zero" => Self::zero(),
            "a00_only" => Self::a00_only(),
            "row_e0" => Self::row_e0(),
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        })
    }
}

pub const BUILTIN_MATRICES: &[&str] = &["fhat", "fbar", "fbar_inv", "identity", "zero", "a00_only", "row_e0"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_metadata() {
        let a = MatrixOracle::a00_only();
        assert_eq!(a.entry(0, 0), int(1));
        assert_eq!(a.row_len(0), Some(1));
        assert_eq!(a.row_len(1), Some(0));
        assert_eq!(a.zero_rows_from(), Some(1));
        assert!(a.has_finite_rows());
        assert!(!MatrixOracle::builder("free", |_, _| int(1)).build().has_finite_rows());
    }

    #[test]
    fn compose_recurrence_matches_direct_sum() {
        let lam = Lambda::linear();
        let a = MatrixOracle::banded(1, 2, BandRule::Alternating);
        let c = MatrixOracle::compose(&a, &lam);
        for n in 0..12 {
            for k in 0..14 {
                assert_eq!(c.entry(n, k), compose_entry(&a, &lam, n, k), "({n},{k})");
            }
        }
    }

    #[test]
    fn compose_of_fbar_inverse_is_identity() {
        let lam = Lambda::geometric(int(2)).unwrap();
        let c = MatrixOracle::compose(&MatrixOracle::fbar_inv(&lam), &lam);
        for n in 0..=24 {
            for k in 0..=24 {
                assert_eq!(c.entry(n, k), if n == k { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn compose_of_finite_rank_decays() {
        let c = MatrixOracle::compose(&MatrixOracle::a00_only(), &Lambda::linear());
        assert_eq!(c.decay_from(), Some(1));
        // lambda_n c_n0 is constant from n = 1 on
        let s1 = c.entry(1, 0) * int(2);
        for n in 1..10 {
            assert_eq!(c.entry(n, 0) * int(n as i64 + 1), s1);
        }
    }

    #[test]
    fn row_difference_support() {
        let d = MatrixOracle::row_difference(&MatrixOracle::a00_only());
        assert_eq!(d.entry(0, 0), int(1));
        assert_eq!(d.entry(1, 0), int(-1));
        assert_eq!(d.zero_rows_from(), Some(2));
    }
}
