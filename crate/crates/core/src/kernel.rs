//! Weights shared by every computation that moves a sequence or a matrix
//! row through the inverse of the weighted-mean Fibonacci difference matrix.
//!
//! With `d_k = lambda_k - lambda_{k-1}`:
//!
//! * `u_k = (lambda_k / d_k) f_{k+1} / f_k` is the diagonal scale,
//! * `c_k = lambda_k (1/(d_k f_k f_{k+1}) - 1/(d_{k+1} f_{k+1} f_{k+2}))`
//!   multiplies tail sums,
//! * `s_k = f_{k+1}^2`.
//!
//! For coefficients `a_0..=a_m`, the transformed row is
//! `abar_k(m) = u_k a_k + c_k sum_{j=k+1}^{m} s_j a_j`.

use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_traits::Zero;

use crate::numerics::{fib_q, Lambda, Rational};

#[derive(Default)]
struct Tables {
    u: Vec<Rational>,
    c: Vec<Rational>,
    s: Vec<Rational>,
}

/// Lazily extended weight tables for one weight sequence.
pub struct Kernel {
    lambda: Lambda,
    tables: RwLock<Tables>,
}

/// Kernels kept alive across calls, most recently used last.
const SHARED_CAPACITY: usize = 8;

fn shared_cache() -> &'static Mutex<Vec<Arc<Kernel>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<Kernel>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

impl Kernel {
    pub fn new(lambda: &Lambda) -> Self {
        Kernel { lambda: lambda.clone(), tables: RwLock::new(Tables::default()) }
    }

    /// Process-wide kernel for `lambda`, so tables are built once.
    pub fn shared(lambda: &Lambda) -> Arc<Kernel> {
        let mut cache = shared_cache().lock().expect("kernel cache poisoned");
        if let Some(i) = cache.iter().position(|k| k.lambda == *lambda) {
            let k = cache.remove(i);
            cache.push(k.clone());
            return k;
        }
        if cache.len() == SHARED_CAPACITY {
            cache.remove(0);
        }
        let k = Arc::new(Kernel::new(lambda));
        cache.push(k.clone());
        k
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    fn ensure(&self, k: usize) {
        if self.tables.read().expect("kernel poisoned").u.len() > k {
            return;
        }
        let mut t = self.tables.write().expect("kernel poisoned");
        while t.u.len() <= k {
            let i = t.u.len();
            let lam = self.lambda.at(i);
            let d = self.lambda.diff(i);
            let d_next = self.lambda.diff(i + 1);
            let (f0, f1, f2) = (fib_q(i), fib_q(i + 1), fib_q(i + 2));
            let u = &lam / &d * &f1 / &f0;
            let c = &lam * ((&d * &f0 * &f1).recip() - (&d_next * &f1 * &f2).recip());
            t.u.push(u);
            t.c.push(c);
            t.s.push(&f1 * &f1);
        }
    }

    pub fn u(&self, k: usize) -> Rational {
        self.ensure(k);
        self.tables.read().expect("kernel poisoned").u[k].clone()
    }

    pub fn c(&self, k: usize) -> Rational {
        self.ensure(k);
        self.tables.read().expect("kernel poisoned").c[k].clone()
    }

    pub fn s(&self, k: usize) -> Rational {
        self.ensure(k);
        self.tables.read().expect("kernel poisoned").s[k].clone()
    }

    /// `abar_k(m)` for `k = 0..=m`, where `m = a.len() - 1`.
    pub fn abar_row(&self, a: &[Rational]) -> Vec<Rational> {
        if a.is_empty() {
            return Vec::new();
        }
        let m = a.len() - 1;
        self.ensure(m);
        let t = self.tables.read().expect("kernel poisoned");
        let mut out = vec![Rational::zero(); a.len()];
        let mut tail = Rational::zero();
        for k in (0..=m).rev() {
            let mut v = &t.u[k] * &a[k];
            if !tail.is_zero() {
                v += &t.c[k] * &tail;
            }
            out[k] = v;
            if !a[k].is_zero() {
                tail += &t.s[k] * &a[k];
            }
        }
        out
    }

    /// Single entry `abar_k(m)` with an explicit tail sum.
    pub fn abar_entry(&self, a: &[Rational], k: usize, m: usize) -> Rational {
        let at = |j: usize| a.get(j).cloned().unwrap_or_else(Rational::zero);
        let tail = (k + 1..=m).fold(Rational::zero(), |acc, j| acc + self.s(j) * at(j));
        self.u(k) * at(k) + self.c(k) * tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frac, int};

    #[test]
    fn linear_weights() {
        let k = Kernel::new(&Lambda::linear());
        // u_0 = 1 * f_1/f_0 = 1; u_5 = 6 * 13/8
        assert_eq!(k.u(0), int(1));
        assert_eq!(k.u(5), frac(39, 4));
        // c_0 = 1 * (1/(1*1*1) - 1/(1*1*2)) = 1/2
        assert_eq!(k.c(0), frac(1, 2));
        assert_eq!(k.s(3), int(25));
    }

    #[test]
    fn row_matches_entrywise() {
        let k = Kernel::new(&Lambda::geometric(int(3)).unwrap());
        let a = vec![int(1), frac(-2, 3), int(0), frac(5, 7), int(4)];
        let row = k.abar_row(&a);
        for (i, v) in row.iter().enumerate() {
            assert_eq!(*v, k.abar_entry(&a, i, a.len() - 1));
        }
    }
}
