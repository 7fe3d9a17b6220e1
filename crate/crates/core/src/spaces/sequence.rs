use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Pow, Zero};

use super::basis::{b_sequence, basis_vector};
use crate::error::{Error, Result};
use crate::numerics::{fib_q, frac, int, Lambda, Rational};

type TermFn = dyn Fn(usize) -> Rational + Send + Sync;

/// Closed form of the weighted-mean transform of a builtin witness, valid
/// for every weight sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbarForm {
    /// `lambda_0 / lambda_n`
    LambdaRatio,
    /// `1` at every index
    Ones,
    /// the unit vector `e^(k)`
    Unit(usize),
    Zero,
}

impl FbarForm {
    pub fn value(self, lambda: &Lambda, n: usize) -> Rational {
        match self {
            FbarForm::LambdaRatio => lambda.at(0) / lambda.at(n),
            FbarForm::Ones => Rational::one(),
            FbarForm::Unit(k) => {
                if n == k {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            FbarForm::Zero => Rational::zero(),
        }
    }

    pub fn limit(self) -> Rational {
        match self {
            FbarForm::Ones => Rational::one(),
            _ => Rational::zero(),
        }
    }
}

/// Where a sequence came from. Only builtin witnesses may carry certified
/// membership verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Builtin,
    User,
}

/// Lazy, memoised, exact-rational sequence `x = (x_k)` with `x_{-1} = 0`.
#[derive(Clone)]
pub struct SequenceOracle {
    term: Arc<TermFn>,
    memo: Arc<RwLock<Vec<Rational>>>,
    eventually: Option<(usize, Rational)>,
    fbar_form: Option<FbarForm>,
    origin: Origin,
    description: String,
    note: Option<String>,
}

impl fmt::Debug for SequenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceOracle")
            .field("description", &self.description)
            .field("origin", &self.origin)
            .field("eventually", &self.eventually)
            .field("fbar_form", &self.fbar_form)
            .finish()
    }
}

impl SequenceOracle {
    pub fn new(description: impl Into<String>, term: impl Fn(usize) -> Rational + Send + Sync + 'static) -> Self {
        SequenceOracle {
            term: Arc::new(term),
            memo: Arc::new(RwLock::new(Vec::new())),
            eventually: None,
            fbar_form: None,
            origin: Origin::User,
            description: description.into(),
            note: None,
        }
    }

    /// Declares `x_k = value` for every `k >= from`.
    pub fn eventually(mut self, from: usize, value: Rational) -> Self {
        self.eventually = Some((from, value));
        self
    }

    pub fn with_fbar_form(mut self, form: FbarForm) -> Self {
        self.fbar_form = Some(form);
        self
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn get(&self, k: usize) -> Rational {
        if let Some((from, v)) = &self.eventually {
            if k >= *from {
                return v.clone();
            }
        }
        {
            let memo = self.memo.read().expect("sequence memo poisoned");
            if let Some(v) = memo.get(k) {
                return v.clone();
            }
        }
        let mut memo = self.memo.write().expect("sequence memo poisoned");
        while memo.len() <= k {
            let i = memo.len();
            memo.push((self.term)(i));
        }
        memo[k].clone()
    }

    /// `x_k` with `x_{-1} = 0` (and every negative index).
    pub fn at(&self, k: i64) -> Rational {
        if k < 0 {
            Rational::zero()
        } else {
            self.get(k as usize)
        }
    }

    pub fn prefix(&self, last: usize) -> Vec<Rational> {
        (0..=last).map(|k| self.get(k)).collect()
    }

    pub fn eventual(&self) -> Option<&(usize, Rational)> {
        self.eventually.as_ref()
    }

    /// `Some(s)` when `x_k = 0` for all `k >= s`.
    pub fn zero_from(&self) -> Option<usize> {
        match &self.eventually {
            Some((s, v)) if v.is_zero() => Some(*s),
            _ => None,
        }
    }

    pub fn fbar_form(&self) -> Option<FbarForm> {
        self.fbar_form
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn is_builtin(&self) -> bool {
        self.origin == Origin::Builtin
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    /// Termwise `self - other`, keeping an eventual-value declaration when
    /// both sides have one.
    pub fn minus(&self, other: &SequenceOracle) -> SequenceOracle {
        let (a, b) = (self.clone(), other.clone());
        let mut out = SequenceOracle::new(format!("({}) - ({})", self.description, other.description), move |k| {
            a.get(k) - b.get(k)
        });
        if let (Some((s1, v1)), Some((s2, v2))) = (&self.eventually, &other.eventually) {
            out = out.eventually(*s1.max(s2), v1 - v2);
        }
        out.with_origin(if self.is_builtin() && other.is_builtin() { Origin::Builtin } else { Origin::User })
    }

    /// Finitely supported sequence from a table; the tail is zero.
    pub fn table(values: Vec<Rational>) -> Self {
        let len = values.len();
        let data = Arc::new(values);
        SequenceOracle::new(format!("table[{len}]"), move |k| data.get(k).cloned().unwrap_or_else(Rational::zero))
            .eventually(len, Rational::zero())
    }

    pub fn zero() -> Self {
        SequenceOracle::new("zero", |_| Rational::zero())
            .eventually(0, Rational::zero())
            .with_fbar_form(FbarForm::Zero)
            .with_origin(Origin::Builtin)
    }

    /// `x_k = f_{k+1}^2`.
    pub fn fib_square() -> Self {
        SequenceOracle::new("fib_square", |k| {
            let f = fib_q(k + 1);
            &f * &f
        })
        .with_fbar_form(FbarForm::LambdaRatio)
        .with_origin(Origin::Builtin)
        .with_note(
            "indexed as x_k = f_{k+1}^2, the indexing for which the Fibonacci difference transform is e^(0); \
             the inclusion argument writes the same witness as (f_{n+k}^2)",
        )
    }

    pub fn b_seq() -> Self {
        SequenceOracle::new("b_seq", b_sequence).with_fbar_form(FbarForm::Ones).with_origin(Origin::Builtin)
    }

    /// All ones.
    pub fn unit() -> Self {
        SequenceOracle::new("unit", |_| Rational::one()).eventually(0, Rational::one()).with_origin(Origin::Builtin)
    }

    /// Unit vector `e^(k)`.
    pub fn unit_vector(k: usize) -> Self {
        SequenceOracle::new(format!("e({k})"), move |n| if n == k { Rational::one() } else { Rational::zero() })
            .eventually(k + 1, Rational::zero())
            .with_origin(Origin::Builtin)
    }

    /// Basis sequence `b^(k)` for the given weights.
    pub fn basis(k: usize, lambda: &Lambda) -> Self {
        let lam = lambda.clone();
        SequenceOracle::new(format!("basis({k})"), move |n| basis_vector(k, n, &lam))
            .with_fbar_form(FbarForm::Unit(k))
            .with_origin(Origin::Builtin)
    }

    /// `(1, -4, 0, 0, ...)`.
    pub fn sign_witness() -> Self {
        SequenceOracle::table(vec![int(1), int(-4)]).renamed("sign_witness").with_origin(Origin::Builtin)
    }

    /// `(1, 4, 0, 0, ...)`.
    pub fn abs_sign_witness() -> Self {
        SequenceOracle::table(vec![int(1), int(4)]).renamed("abs_sign_witness").with_origin(Origin::Builtin)
    }

    fn renamed(mut self, name: &str) -> Self {
        self.description = name.to_string();
        self
    }

    /// Parses a witness id such as `fib_square`, `basis(3)` or `e(2)`.
    pub fn builtin(name: &str, lambda: &Lambda) -> Result<Self> {
        let name = name.trim();
        if let Some(k) = parse_call(name, "basis")? {
            return Ok(Self::basis(k, lambda));
        }
        if let Some(k) = parse_call(name, "e")? {
            return Ok(Self::unit_vector(k));
        }
        Ok(match name {
            "fib_square" => Self::fib_square(),
            "b_seq" => Self::b_seq(),
            "unit" => Self::unit(),
            "sign_witness" => Self::sign_witness(),
            "abs_sign_witness" => Self::abs_sign_witness(),
            "zero" => Self::zero(),
            other => return Err(Error::UnknownWitness(other.to_string())),
        })
    }

    /// Named user rules with parameters.
    pub fn rule(name: &str, params: &RuleParams) -> Result<Self> {
        let seq = match name {
            "constant" => {
                let v = params.rational("value")?;
                SequenceOracle::new("constant", {
                    let v = v.clone();
                    move |_| v.clone()
                })
                .eventually(0, v)
            }
            "harmonic" => SequenceOracle::new("harmonic", |k| frac(1, k as i64 + 1)),
            "alternating" => SequenceOracle::new("alternating", |k| int(if k % 2 == 0 { 1 } else { -1 })),
            "geometric" => {
                let r = params.rational("ratio")?;
                SequenceOracle::new("geometric", move |k| Pow::pow(&r, k as u32))
            }
            "power" => {
                let e = params.rational("exponent")?;
                if !e.is_integer() {
                    return Err(Error::InvalidParameter("power rule needs an integer exponent".into()));
                }
                let e: i64 =
                    e.to_integer().try_into().map_err(|_| Error::InvalidParameter("exponent too large".into()))?;
                SequenceOracle::new("power", move |k| {
                    let base = int(k as i64 + 1);
                    if e >= 0 {
                        Pow::pow(&base, e as u32)
                    } else {
                        Pow::pow(&base, (-e) as u32).recip()
                    }
                })
            }
            other => return Err(Error::UnknownBuiltin(format!("sequence rule {other}"))),
        };
        Ok(seq.renamed(&format!("rule:{name}")))
    }
}

/// Parameter bag for [`SequenceOracle::rule`].
#[derive(Debug, Clone, Default)]
pub struct RuleParams(pub Vec<(String, Rational)>);

impl RuleParams {
    fn rational(&self, key: &str) -> Result<Rational> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::InvalidParameter(format!("missing rule parameter `{key}`")))
    }
}

fn parse_call(name: &str, head: &str) -> Result<Option<usize>> {
    let Some(rest) = name.strip_prefix(head).and_then(|r| r.strip_prefix('(')) else {
        return Ok(None);
    };
    let Some(inner) = rest.strip_suffix(')') else {
        return Err(Error::UnknownWitness(name.to_string()));
    };
    inner.trim().parse::<usize>().map(Some).map_err(|_| Error::UnknownWitness(name.to_string()))
}

pub const BUILTIN_SEQUENCES: &[&str] =
    &["fib_square", "b_seq", "unit", "basis(k)", "e(k)", "sign_witness", "abs_sign_witness", "zero"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        let lam = Lambda::linear();
        assert_eq!(SequenceOracle::builtin("fib_square", &lam).unwrap().get(2), int(9));
        assert_eq!(SequenceOracle::builtin("basis(0)", &lam).unwrap().get(2), frac(9, 2));
        assert_eq!(SequenceOracle::builtin("e(2)", &lam).unwrap().get(2), int(1));
        assert_eq!(SequenceOracle::builtin("e(2)", &lam).unwrap().zero_from(), Some(3));
        assert!(SequenceOracle::builtin("nope", &lam).is_err());
        assert!(SequenceOracle::builtin("basis(x)", &lam).is_err());
    }

    #[test]
    fn negative_index_is_zero() {
        let x = SequenceOracle::unit();
        assert_eq!(x.at(-1), int(0));
        assert_eq!(x.at(5), int(1));
    }

    #[test]
    fn difference_keeps_eventual_value() {
        let d = SequenceOracle::unit().minus(&SequenceOracle::unit_vector(3));
        assert_eq!(d.eventual(), Some(&(4, int(1))));
        assert_eq!(d.get(3), int(0));
    }
}
