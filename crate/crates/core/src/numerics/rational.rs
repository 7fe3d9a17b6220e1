//! Exact rational scalars, their canonical `p/q` text form, decimal
//! renderings, and rational interval enclosures for irrational quantities.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The universal scalar. Always canonical: positive denominator, reduced.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_bigint(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

/// `10^-e` as an exact rational.
pub fn ten_pow_neg(e: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(e))
}

/// Canonical text form: `p/q`, or `p` when the denominator is 1.
pub fn render(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p/q`, an integer, or a decimal literal with optional exponent
/// (`0.25`, `-1.5e-3`). Decimal input is converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::BadRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{fraction}");
    let numer: BigInt = joined.parse().map_err(|_| bad())?;
    let scale = exponent - fraction.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * ten.pow(scale as u32))
    } else {
        Rational::new(numer, ten.pow((-scale) as u32))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Decimal rendering rounded to `sig` significant digits, scientific
/// notation outside `[1e-4, 1e12)`. Rendering only; never parsed back.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let negative = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10u32);
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let ten_pow = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(Pow::pow(&ten, k as u32))
        } else {
            Rational::new(BigInt::one(), Pow::pow(&ten, (-k) as u32))
        }
    };
    while a < ten_pow(e) {
        e -= 1;
    }
    while a >= ten_pow(e + 1) {
        e += 1;
    }
    // digits = round(a * 10^(sig-1-e))
    let scaled = &a * ten_pow(sig as i64 - 1 - e);
    let mut digits = round_half_up(&scaled);
    if digits.to_string().len() > sig {
        digits /= &ten;
        e += 1;
    }
    let digit_str = digits.to_string();
    let body = if (-4..12).contains(&e) {
        plain_decimal(&digit_str, e)
    } else {
        let (head, tail) = digit_str.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{head}e{e}")
        } else {
            format!("{head}.{tail}e{e}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn plain_decimal(digits: &str, e: i64) -> String {
    let point = e + 1; // digits before the decimal point
    let s = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn round_half_up(x: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = x.numer().div_rem(x.denom());
    if &r * &two >= *x.denom() {
        q + 1
    } else {
        q
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    /// Enclosure of `|x|` for every `x` in the interval.
    pub fn abs(&self) -> Interval {
        if self.lo >= Rational::zero() {
            self.clone()
        } else if self.hi <= Rational::zero() {
            Interval::new(-self.hi.clone(), -self.lo.clone())
        } else {
            let m = if -self.lo.clone() > self.hi { -self.lo.clone() } else { self.hi.clone() };
            Interval::new(Rational::zero(), m)
        }
    }
}

/// Rational enclosure of sqrt(5) of width `2^-bits`.
pub fn sqrt5_enclosure(bits: u32) -> Interval {
    let scale = BigInt::one() << bits;
    let target = BigInt::from(5) * &scale * &scale;
    let root = target.sqrt();
    let lo = Rational::new(root.clone(), scale.clone());
    let hi = Rational::new(root + 1, scale);
    Interval::new(lo, hi)
}

/// Enclosure of `x^(1/n)` for `x >= 0`, width at most `2^-bits`.
pub fn nth_root_enclosure(x: &Rational, n: u32, bits: u32) -> Interval {
    assert!(!x.is_negative(), "root of a negative number");
    if x.is_zero() {
        return Interval::zero();
    }
    if n == 1 {
        return Interval::point(x.clone());
    }
    // floor((x * 2^(n*bits))^(1/n)) / 2^bits
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(Pow::pow(&scale, n));
    let floor = scaled.numer() / scaled.denom();
    let root = floor.nth_root(n);
    let lo = Rational::new(root.clone(), scale.clone());
    let hi = Rational::new(root + 1, scale);
    Interval::new(lo, hi)
}

/// Exponent of an `l_p` space: a rational `p >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent(Rational);

impl Exponent {
    pub fn new(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidExponent(render(&p)));
        }
        Ok(Exponent(p))
    }

    pub fn one() -> Self {
        Exponent(Rational::one())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn as_integer(&self) -> Option<u32> {
        if self.0.is_integer() {
            self.0.to_integer().to_u32()
        } else {
            None
        }
    }

    /// Conjugate exponent `q = p/(p-1)`; `None` for `p = 1` (q = infinity).
    pub fn conjugate(&self) -> Option<Exponent> {
        if self.0.is_one() {
            None
        } else {
            Some(Exponent(&self.0 / (&self.0 - Rational::one())))
        }
    }
}

/// Width bound for irrational power enclosures, `2^-50 < 10^-15`.
pub const POWER_ENCLOSURE_BITS: u32 = 50;

/// `|x|^p`, exact for integer `p`, otherwise a rational enclosure with
/// width at most `10^-15` relative to the unit scale of `x`.
pub fn abs_pow(x: &Rational, p: &Exponent) -> Interval {
    let a = x.abs();
    if let Some(e) = p.as_integer() {
        return Interval::point(Pow::pow(&a, e));
    }
    let num = p.value().numer().to_u32().expect("exponent numerator too large");
    let den = p.value().denom().to_u32().expect("exponent denominator too large");
    let powered = Pow::pow(&a, num);
    // tighten until the enclosure is narrow enough
    let mut bits = POWER_ENCLOSURE_BITS;
    let limit = ten_pow_neg(15);
    loop {
        let enc = nth_root_enclosure(&powered, den, bits);
        if enc.width() <= limit {
            return enc;
        }
        bits += 16;
    }
}

pub fn sign_of(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}
