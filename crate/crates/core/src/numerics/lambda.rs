//! Strictly increasing positive weight sequences `lambda = (lambda_k)` with
//! `lambda_{-1} = 0`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Pow, Signed, Zero};

use super::rational::{int, render, Rational};
use crate::error::{Error, Result};

/// How a custom table continues past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Queries past the table fail with a horizon error.
    None,
    /// Repeats the last difference: `lambda_{k+1} = lambda_k + (lambda_last - lambda_{last-1})`.
    Arithmetic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaFamily {
    /// `lambda_k = k + 1`
    Linear,
    /// `lambda_k = alpha k + beta`
    Affine {
        alpha: Rational,
        beta: Rational,
    },
    /// `lambda_k = r^{k+1}`
    Geometric {
        ratio: Rational,
    },
    Custom {
        values: Arc<Vec<Rational>>,
        extension: Extension,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda {
    family: LambdaFamily,
}

impl Lambda {
    pub fn linear() -> Self {
        Lambda { family: LambdaFamily::Linear }
    }

    pub fn affine(alpha: Rational, beta: Rational) -> Result<Self> {
        if !alpha.is_positive() || !beta.is_positive() {
            return Err(Error::InvalidLambda(format!(
                "affine family needs alpha, beta > 0 (got {}, {})",
                render(&alpha),
                render(&beta)
            )));
        }
        Ok(Lambda { family: LambdaFamily::Affine { alpha, beta } })
    }

    pub fn geometric(ratio: Rational) -> Result<Self> {
        if ratio <= Rational::one() {
            return Err(Error::InvalidLambda(format!("geometric ratio must exceed 1 (got {})", render(&ratio))));
        }
        Ok(Lambda { family: LambdaFamily::Geometric { ratio } })
    }

    pub fn custom(values: Vec<Rational>, extension: Extension) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidLambda("custom table is empty".into()));
        }
        if !values[0].is_positive() {
            return Err(Error::InvalidLambda("lambda_0 must be positive".into()));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidLambda(format!("table not strictly increasing at index {}", i + 1)));
        }
        if extension == Extension::Arithmetic && values.len() < 2 {
            return Err(Error::InvalidLambda("arithmetic extension needs at least two entries".into()));
        }
        Ok(Lambda { family: LambdaFamily::Custom { values: Arc::new(values), extension } })
    }

    pub fn family(&self) -> &LambdaFamily {
        &self.family
    }

    /// Last valid index, or `None` when the sequence is defined everywhere.
    pub fn horizon(&self) -> Option<usize> {
        match &self.family {
            LambdaFamily::Custom { values, extension: Extension::None } => Some(values.len() - 1),
            _ => None,
        }
    }

    /// Fails unless `lambda_k` is defined for every `k <= last`.
    pub fn ensure(&self, last: usize) -> Result<()> {
        match self.horizon() {
            Some(h) if last > h => Err(Error::LambdaHorizon { index: last as i64, last: h }),
            _ => Ok(()),
        }
    }

    /// `lambda_k` for `k >= -1`.
    pub fn value(&self, k: i64) -> Result<Rational> {
        if k < -1 {
            return Err(Error::IndexRejected { op: "lambda_value", detail: format!("k = {k} < -1") });
        }
        if k == -1 {
            return Ok(Rational::zero());
        }
        let k = k as usize;
        Ok(match &self.family {
            LambdaFamily::Linear => int(k as i64 + 1),
            LambdaFamily::Affine { alpha, beta } => alpha * int(k as i64) + beta,
            LambdaFamily::Geometric { ratio } => Pow::pow(ratio, (k + 1) as u32),
            LambdaFamily::Custom { values, extension } => match values.get(k) {
                Some(v) => v.clone(),
                None => match extension {
                    Extension::None => return Err(Error::LambdaHorizon { index: k as i64, last: values.len() - 1 }),
                    Extension::Arithmetic => {
                        let last = values.len() - 1;
                        let step = &values[last] - &values[last - 1];
                        &values[last] + step * int((k - last) as i64)
                    }
                },
            },
        })
    }

    /// `lambda_k`; panics past the horizon of a custom table. Callers check
    /// [`Lambda::ensure`] before entering a computation.
    pub fn at(&self, k: usize) -> Rational {
        self.value(k as i64).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `lambda_{k-1}` with `lambda_{-1} = 0`.
    pub fn prev(&self, k: usize) -> Rational {
        if k == 0 {
            Rational::zero()
        } else {
            self.at(k - 1)
        }
    }

    /// `lambda_k - lambda_{k-1}`.
    pub fn diff(&self, k: usize) -> Rational {
        self.at(k) - self.prev(k)
    }

    /// Whether `liminf lambda_{n+1}/lambda_n = 1`; `None` when unknown.
    /// This gates the `c` inclusion witness.
    pub fn liminf_ratio_is_one(&self) -> Option<bool> {
        match &self.family {
            LambdaFamily::Linear | LambdaFamily::Affine { .. } => Some(true),
            LambdaFamily::Geometric { .. } => Some(false),
            LambdaFamily::Custom { extension: Extension::Arithmetic, .. } => Some(true),
            LambdaFamily::Custom { extension: Extension::None, .. } => None,
        }
    }

    /// Checks `lambda_{-1} = 0 < lambda_0 < lambda_1 < ...` on `-1..=last`.
    pub fn check_window(&self, last: usize) -> Result<()> {
        let mut previous = Rational::zero();
        for k in 0..=last {
            let v = self.value(k as i64)?;
            if v <= previous {
                return Err(Error::InvalidLambda(format!("not strictly increasing at k = {k}")));
            }
            previous = v;
        }
        Ok(())
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            LambdaFamily::Linear => write!(f, "linear"),
            LambdaFamily::Affine { alpha, beta } => write!(f, "affine({}, {})", render(alpha), render(beta)),
            LambdaFamily::Geometric { ratio } => write!(f, "geometric({})", render(ratio)),
            LambdaFamily::Custom { values, extension } => {
                write!(f, "custom[{}]", values.len())?;
                if *extension == Extension::Arithmetic {
                    write!(f, "+arithmetic")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::frac;

    #[test]
    fn family_values() {
        assert_eq!(Lambda::linear().value(4).unwrap(), int(5));
        assert_eq!(Lambda::linear().value(-1).unwrap(), int(0));
        assert_eq!(Lambda::geometric(int(2)).unwrap().value(3).unwrap(), int(16));
        let affine = Lambda::affine(int(2), int(1)).unwrap();
        assert_eq!(affine.value(3).unwrap(), int(7));
        assert!(Lambda::linear().value(-2).is_err());
    }

    #[test]
    fn custom_horizon() {
        let lam = Lambda::custom(vec![int(1), int(3), int(4)], Extension::None).unwrap();
        assert_eq!(lam.value(2).unwrap(), int(4));
        assert!(matches!(lam.value(3), Err(Error::LambdaHorizon { .. })));
        assert!(lam.ensure(3).is_err());
        let ext = Lambda::custom(vec![int(1), int(3), int(4)], Extension::Arithmetic).unwrap();
        assert_eq!(ext.value(5).unwrap(), int(7));
    }

    #[test]
    fn rejects_bad_families() {
        assert!(Lambda::geometric(int(1)).is_err());
        assert!(Lambda::affine(int(0), int(1)).is_err());
        assert!(Lambda::custom(vec![int(1), int(1)], Extension::None).is_err());
        assert!(Lambda::custom(vec![frac(-1, 2)], Extension::None).is_err());
    }

    #[test]
    fn diffs() {
        let lam = Lambda::linear();
        assert_eq!(lam.diff(0), int(1));
        assert_eq!(lam.diff(7), int(1));
        let g = Lambda::geometric(int(2)).unwrap();
        assert_eq!(g.diff(0), int(2));
        assert_eq!(g.diff(3), int(8));
    }
}
