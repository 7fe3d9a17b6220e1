//! JSON documents and shorthands describing weights, sequences and matrices.
//!
//! Rationals are written as `"p/q"` strings (integers and decimals are also
//! accepted). Shorthands: `linear`, `affine:2,1`, `geometric:2`,
//! `custom:1,3,4` for weights; `builtin:<name>` (or a bare name) for
//! sequences and matrices.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrices::{BandRule, MatrixOracle};
use crate::numerics::{parse_rational, render, Extension, Lambda, LambdaFamily, Rational};
use crate::spaces::{RuleParams, SequenceOracle};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RatLit {
    Text(String),
    Int(i64),
}

impl RatLit {
    fn value(&self) -> Result<Rational> {
        match self {
            RatLit::Text(s) => parse_rational(s),
            RatLit::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum LambdaDoc {
    Linear {},
    Affine {
        alpha: RatLit,
        beta: RatLit,
    },
    Geometric {
        ratio: RatLit,
    },
    Custom {
        values: Vec<RatLit>,
        #[serde(default)]
        extend: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SequenceDoc {
    Builtin {
        name: String,
    },
    Table {
        values: Vec<RatLit>,
        #[serde(default)]
        tail: Option<String>,
    },
    Rule {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, RatLit>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MatrixDoc {
    Builtin { name: String },
    Sparse { entries: Vec<(usize, usize, RatLit)> },
    Banded { band: (usize, usize), rule: String },
    RowConstant { row_value_at: (usize, RatLit) },
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Spec(format!("{what} spec: {e}")))
}

fn rationals(values: &[RatLit]) -> Result<Vec<Rational>> {
    values.iter().map(RatLit::value).collect()
}

fn csv_rationals(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(parse_rational).collect()
}

/// Weights from a JSON document or a shorthand.
pub fn parse_lambda(text: &str) -> Result<Lambda> {
    let text = text.trim();
    if text.starts_with('{') {
        return match from_json::<LambdaDoc>(text, "lambda")? {
            LambdaDoc::Linear {} => Ok(Lambda::linear()),
            LambdaDoc::Affine { alpha, beta } => Lambda::affine(alpha.value()?, beta.value()?),
            LambdaDoc::Geometric { ratio } => Lambda::geometric(ratio.value()?),
            LambdaDoc::Custom { values, extend } => {
                let extension = match extend.as_deref() {
                    None | Some("none") => Extension::None,
                    Some("arithmetic") => Extension::Arithmetic,
                    Some(other) => return Err(Error::Spec(format!("lambda spec: unknown extension `{other}`"))),
                };
                Lambda::custom(rationals(&values)?, extension)
            }
        };
    }
    let (head, args) = text.split_once(':').unwrap_or((text, ""));
    match head {
        "linear" if args.is_empty() => Ok(Lambda::linear()),
        "affine" => match csv_rationals(args)?.as_slice() {
            [a, b] => Lambda::affine(a.clone(), b.clone()),
            _ => Err(Error::Spec("affine shorthand is affine:alpha,beta".into())),
        },
        "geometric" => Lambda::geometric(parse_rational(args)?),
        "custom" => Lambda::custom(csv_rationals(args)?, Extension::None),
        "custom_arithmetic" => Lambda::custom(csv_rationals(args)?, Extension::Arithmetic),
        _ => Err(Error::Spec(format!("unrecognised lambda spec `{text}`"))),
    }
}

/// Canonical JSON document for `lambda`.
pub fn lambda_to_json(lambda: &Lambda) -> Value {
    match lambda.family() {
        LambdaFamily::Linear => json!({"family": "linear"}),
        LambdaFamily::Affine { alpha, beta } => {
            json!({"family": "affine", "alpha": render(alpha), "beta": render(beta)})
        }
        LambdaFamily::Geometric { ratio } => json!({"family": "geometric", "ratio": render(ratio)}),
        LambdaFamily::Custom { values, extension } => {
            let mut v = json!({"family": "custom", "values": values.iter().map(render).collect::<Vec<_>>()});
            if *extension == Extension::Arithmetic {
                v["extend"] = json!("arithmetic");
            }
            v
        }
    }
}

fn strip_builtin(text: &str) -> &str {
    text.strip_prefix("builtin:").unwrap_or(text)
}

/// Sequence from a JSON document or a builtin name.
pub fn parse_sequence(text: &str, lambda: &Lambda) -> Result<SequenceOracle> {
    let text = text.trim();
    if !text.starts_with('{') {
        return SequenceOracle::builtin(strip_builtin(text), lambda);
    }
    match from_json::<SequenceDoc>(text, "sequence")? {
        SequenceDoc::Builtin { name } => SequenceOracle::builtin(&name, lambda),
        SequenceDoc::Table { values, tail } => {
            if let Some(t) = tail.filter(|t| t != "zero") {
                return Err(Error::Spec(format!("sequence spec: unsupported tail `{t}`")));
            }
            Ok(SequenceOracle::table(rationals(&values)?))
        }
        SequenceDoc::Rule { name, params } => {
            let params = params.iter().map(|(k, v)| Ok((k.clone(), v.value()?))).collect::<Result<Vec<_>>>()?;
            SequenceOracle::rule(&name, &RuleParams(params))
        }
    }
}

/// Matrix from a JSON document or a builtin name.
pub fn parse_matrix(text: &str, lambda: &Lambda) -> Result<MatrixOracle> {
    let text = text.trim();
    if !text.starts_with('{') {
        return MatrixOracle::builtin(strip_builtin(text), lambda);
    }
    match from_json::<MatrixDoc>(text, "matrix")? {
        MatrixDoc::Builtin { name } => MatrixOracle::builtin(&name, lambda),
        MatrixDoc::Sparse { entries } => {
            let entries = entries.into_iter().map(|(n, k, v)| Ok((n, k, v.value()?))).collect::<Result<Vec<_>>>()?;
            Ok(MatrixOracle::sparse(entries))
        }
        MatrixDoc::Banded { band: (lo, hi), rule } => Ok(MatrixOracle::banded(lo, hi, BandRule::parse(&rule)?)),
        MatrixDoc::RowConstant { row_value_at: (k, v) } => Ok(MatrixOracle::row_constant(k, v.value()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frac, int};
    use crate::spaces::fbar_transform;

    #[test]
    fn lambda_documents_and_shorthands() {
        assert_eq!(parse_lambda(r#"{"family":"linear"}"#).unwrap(), Lambda::linear());
        assert_eq!(parse_lambda("affine:2,1").unwrap(), Lambda::affine(int(2), int(1)).unwrap());
        let g = parse_lambda(r#"{"family":"geometric","ratio":"3/2"}"#).unwrap();
        assert_eq!(g, Lambda::geometric(frac(3, 2)).unwrap());
        assert_eq!(parse_lambda(&lambda_to_json(&g).to_string()).unwrap(), g);
        let c = parse_lambda(r#"{"family":"custom","values":["1","3",4],"extend":"arithmetic"}"#).unwrap();
        assert_eq!(c.at(5), int(7));
        assert_eq!(parse_lambda(&lambda_to_json(&c).to_string()).unwrap(), c);
        assert!(parse_lambda(r#"{"family":"geometric","ratio":"1/2"}"#).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_lambda("{\"family\": linear}").unwrap_err().to_string();
        assert!(err.contains("line 1 column"), "{err}");
        assert!(parse_lambda(r#"{"family":"linear","extra":1}"#).is_err());
    }

    #[test]
    fn sequence_documents() {
        let lam = Lambda::linear();
        let x = parse_sequence(r#"{"kind":"table","values":["1","-4"],"tail":"zero"}"#, &lam).unwrap();
        assert_eq!(x.prefix(3), vec![int(1), int(-4), int(0), int(0)]);
        let fs = parse_sequence("builtin:fib_square", &lam).unwrap();
        assert_eq!(fbar_transform(&fs, &lam, 4).unwrap(), frac(1, 5));
        let r = parse_sequence(r#"{"kind":"rule","name":"geometric","params":{"ratio":"1/3"}}"#, &lam).unwrap();
        assert_eq!(r.get(2), frac(1, 9));
        assert!(parse_sequence(r#"{"kind":"table","values":[],"tail":"ones"}"#, &lam).is_err());
    }

    #[test]
    fn matrix_documents() {
        let lam = Lambda::linear();
        let a = parse_matrix(r#"{"kind":"sparse","entries":[[0,0,"1"],[1,1,"1/2"]]}"#, &lam).unwrap();
        assert_eq!(a.entry(1, 1), frac(1, 2));
        assert_eq!(a.zero_rows_from(), Some(2));
        let b = parse_matrix(r#"{"kind":"banded","band":[1,0],"rule":"fhat"}"#, &lam).unwrap();
        assert_eq!(b.entry(1, 0), int(-2));
        let r = parse_matrix(r#"{"kind":"row_constant","row_value_at":[0,"1"]}"#, &lam).unwrap();
        assert_eq!(r.entry(7, 0), int(1));
        assert!(parse_matrix("builtin:nope", &lam).is_err());
    }
}
