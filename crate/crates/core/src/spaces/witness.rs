use super::sequence::SequenceOracle;
use super::space::{membership, SpaceId};
use crate::error::Result;
use crate::numerics::{Lambda, Truncation, Verdict};

/// A builtin witness with the memberships it is known to have.
#[derive(Debug, Clone)]
pub struct InclusionWitness {
    pub name: String,
    pub oracle: SequenceOracle,
    pub expected: Vec<(SpaceId, bool)>,
}

#[derive(Debug, Clone)]
pub struct WitnessCheck {
    pub space: SpaceId,
    pub expected: bool,
    pub verdict: Verdict,
}

impl WitnessCheck {
    pub fn agrees(&self) -> bool {
        if self.expected {
            self.verdict.is_true()
        } else {
            self.verdict.is_false()
        }
    }
}

pub const WITNESS_NAMES: &[&str] = &["fib_square", "b_seq", "unit", "basis(k)", "sign_witness"];

/// Witness oracle plus its membership table under `lambda`.
///
/// The `c < c^lambda` row for the all-ones sequence is only listed when the
/// weights satisfy `liminf lambda_(n+1)/lambda_n = 1`.
pub fn inclusion_witness(name: &str, lambda: &Lambda) -> Result<InclusionWitness> {
    let oracle = SequenceOracle::builtin(name, lambda)?;
    let base = name.split('(').next().unwrap_or(name);
    let expected = match base {
        "fib_square" => vec![(SpaceId::C0Lambda, true), (SpaceId::CLambda, true), (SpaceId::LInf, false)],
        "b_seq" => vec![(SpaceId::CLambda, true), (SpaceId::C0Lambda, false)],
        "unit" => {
            let mut rows = vec![(SpaceId::C, true), (SpaceId::C0, false)];
            if lambda.liminf_ratio_is_one() == Some(true) {
                rows.push((SpaceId::CLambda, true));
            }
            rows
        }
        "basis" => vec![(SpaceId::C0Lambda, true), (SpaceId::CLambda, true)],
        "sign_witness" | "abs_sign_witness" | "e" | "zero" => vec![(SpaceId::C0, true), (SpaceId::C0Lambda, true)],
        _ => vec![],
    };
    Ok(InclusionWitness { name: name.to_string(), oracle, expected })
}

pub fn verify_witness(w: &InclusionWitness, lambda: &Lambda, t: &Truncation) -> Result<Vec<WitnessCheck>> {
    w.expected
        .iter()
        .map(|(space, expected)| {
            Ok(WitnessCheck {
                space: space.clone(),
                expected: *expected,
                verdict: membership(&w.oracle, space, lambda, t)?,
            })
        })
        .collect()
}
