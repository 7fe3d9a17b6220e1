//! Five-valued decisions for conditions that quantify over infinitely many
//! indices but are evaluated on finite prefixes.

use serde::Serialize;
use serde_json::{json, Value};

use super::rational::{render, to_decimal, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedTrue,
    CertifiedFalse,
    EmpiricalTrue,
    EmpiricalFalse,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::CertifiedTrue => "certified_true",
            Status::CertifiedFalse => "certified_false",
            Status::EmpiricalTrue => "empirical_true",
            Status::EmpiricalFalse => "empirical_false",
            Status::Indeterminate => "indeterminate",
        }
    }
}

/// A decision with the evidence it rests on.
///
/// Certified statuses rest on a finite exact certificate (a closed form or a
/// structural fact such as finite support); empirical ones always carry the
/// depth they were observed at.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub depth: Option<usize>,
    pub threshold: Option<Rational>,
    pub evidence: Vec<(usize, Rational)>,
    pub note: Option<String>,
}

impl Verdict {
    fn with_status(status: Status) -> Self {
        Verdict { status, depth: None, threshold: None, evidence: Vec::new(), note: None }
    }

    pub fn certified_true() -> Self {
        Self::with_status(Status::CertifiedTrue)
    }

    pub fn certified_false() -> Self {
        Self::with_status(Status::CertifiedFalse)
    }

    pub fn empirical_true(depth: usize) -> Self {
        Verdict { depth: Some(depth), ..Self::with_status(Status::EmpiricalTrue) }
    }

    pub fn empirical_false(depth: usize, threshold: Option<Rational>) -> Self {
        Verdict { depth: Some(depth), threshold, ..Self::with_status(Status::EmpiricalFalse) }
    }

    pub fn indeterminate(depth: Option<usize>) -> Self {
        Verdict { depth, ..Self::with_status(Status::Indeterminate) }
    }

    pub fn with_evidence(mut self, evidence: Vec<(usize, Rational)>) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn push_evidence(&mut self, index: usize, value: Rational) {
        self.evidence.push((index, value));
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.status, Status::CertifiedTrue | Status::CertifiedFalse)
    }

    pub fn is_true(&self) -> bool {
        matches!(self.status, Status::CertifiedTrue | Status::EmpiricalTrue)
    }

    pub fn is_false(&self) -> bool {
        matches!(self.status, Status::CertifiedFalse | Status::EmpiricalFalse)
    }

    /// Replaces a certified status by its empirical counterpart.
    pub fn downgrade(mut self, depth: usize) -> Self {
        self.status = match self.status {
            Status::CertifiedTrue => Status::EmpiricalTrue,
            Status::CertifiedFalse => Status::EmpiricalFalse,
            s => s,
        };
        if self.depth.is_none() {
            self.depth = Some(depth);
        }
        self
    }

    /// Conservative conjunction: certified only if every part is certified.
    pub fn all<'a>(parts: impl IntoIterator<Item = &'a Verdict>) -> Verdict {
        let parts: Vec<&Verdict> = parts.into_iter().collect();
        let depth = parts.iter().filter_map(|v| v.depth).min();
        if let Some(v) = parts.iter().find(|v| v.status == Status::CertifiedFalse) {
            return Verdict { note: None, evidence: v.evidence.clone(), ..Verdict::certified_false() };
        }
        if let Some(v) = parts.iter().find(|v| v.status == Status::EmpiricalFalse) {
            return Verdict::empirical_false(v.depth.unwrap_or(0), v.threshold.clone())
                .with_evidence(v.evidence.clone());
        }
        if parts.iter().any(|v| v.status == Status::Indeterminate) {
            return Verdict::indeterminate(depth);
        }
        if parts.iter().all(|v| v.status == Status::CertifiedTrue) {
            Verdict::certified_true()
        } else {
            Verdict::empirical_true(depth.unwrap_or(0))
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "status": self.status.as_str() });
        if let Some(d) = self.depth {
            v["depth"] = json!(d);
        }
        if let Some(t) = &self.threshold {
            v["threshold"] = json!(render(t));
        }
        if !self.evidence.is_empty() {
            v["evidence"] =
                Value::Array(self.evidence.iter().map(|(i, q)| json!([i, render(q), to_decimal(q, 12)])).collect());
        }
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::int;

    #[test]
    fn conjunction_rules() {
        let ct = Verdict::certified_true();
        let et = Verdict::empirical_true(10);
        let ef = Verdict::empirical_false(5, Some(int(100)));
        let ind = Verdict::indeterminate(Some(7));
        assert_eq!(Verdict::all([&ct, &ct]).status, Status::CertifiedTrue);
        assert_eq!(Verdict::all([&ct, &et]).status, Status::EmpiricalTrue);
        assert_eq!(Verdict::all([&ct, &ind]).status, Status::Indeterminate);
        assert_eq!(Verdict::all([&ind, &ef]).status, Status::EmpiricalFalse);
        assert_eq!(Verdict::all([&ef, &Verdict::certified_false()]).status, Status::CertifiedFalse);
        assert_eq!(Verdict::all([]).status, Status::CertifiedTrue);
    }

    #[test]
    fn downgrade_keeps_polarity() {
        assert_eq!(Verdict::certified_true().downgrade(3).status, Status::EmpiricalTrue);
        assert_eq!(Verdict::certified_false().downgrade(3).status, Status::EmpiricalFalse);
        assert_eq!(Verdict::indeterminate(None).downgrade(3).status, Status::Indeterminate);
    }
}
