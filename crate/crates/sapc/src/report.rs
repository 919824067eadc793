//! JSON shapes of certificates and results.

use num_bigint::BigInt;
use sapc_core::localsheaf::{DegreeVerdict, OpenCertificate};
use sapc_core::sapc::SignatureReport;
use sapc_core::HomologyGroup;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A finitely generated abelian group: free rank plus invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub betti: usize,
    pub torsion: Vec<Value>,
}

/// Integers that fit in `u64` become JSON numbers, larger ones strings.
pub fn big_to_json(x: &BigInt) -> Value {
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => match i64::try_from(x) {
            Ok(v) => Value::from(v),
            Err(_) => Value::from(x.to_string()),
        },
    }
}

impl From<&HomologyGroup> for Group {
    fn from(h: &HomologyGroup) -> Self {
        Group { betti: h.betti, torsion: h.torsion.iter().map(big_to_json).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degree {
    pub j: i32,
    pub source: Group,
    pub target: Group,
    pub iso: bool,
}

impl From<&DegreeVerdict> for Degree {
    fn from(d: &DegreeVerdict) -> Self {
        Degree { j: d.j, source: (&d.source).into(), target: (&d.target).into(), iso: d.iso }
    }
}

/// Per-open duality certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub open: String,
    pub degrees: Vec<Degree>,
    pub overall: bool,
}

impl From<&OpenCertificate> for Certificate {
    fn from(c: &OpenCertificate) -> Self {
        Certificate { open: c.open.clone(), degrees: c.degrees.iter().map(Degree::from).collect(), overall: c.overall }
    }
}

/// Result for one symmetric complex or pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SapcResult {
    pub name: String,
    pub dimension: usize,
    pub nondegenerate: bool,
    pub signature: i64,
    pub certificate: Certificate,
}

/// Middle form details that accompany a signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSummary {
    pub rank: usize,
    pub applicable: bool,
    pub form: Vec<Vec<Value>>,
    /// Basis change to `[[0, 1], [1, 0]]` when the form is even unimodular of rank two.
    pub hyperbolic_basis: Option<Vec<Vec<Value>>>,
}

impl From<&SignatureReport> for FormSummary {
    fn from(r: &SignatureReport) -> Self {
        FormSummary {
            rank: r.rank,
            applicable: r.applicable,
            form: r.form.iter().map(|row| row.iter().map(big_to_json).collect()).collect(),
            hyperbolic_basis: r
                .hyperbolic
                .as_ref()
                .map(|p| p.iter().map(|row| row.iter().map(big_to_json).collect()).collect()),
        }
    }
}
