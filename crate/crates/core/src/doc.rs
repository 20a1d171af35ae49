//! JSON documents for operators, derivations of `L_{E*}` and `Γ` tables.
//!
//! Printing is canonical: terms in table order, polynomials in printed
//! normal form, two-space indentation and a trailing newline.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::diffop::{DerivKey, DiffOp};
use crate::error::{Error, Result};
use crate::lbundle::LDerivation;
use crate::multivec::{Gamma, PolyVectorField, SymMultivector};
use crate::symcore::{Chart, MultiIndex, Poly, Space};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: String,
    pub dx: Vec<usize>,
    pub du: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub chart: Chart,
    pub space: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub dx: Vec<String>,
    pub dv: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LDerivationDoc {
    pub chart: Chart,
    pub field: FieldDoc,
    pub mult: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntryDoc {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    pub chart: Chart,
    pub gamma: Vec<GammaEntryDoc>,
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn print_json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents serialize");
    out.push('\n');
    out
}

fn checked_chart(chart: Chart) -> Result<Chart> {
    Chart::new(chart.base_dim, chart.fiber_rank)
}

impl DiffOp {
    pub fn to_doc(&self) -> OperatorDoc {
        OperatorDoc {
            chart: self.chart(),
            space: self.space().to_string(),
            terms: self
                .terms()
                .map(|(key, c)| TermDoc {
                    coeff: c.to_string(),
                    dx: key.base.letters().to_vec(),
                    du: key.fiber.letters().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &OperatorDoc) -> Result<DiffOp> {
        let chart = checked_chart(doc.chart)?;
        let space: Space = doc.space.parse()?;
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                let key =
                    DerivKey::new(MultiIndex::new(t.dx.clone()), MultiIndex::new(t.du.clone()));
                Ok((key, Poly::parse(&t.coeff, chart, space)?))
            })
            .collect::<Result<Vec<_>>>()?;
        DiffOp::from_terms(chart, space, terms)
    }

    pub fn to_json(&self) -> String {
        print_json(&self.to_doc())
    }

    pub fn from_json(text: &str) -> Result<DiffOp> {
        DiffOp::from_doc(&parse_json(text)?)
    }
}

impl SymMultivector {
    pub fn to_json(&self) -> String {
        self.as_diffop().to_json()
    }

    /// Reads an operator document whose terms all have the same length.
    pub fn from_json(text: &str) -> Result<SymMultivector> {
        let table = DiffOp::from_json(text)?;
        let lengths: std::collections::BTreeSet<usize> =
            table.terms().map(|(k, _)| k.len()).collect();
        match lengths.len() {
            0 => Err(Error::ZeroOperator(
                "a multivector document needs at least one term",
            )),
            1 => SymMultivector::new(table, *lengths.iter().next().expect("one length")),
            _ => Err(Error::NotHomogeneous(format!(
                "terms of lengths {lengths:?}"
            ))),
        }
    }
}

impl LDerivation {
    pub fn to_doc(&self) -> LDerivationDoc {
        let strings = |v: &[Poly]| v.iter().map(Poly::to_string).collect();
        LDerivationDoc {
            chart: self.chart(),
            field: FieldDoc {
                dx: strings(&self.field().base),
                dv: strings(&self.field().dual),
            },
            mult: self.mult().to_string(),
        }
    }

    pub fn from_doc(doc: &LDerivationDoc) -> Result<LDerivation> {
        let chart = checked_chart(doc.chart)?;
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| Poly::parse(s, chart, Space::Estar))
                .collect::<Result<Vec<_>>>()
        };
        let field = PolyVectorField::new(parse(&doc.field.dx)?, parse(&doc.field.dv)?)?;
        LDerivation::new(field, Poly::parse(&doc.mult, chart, Space::Estar)?)
    }

    pub fn to_json(&self) -> String {
        print_json(&self.to_doc())
    }

    pub fn from_json(text: &str) -> Result<LDerivation> {
        LDerivation::from_doc(&parse_json(text)?)
    }
}

impl Gamma {
    pub fn to_doc(&self) -> GammaDoc {
        GammaDoc {
            chart: self.chart(),
            gamma: self
                .entries()
                .map(|(&(k, i, j), c)| GammaEntryDoc {
                    k,
                    i,
                    j,
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    /// Entries may list only one of `Γ^k_{ij}`, `Γ^k_{ji}`; the other is filled in.
    pub fn from_doc(doc: &GammaDoc) -> Result<Gamma> {
        let chart = checked_chart(doc.chart)?;
        let mut entries = std::collections::BTreeMap::new();
        for e in &doc.gamma {
            let c = Poly::parse(&e.coeff, chart, Space::E)?;
            entries.insert((e.k, e.i, e.j), c.clone());
            entries.entry((e.k, e.j, e.i)).or_insert(c);
        }
        Gamma::new(chart, entries)
    }

    pub fn to_json(&self) -> String {
        print_json(&self.to_doc())
    }

    pub fn from_json(text: &str) -> Result<Gamma> {
        Gamma::from_doc(&parse_json(text)?)
    }
}
