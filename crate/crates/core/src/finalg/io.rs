use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Elem, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::{OpDecl, Signature};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OpJson {
    pub symbol: String,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glyph: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SignatureJson {
    pub ops: Vec<OpJson>,
}

impl SignatureJson {
    pub fn from_signature(sig: &Signature) -> Self {
        SignatureJson {
            ops: sig
                .ops
                .iter()
                .map(|o| OpJson {
                    symbol: o.symbol.clone(),
                    arity: o.arity,
                    infix: o.infix.clone(),
                    glyph: o.glyph.clone(),
                })
                .collect(),
        }
    }

    pub fn to_signature(&self) -> Result<Signature> {
        Signature::new(
            self.ops
                .iter()
                .map(|o| OpDecl {
                    symbol: o.symbol.clone(),
                    arity: o.arity,
                    infix: o.infix.clone(),
                    glyph: o.glyph.clone(),
                })
                .collect(),
        )
    }
}

/// On-disk algebra format; `tables` maps each symbol to its row-major table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraJson {
    pub name: String,
    pub signature: SignatureJson,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub tables: BTreeMap<String, Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Elem>>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &FiniteAlgebra) -> Self {
        let sig = a.signature();
        AlgebraJson {
            name: a.name.clone(),
            signature: SignatureJson::from_signature(sig),
            size: a.size(),
            labels: a.labels().map(|l| l.to_vec()),
            tables: (0..sig.len())
                .map(|op| (sig.op(op).symbol.clone(), a.table(op).to_vec()))
                .collect(),
            generators: a.generators().map(|g| g.to_vec()),
        }
    }

    pub fn to_algebra(&self, sig: Option<Arc<Signature>>) -> Result<FiniteAlgebra> {
        let own = Arc::new(self.signature.to_signature()?);
        let sig = match sig {
            Some(s) if *s == *own => s,
            Some(_) => {
                return Err(Error::SignatureMismatch(format!(
                    "algebra `{}` does not match the expected signature",
                    self.name
                )))
            }
            None => own,
        };
        let mut tables = Vec::with_capacity(sig.len());
        for op in &sig.ops {
            let t = self
                .tables
                .get(&op.symbol)
                .ok_or_else(|| Error::MalformedTable {
                    symbol: op.symbol.clone(),
                    msg: "missing table".into(),
                })?;
            tables.push(t.clone());
        }
        if self.tables.len() != sig.len() {
            return Err(Error::MalformedTable {
                symbol: "?".into(),
                msg: "tables for undeclared symbols".into(),
            });
        }
        let mut a = FiniteAlgebra::new(self.name.clone(), sig, self.size, tables)?;
        if let Some(l) = &self.labels {
            a = a.with_labels(l.clone())?;
        }
        if let Some(g) = &self.generators {
            a = a.with_generators(g.clone())?;
        }
        Ok(a)
    }
}

pub fn algebra_to_json(a: &FiniteAlgebra) -> String {
    serde_json::to_string_pretty(&AlgebraJson::from_algebra(a)).expect("serializable")
}

pub fn algebra_from_json(src: &str) -> Result<FiniteAlgebra> {
    let j: AlgebraJson = serde_json::from_str(src)?;
    j.to_algebra(None)
}
