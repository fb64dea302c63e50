use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Bounds, Flags, VarietySpec};
use crate::error::{Error, Result};
use crate::finalg::AlgebraJson;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GeneratorRef {
    Path(String),
    Inline(Box<AlgebraJson>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlagsJson {
    #[serde(default)]
    pub all_fp_exact: bool,
    #[serde(default)]
    pub admissibility_equals_validity: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoundsJson {
    pub n_max: usize,
    pub size_budget: usize,
}

/// `{name, generators, flags, bounds}`; generators are paths relative to the
/// file or inline algebra objects.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VarietyJson {
    pub name: String,
    pub generators: Vec<GeneratorRef>,
    #[serde(default)]
    pub flags: FlagsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
}

pub fn load_variety(path: &Path) -> Result<VarietySpec> {
    let src = std::fs::read_to_string(path)?;
    let j: VarietyJson = serde_json::from_str(&src)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut gens = Vec::new();
    let mut sig = None;
    for g in &j.generators {
        let alg = match g {
            GeneratorRef::Inline(a) => a.to_algebra(sig.clone())?,
            GeneratorRef::Path(p) => {
                let s = std::fs::read_to_string(base.join(p))?;
                let a: AlgebraJson = serde_json::from_str(&s)?;
                a.to_algebra(sig.clone())?
            }
        };
        sig.get_or_insert_with(|| alg.signature().clone());
        gens.push(Arc::new(alg));
    }
    if gens.is_empty() {
        return Err(Error::InvalidParam("variety without generators".into()));
    }
    let mut v = VarietySpec::from_generators(j.name, gens)?;
    v.flags = Flags {
        all_fp_exact: j.flags.all_fp_exact,
        admissibility_equals_validity: j.flags.admissibility_equals_validity,
    };
    if let Some(b) = j.bounds {
        if b.n_max == 0 || b.size_budget == 0 {
            return Err(Error::InvalidParam("bounds must be positive".into()));
        }
        v.bounds = Bounds {
            n_max: b.n_max,
            size_budget: b.size_budget,
        };
    }
    Ok(v)
}

pub fn variety_to_json(v: &VarietySpec) -> Result<String> {
    if v.generators().is_empty() {
        return Err(Error::InvalidParam(format!(
            "`{}` is backed by a normal-form engine and has no generator tables",
            v.name
        )));
    }
    let j = VarietyJson {
        name: v.name.clone(),
        generators: v
            .generators()
            .iter()
            .map(|g| GeneratorRef::Inline(Box::new(AlgebraJson::from_algebra(g))))
            .collect(),
        flags: FlagsJson {
            all_fp_exact: v.flags.all_fp_exact,
            admissibility_equals_validity: v.flags.admissibility_equals_validity,
        },
        bounds: Some(BoundsJson {
            n_max: v.bounds.n_max,
            size_budget: v.bounds.size_budget,
        }),
    };
    Ok(serde_json::to_string_pretty(&j)?)
}
