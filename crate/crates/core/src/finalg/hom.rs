use std::sync::Arc;

use super::search::{Search, SourcePlan, TableChecks};
use super::{for_each_tuple, Congruence, Elem, FiniteAlgebra};
use crate::error::{Error, Result};

/// A validated homomorphism between two finite algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    map: Vec<Elem>,
}

impl Homomorphism {
    pub fn new(
        source: Arc<FiniteAlgebra>,
        target: Arc<FiniteAlgebra>,
        map: Vec<Elem>,
    ) -> Result<Self> {
        if source.signature() != target.signature() {
            return Err(Error::SignatureMismatch(format!(
                "`{}` vs `{}`",
                source.name, target.name
            )));
        }
        if map.len() != source.size() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries for {} elements",
                map.len(),
                source.size()
            )));
        }
        for &v in &map {
            target.check(v)?;
        }
        if let Some(msg) = first_violation(&source, &target, &map) {
            return Err(Error::NotHomomorphism(msg));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub(crate) fn new_unchecked(
        source: Arc<FiniteAlgebra>,
        target: Arc<FiniteAlgebra>,
        map: Vec<Elem>,
    ) -> Self {
        debug_assert!(first_violation(&source, &target, &map).is_none());
        Homomorphism {
            source,
            target,
            map,
        }
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.map[e as usize]
    }

    pub fn kernel(&self) -> Congruence {
        Congruence::from_labels(&self.map)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.map
            .iter()
            .all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.size()];
        self.map.iter().for_each(|&v| seen[v as usize] = true);
        seen.into_iter().all(|s| s)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if *other.source != *self.target {
            return Err(Error::SignatureMismatch(
                "composition across different algebras".into(),
            ));
        }
        Ok(Homomorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&v| other.map[v as usize]).collect(),
        })
    }

    /// Re-checks the homomorphism property from scratch.
    pub fn validate(&self) -> Result<()> {
        match first_violation(&self.source, &self.target, &self.map) {
            None => Ok(()),
            Some(m) => Err(Error::NotHomomorphism(m)),
        }
    }
}

pub(crate) fn first_violation(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    map: &[Elem],
) -> Option<String> {
    let sig = a.signature();
    for op in 0..sig.len() {
        let k = sig.arity(op);
        let mut args = vec![0; k];
        let mut bad = None;
        for_each_tuple(a.size(), &mut args, &mut |t| {
            if bad.is_some() {
                return;
            }
            let img: Vec<Elem> = t.iter().map(|&x| map[x as usize]).collect();
            if map[a.apply(op, t) as usize] != b.apply(op, &img) {
                bad = Some(format!("`{}` at {:?}", sig.op(op).symbol, t));
            }
        });
        if bad.is_some() {
            return bad;
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    All,
    /// The first homomorphism in search order (generator images lexicographic).
    First,
    Injective,
    Surjective,
}

/// Homomorphisms A -> B, sorted lexicographically by their maps. When A carries
/// generators the search branches on their images only; `constraints` pin
/// images of individual elements.
pub fn find_homomorphisms(
    a: &Arc<FiniteAlgebra>,
    b: &Arc<FiniteAlgebra>,
    constraints: &[(Elem, Elem)],
    mode: SearchMode,
) -> Result<Vec<Homomorphism>> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch(format!(
            "`{}` vs `{}`",
            a.name, b.name
        )));
    }
    let gens: Vec<Elem> = match a.generators() {
        Some(g) => g.to_vec(),
        None => (0..a.size() as Elem).collect(),
    };
    let plan = SourcePlan::new(a, &gens, Vec::new(), TableChecks::All)?;
    let mut s = Search::new(&plan, b);
    for &(x, y) in constraints {
        a.check(x)?;
        b.check(y)?;
        s.constrain(x, y);
    }
    s.injective = mode == SearchMode::Injective;
    s.surjective = mode == SearchMode::Surjective;
    let mut maps = if mode == SearchMode::First {
        s.first().into_iter().collect()
    } else {
        s.all()
    };
    maps.sort();
    Ok(maps
        .into_iter()
        .map(|m| Homomorphism::new_unchecked(a.clone(), b.clone(), m))
        .collect())
}
