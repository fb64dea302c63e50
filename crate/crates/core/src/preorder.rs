//! Finite preordered sets, μ-sets and unification types.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Unification type. Computation only ever emits `Unitary`, `Finitary` or
/// `UnknownBounded`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeTag {
    Unitary,
    Finitary(usize),
    Infinitary,
    Nullary,
    UnknownBounded(usize),
}

impl TypeTag {
    /// Position in 1 < ω < ∞ < 0; `None` for bounded verdicts.
    pub fn rank(&self) -> Option<u8> {
        match self {
            TypeTag::Unitary => Some(0),
            TypeTag::Finitary(_) => Some(1),
            TypeTag::Infinitary => Some(2),
            TypeTag::Nullary => Some(3),
            TypeTag::UnknownBounded(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, TypeTag::UnknownBounded(_))
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Unitary => write!(f, "UNITARY"),
            TypeTag::Finitary(k) => write!(f, "FINITARY({k})"),
            TypeTag::Infinitary => write!(f, "INFINITARY"),
            TypeTag::Nullary => write!(f, "NULLARY"),
            TypeTag::UnknownBounded(n) => write!(f, "UNKNOWN_BOUNDED({n})"),
        }
    }
}

impl Serialize for TypeTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreorderedSet {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    truncated: Option<usize>,
}

impl PreorderedSet {
    /// Validates reflexivity and transitivity. Empty sets are rejected.
    pub fn new(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidPreorder("empty preorder".into()));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPreorder(format!("relation is not {n}x{n}")));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::InvalidPreorder(format!(
                    "not reflexive at {}",
                    labels[i]
                )));
            }
            for j in 0..n {
                if !leq[i][j] {
                    continue;
                }
                for k in 0..n {
                    if leq[j][k] && !leq[i][k] {
                        return Err(Error::InvalidPreorder(format!(
                            "not transitive: {} <= {} <= {}",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }
        Ok(PreorderedSet {
            labels,
            leq,
            truncated: None,
        })
    }

    pub fn from_fn(labels: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        let leq = (0..n).map(|i| (0..n).map(|j| le(i, j)).collect()).collect();
        Self::new(labels, leq)
    }

    /// Reflexive-transitive closure of an arbitrary relation.
    pub fn closure_of(labels: Vec<String>, mut rel: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    let via = rel[k].clone();
                    for (r, v) in rel[i].iter_mut().zip(via) {
                        *r |= v;
                    }
                }
            }
        }
        Self::new(labels, rel)
    }

    /// Marks the set as a truncation of a larger (possibly infinite) one at bound `n`.
    pub fn truncated(mut self, n: usize) -> Self {
        self.truncated = Some(n);
        self
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        self.leq[i][j] && self.leq[j][i]
    }

    /// Equivalence classes ordered by least member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.len() {
            match out.iter_mut().find(|c| self.equivalent(c[0], i)) {
                Some(c) => c.push(i),
                None => out.push(vec![i]),
            }
        }
        out
    }

    /// The partial order of classes with the collapse map.
    pub fn collapse(&self) -> (PreorderedSet, Vec<usize>) {
        let classes = self.classes();
        let mut map = vec![0; self.len()];
        for (c, members) in classes.iter().enumerate() {
            for &i in members {
                map[i] = c;
            }
        }
        let labels = classes.iter().map(|c| self.labels[c[0]].clone()).collect();
        let q = PreorderedSet::from_fn(labels, |a, b| self.le(classes[a][0], classes[b][0]))
            .expect("collapse of a preorder is a partial order");
        (q, map)
    }

    /// One representative (least index) per maximal class.
    pub fn mu_set(&self) -> Vec<usize> {
        self.classes()
            .into_iter()
            .map(|c| c[0])
            .filter(|&i| (0..self.len()).all(|j| !self.le(i, j) || self.le(j, i)))
            .collect()
    }

    pub fn classify_type(&self) -> TypeTag {
        if let Some(n) = self.truncated {
            return TypeTag::UnknownBounded(n);
        }
        match self.mu_set().len() {
            1 => TypeTag::Unitary,
            k => TypeTag::Finitary(k),
        }
    }

    pub fn is_mu_set(&self, m: &[usize]) -> bool {
        let antichain = m
            .iter()
            .enumerate()
            .all(|(a, &x)| m[a + 1..].iter().all(|&y| !self.le(x, y) && !self.le(y, x)));
        let complete = (0..self.len()).all(|x| m.iter().any(|&y| self.le(x, y)));
        antichain && complete
    }

    /// Every μ-set by subset enumeration (at most 16 points).
    pub fn all_mu_sets(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        if n > 16 {
            return Err(Error::CapExceeded(format!(
                "μ-set enumeration over {n} points"
            )));
        }
        Ok((1u32..1 << n)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|m| self.is_mu_set(m))
            .collect())
    }

    pub fn same_cardinality_property(&self) -> Result<bool> {
        let sets = self.all_mu_sets()?;
        Ok(sets.windows(2).all(|w| w[0].len() == w[1].len()))
    }

    /// Random preorder: closure of a relation with the given edge probability.
    pub fn random<R: Rng>(rng: &mut R, n: usize, p: f64) -> Result<Self> {
        let rel = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_bool(p)).collect())
            .collect();
        Self::closure_of((0..n).map(|i| format!("p{i}")).collect(), rel)
    }

    /// Copies element `i` `copies[i]` times; returns the inflated set and the
    /// map from each copy to its original.
    pub fn inflate(&self, copies: &[usize]) -> (PreorderedSet, Vec<usize>) {
        let mut origin = Vec::new();
        let mut labels = Vec::new();
        for (i, &c) in copies.iter().enumerate() {
            for k in 0..c.max(1) {
                origin.push(i);
                labels.push(format!("{}#{k}", self.labels[i]));
            }
        }
        let q = PreorderedSet::from_fn(labels, |a, b| self.le(origin[a], origin[b]))
            .expect("inflation of a preorder is a preorder");
        (q, origin)
    }

    pub fn report(&self) -> PreorderReport {
        PreorderReport {
            size: self.len(),
            classes: self
                .classes()
                .iter()
                .map(|c| c.iter().map(|&i| self.labels[i].clone()).collect())
                .collect(),
            mu_set: self
                .mu_set()
                .iter()
                .map(|&i| self.labels[i].clone())
                .collect(),
            type_tag: self.classify_type(),
        }
    }

    /// Hasse diagram of the collapsed order, smaller classes at the bottom.
    pub fn to_dot(&self, name: &str) -> String {
        let classes = self.classes();
        let (q, _) = self.collapse();
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        for (c, members) in classes.iter().enumerate() {
            let label: Vec<&str> = members.iter().map(|&i| self.labels[i].as_str()).collect();
            s += &format!(
                "  c{c} [label=\"{}\"];\n",
                label.join(", ").replace('"', "\\\"")
            );
        }
        let n = q.len();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && q.le(a, b)
                    && !(0..n).any(|m| m != a && m != b && q.le(a, m) && q.le(m, b))
                {
                    s += &format!("  c{a} -> c{b};\n");
                }
            }
        }
        s + "}\n"
    }
}

/// Whether `e: P -> Q` witnesses an equivalence of preorders: every element of
/// `Q` is equivalent to an image and `e` reflects and preserves the order.
pub fn check_equivalence(p: &PreorderedSet, q: &PreorderedSet, e: &[usize]) -> bool {
    if e.len() != p.len() || e.iter().any(|&x| x >= q.len()) {
        return false;
    }
    let dense = (0..q.len()).all(|y| e.iter().any(|&x| q.equivalent(x, y)));
    let faithful = (0..p.len()).all(|a| (0..p.len()).all(|b| p.le(a, b) == q.le(e[a], e[b])));
    dense && faithful
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PreorderReport {
    pub size: usize,
    pub classes: Vec<Vec<String>>,
    pub mu_set: Vec<String>,
    #[serde(
        rename = "type",
        serialize_with = "ser_display",
        deserialize_with = "de_string"
    )]
    pub type_tag: TypeTag,
}

fn ser_display<S: Serializer>(t: &TypeTag, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.serialize(s)
}

fn de_string<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<TypeTag, D::Error> {
    let s = String::deserialize(d)?;
    parse_type_tag(&s).ok_or_else(|| serde::de::Error::custom(format!("bad type tag `{s}`")))
}

pub fn parse_type_tag(s: &str) -> Option<TypeTag> {
    let arg = |p: &str| s.strip_prefix(p)?.strip_suffix(')')?.parse().ok();
    match s {
        "UNITARY" => Some(TypeTag::Unitary),
        "INFINITARY" => Some(TypeTag::Infinitary),
        "NULLARY" => Some(TypeTag::Nullary),
        _ => arg("FINITARY(")
            .map(TypeTag::Finitary)
            .or_else(|| arg("UNKNOWN_BOUNDED(").map(TypeTag::UnknownBounded)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    fn chain(n: usize) -> PreorderedSet {
        PreorderedSet::from_fn(labels(n), |a, b| a <= b).unwrap()
    }

    fn antichain(n: usize) -> PreorderedSet {
        PreorderedSet::from_fn(labels(n), |a, b| a == b).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(antichain(3).mu_set(), vec![0, 1, 2]);
        assert_eq!(chain(4).mu_set(), vec![3]);
        // Two equivalent maxima above a bottom.
        let p = PreorderedSet::from_fn(labels(3), |a, b| a == b || b != 0).unwrap();
        assert_eq!(p.mu_set(), vec![1]);
        assert_eq!(antichain(1).classify_type(), TypeTag::Unitary);
        assert_eq!(antichain(2).classify_type(), TypeTag::Finitary(2));
        assert_eq!(
            antichain(5).truncated(5).classify_type(),
            TypeTag::UnknownBounded(5)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PreorderedSet::new(vec![], vec![]).is_err());
        assert!(PreorderedSet::from_fn(labels(2), |a, b| a != b).is_err());
        let non_transitive = |a: usize, b: usize| a == b || (a, b) == (0, 1) || (a, b) == (1, 2);
        assert!(PreorderedSet::from_fn(labels(3), non_transitive).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let p = chain(3);
        assert!(check_equivalence(&p, &p, &[0, 1, 2]));
        assert!(!check_equivalence(&chain(2), &antichain(2), &[0, 1]));
        let q = PreorderedSet::from_fn(labels(4), |a, b| a == b || b >= 2 || (a == 0 && b == 1))
            .unwrap();
        let (c, map) = q.collapse();
        assert!(check_equivalence(&q, &c, &map));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn oracle_agrees_with_mu_set() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let p = PreorderedSet::random(&mut rng, n, 0.3).unwrap();
            let all = p.all_mu_sets().unwrap();
            assert!(all.iter().any(|m| *m == p.mu_set()));
            assert!(p.same_cardinality_property().unwrap());
        }
    }

    #[test]
    fn dot_has_covering_edges_only() {
        let dot = chain(3).to_dot("c");
        assert!(dot.contains("c0 -> c1") && dot.contains("c1 -> c2"));
        assert!(!dot.contains("c0 -> c2"));
    }

    #[test]
    fn report_json() {
        let r = antichain(2).report();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"type\":\"FINITARY(2)\""));
        let back: PreorderReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
