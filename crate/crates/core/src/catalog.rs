//! Built-in varieties.

use std::sync::Arc;

use once_cell::sync::Lazy;
use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::finalg::{Elem, FiniteAlgebra};
use crate::term::{OpDecl, Signature};
use crate::variety::{Flags, VarietySpec};

pub const NAMES: &[&str] = &[
    "distributive-lattices",
    "bounded-distributive-lattices",
    "boolean",
    "stone",
    "pcdl-Bn",
    "de-morgan",
    "kleene",
    "willard",
];

/// Expected exact type of a catalog row, as a short word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedType {
    Unitary,
    Finitary,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub expected: Option<ExpectedType>,
    /// Classical unification type, documented only.
    pub classical: &'static str,
}

pub fn lattice_signature() -> Arc<Signature> {
    sig(&[])
}

pub fn bounded_signature() -> Arc<Signature> {
    sig(&[("zero", 0), ("one", 0)])
}

pub fn boolean_signature() -> Arc<Signature> {
    sig(&[("neg", 1), ("zero", 0), ("one", 0)])
}

pub fn p_algebra_signature() -> Arc<Signature> {
    sig(&[("star", 1), ("zero", 0), ("one", 0)])
}

pub fn de_morgan_signature() -> Arc<Signature> {
    boolean_signature()
}

pub fn willard_signature() -> Arc<Signature> {
    Arc::new(
        Signature::new(vec![
            OpDecl::new("mul", 2).infix("."),
            OpDecl::new("zero", 0).glyph("0"),
            OpDecl::new("one", 0).glyph("1"),
        ])
        .expect("static signature"),
    )
}

fn sig(extra: &[(&str, usize)]) -> Arc<Signature> {
    let mut ops = vec![
        OpDecl::new("meet", 2).infix("/\\"),
        OpDecl::new("join", 2).infix("\\/"),
    ];
    ops.extend(extra.iter().map(|&(s, k)| OpDecl::new(s, k)));
    Arc::new(Signature::new(ops).expect("static signature"))
}

/// Lattice-based algebra from a partial order plus extra operations given by
/// name (unary maps and constants).
fn lattice_algebra(
    name: &str,
    sig: Arc<Signature>,
    labels: &[&str],
    leq: impl Fn(Elem, Elem) -> bool,
    unary: &[(&str, Vec<Elem>)],
) -> Result<FiniteAlgebra> {
    let n = labels.len();
    let elems: Vec<Elem> = (0..n as Elem).collect();
    let meet = |a: Elem, b: Elem| -> Result<Elem> {
        let lower: Vec<Elem> = elems
            .iter()
            .copied()
            .filter(|&c| leq(c, a) && leq(c, b))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&c| lower.iter().all(|&d| leq(d, c)))
            .ok_or_else(|| Error::InvalidParam(format!("no meet of {a},{b} in {name}")))
    };
    let join = |a: Elem, b: Elem| -> Result<Elem> {
        let upper: Vec<Elem> = elems
            .iter()
            .copied()
            .filter(|&c| leq(a, c) && leq(b, c))
            .collect();
        upper
            .iter()
            .copied()
            .find(|&c| upper.iter().all(|&d| leq(c, d)))
            .ok_or_else(|| Error::InvalidParam(format!("no join of {a},{b} in {name}")))
    };
    let bottom = elems
        .iter()
        .copied()
        .find(|&c| elems.iter().all(|&d| leq(c, d)));
    let top = elems
        .iter()
        .copied()
        .find(|&c| elems.iter().all(|&d| leq(d, c)));
    let mut tables = Vec::new();
    for op in &sig.ops {
        let t: Vec<Elem> = match (op.symbol.as_str(), op.arity) {
            ("meet", 2) => {
                let mut t = Vec::with_capacity(n * n);
                for a in 0..n as Elem {
                    for b in 0..n as Elem {
                        t.push(meet(a, b)?);
                    }
                }
                t
            }
            ("join", 2) => {
                let mut t = Vec::with_capacity(n * n);
                for a in 0..n as Elem {
                    for b in 0..n as Elem {
                        t.push(join(a, b)?);
                    }
                }
                t
            }
            ("zero", 0) => vec![bottom.ok_or_else(|| Error::InvalidParam("no bottom".into()))?],
            ("one", 0) => vec![top.ok_or_else(|| Error::InvalidParam("no top".into()))?],
            (s, 1) => unary
                .iter()
                .find(|(u, _)| *u == s)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| Error::InvalidParam(format!("no table for {s}")))?,
            (s, _) => return Err(Error::InvalidParam(format!("unexpected op {s}"))),
        };
        tables.push(t);
    }
    FiniteAlgebra::new(name, sig, n, tables)?
        .with_labels(labels.iter().map(|s| s.to_string()).collect())
}

pub fn two_element_lattice() -> FiniteAlgebra {
    lattice_algebra("2", lattice_signature(), &["0", "1"], |a, b| a <= b, &[]).expect("static")
}

pub fn two_element_bounded_lattice() -> FiniteAlgebra {
    lattice_algebra("2", bounded_signature(), &["0", "1"], |a, b| a <= b, &[]).expect("static")
}

pub fn two_element_boolean() -> FiniteAlgebra {
    lattice_algebra(
        "2",
        boolean_signature(),
        &["0", "1"],
        |a, b| a <= b,
        &[("neg", vec![1, 0])],
    )
    .expect("static")
}

/// 0 < e < 1 with 0* = 1 and e* = 1* = 0.
pub fn stone_chain() -> FiniteAlgebra {
    lattice_algebra(
        "S3",
        p_algebra_signature(),
        &["0", "e", "1"],
        |a, b| a <= b,
        &[("star", vec![2, 0, 0])],
    )
    .expect("static")
}

/// The Boolean algebra with n atoms plus a new top; bitmask elements first,
/// the new top last. The pseudocomplement is the largest b with a ∧ b = 0.
pub fn pcdl_b(n: usize) -> Result<FiniteAlgebra> {
    if n > 6 {
        return Err(Error::InvalidParam(format!("B_{n}' is too large (n <= 6)")));
    }
    let boolean = 1usize << n;
    let top = boolean as Elem;
    let size = boolean + 1;
    let leq = move |a: Elem, b: Elem| b == top || (a != top && a & b == a);
    let meet = |a: Elem, b: Elem| -> Elem {
        if a == top {
            b
        } else if b == top {
            a
        } else {
            a & b
        }
    };
    let star: Vec<Elem> = (0..size as Elem)
        .map(|a| {
            let cands: Vec<Elem> = (0..size as Elem).filter(|&b| meet(a, b) == 0).collect();
            *cands
                .iter()
                .find(|&&c| cands.iter().all(|&d| leq(d, c)))
                .expect("pseudocomplement exists")
        })
        .collect();
    let mut labels: Vec<String> = (0..boolean)
        .map(|m| {
            if m == 0 {
                "0".to_string()
            } else if m == boolean - 1 {
                "e".to_string()
            } else {
                let atoms: Vec<String> = (0..n)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| format!("a{}", i + 1))
                    .collect();
                atoms.join("+")
            }
        })
        .collect();
    if n == 0 {
        labels[0] = "0".into();
    }
    labels.push("1".into());
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    lattice_algebra(
        &format!("B{n}'"),
        p_algebra_signature(),
        &label_refs,
        leq,
        &[("star", star)],
    )
}

/// 0 < a, b < 1 with a and b fixed by negation.
pub fn de_morgan_four() -> FiniteAlgebra {
    // Elements 0, a, b, 1 with a, b incomparable.
    let leq = |x: Elem, y: Elem| x == y || x == 0 || y == 3;
    lattice_algebra(
        "M4",
        de_morgan_signature(),
        &["0", "a", "b", "1"],
        leq,
        &[("neg", vec![3, 1, 2, 0])],
    )
    .expect("static")
}

/// 0 < m < 1 with negation fixing m.
pub fn kleene_three() -> FiniteAlgebra {
    lattice_algebra(
        "K3",
        de_morgan_signature(),
        &["0", "m", "1"],
        |a, b| a <= b,
        &[("neg", vec![2, 1, 0])],
    )
    .expect("static")
}

fn flags(all_fp_exact: bool, adm_val: bool) -> Flags {
    Flags {
        all_fp_exact,
        admissibility_equals_validity: adm_val,
    }
}

static REGISTRY: Lazy<Mutex<BTreeMap<String, Arc<VarietySpec>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// Canonical name for a request: `pcdl-B2` and (`pcdl-Bn`, 2) both map to `pcdl-B2`.
fn resolve(name: &str, param: Option<usize>) -> Result<(String, Option<usize>)> {
    if let Some(rest) = name.strip_prefix("pcdl-B") {
        let n = if rest == "n" {
            param.ok_or_else(|| Error::InvalidParam("pcdl-Bn needs a parameter n".into()))?
        } else {
            rest.parse::<usize>()
                .map_err(|_| Error::InvalidParam(format!("bad pcdl parameter `{rest}`")))?
        };
        if n > 6 {
            return Err(Error::InvalidParam(format!(
                "pcdl-B{n}: n must be at most 6"
            )));
        }
        return Ok((format!("pcdl-B{n}"), Some(n)));
    }
    if NAMES.contains(&name) {
        Ok((name.to_string(), None))
    } else {
        Err(Error::UnknownVariety(name.to_string()))
    }
}

/// A shared catalog variety; repeated calls return the same instance, so
/// free algebras are memoized across callers.
pub fn builtin(name: &str, param: Option<usize>) -> Result<Arc<VarietySpec>> {
    let (key, n) = resolve(name, param)?;
    let mut reg = REGISTRY.lock().expect("registry lock");
    if let Some(v) = reg.get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(build(&key, n)?);
    reg.insert(key, v.clone());
    Ok(v)
}

/// A fresh, unshared instance (own memo table).
pub fn builtin_fresh(name: &str, param: Option<usize>) -> Result<VarietySpec> {
    let (key, n) = resolve(name, param)?;
    build(&key, n)
}

fn build(key: &str, n: Option<usize>) -> Result<VarietySpec> {
    let one = |a: FiniteAlgebra| vec![Arc::new(a)];
    let v = match key {
        "distributive-lattices" => VarietySpec::from_generators(key, one(two_element_lattice()))?
            .with_flags(
                flags(true, true),
                &[
                    ("all_fp_exact", "finitely presented distributive lattices embed into finitely generated free ones (Priestley duality)"),
                    ("admissibility_equals_validity", "free distributive lattices generate the variety as a quasivariety and satisfy the same clauses"),
                ],
            ),
        "bounded-distributive-lattices" => {
            VarietySpec::from_generators(key, one(two_element_bounded_lattice()))?
        }
        "boolean" => VarietySpec::from_generators(key, one(two_element_boolean()))?,
        "stone" => VarietySpec::from_generators(key, one(stone_chain()))?.with_flags(
            flags(true, false),
            &[("all_fp_exact", "finitely presented Stone algebras embed into free Stone algebras (duality for Stone algebras)")],
        ),
        "de-morgan" => VarietySpec::from_generators(key, one(de_morgan_four()))?,
        "kleene" => VarietySpec::from_generators(key, one(kleene_three()))?,
        "willard" => VarietySpec::from_engine(key, willard_signature(), Arc::new(crate::willard::WillardEngine)),
        k if k.starts_with("pcdl-B") => {
            let n = n.expect("resolved");
            let v = VarietySpec::from_generators(k, one(pcdl_b(n)?))?;
            if n <= 1 {
                // B_0' is the two-element Boolean algebra, B_1' the Stone chain.
                v.with_flags(
                    flags(true, false),
                    &[("all_fp_exact", "B_0 and B_1 are the Boolean and Stone varieties")],
                )
            } else {
                v
            }
        }
        other => return Err(Error::UnknownVariety(other.to_string())),
    };
    // Every catalog variety with generators is lattice-based, hence
    // congruence distributive; the ISP check is exercised in tests.
    let isp = !v.generators().is_empty();
    Ok(v.with_isp(isp))
}

pub fn entries() -> Vec<CatalogEntry> {
    let e = |name: &str, description: &str, expected, classical| CatalogEntry {
        name: name.to_string(),
        description: description.to_string(),
        expected,
        classical,
    };
    vec![
        e(
            "distributive-lattices",
            "generated by the 2-element lattice",
            Some(ExpectedType::Unitary),
            "nullary",
        ),
        e(
            "bounded-distributive-lattices",
            "generated by the 2-element bounded lattice",
            Some(ExpectedType::Finitary),
            "nullary",
        ),
        e(
            "boolean",
            "generated by the 2-element Boolean algebra",
            Some(ExpectedType::Unitary),
            "unitary",
        ),
        e(
            "stone",
            "generated by the 3-element Stone chain",
            Some(ExpectedType::Unitary),
            "nullary",
        ),
        e(
            "pcdl-Bn",
            "B_n' = Boolean algebra with n atoms plus a new top (param n)",
            Some(ExpectedType::Finitary),
            "nullary (n >= 2)",
        ),
        e(
            "de-morgan",
            "generated by the 4-element De Morgan algebra",
            Some(ExpectedType::Finitary),
            "nullary",
        ),
        e(
            "kleene",
            "generated by the 3-element Kleene chain",
            Some(ExpectedType::Finitary),
            "nullary",
        ),
        e(
            "willard",
            "groupoids with 0 and 1 (normal-form engine)",
            Some(ExpectedType::Finitary),
            "infinitary",
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalg::{find_homomorphisms, SearchMode};

    #[test]
    fn pcdl_sizes_and_adjunction() {
        for n in 0..=4 {
            let b = pcdl_b(n).unwrap();
            assert_eq!(b.size(), (1 << n) + 1);
            let sig = b.signature().clone();
            let (meet, star) = (sig.lookup("meet").unwrap(), sig.lookup("star").unwrap());
            let zero = b.apply(sig.lookup("zero").unwrap(), &[]);
            for a in 0..b.size() as Elem {
                for c in 0..b.size() as Elem {
                    let sc = b.apply(star, &[c]);
                    assert_eq!(b.apply2(meet, a, sc) == a, b.apply2(meet, a, c) == zero);
                }
            }
        }
    }

    #[test]
    fn stone_is_b1() {
        let s = Arc::new(stone_chain());
        let b1 = Arc::new(pcdl_b(1).unwrap());
        let isos = find_homomorphisms(&s, &b1, &[], SearchMode::Injective).unwrap();
        assert!(isos.iter().any(|h| h.is_surjective()));
    }

    #[test]
    fn involutions() {
        for a in [de_morgan_four(), kleene_three(), two_element_boolean()] {
            let s = a.signature().clone();
            let neg = crate::term::parse_term(&s, "neg(neg(x))").unwrap();
            assert!(a.satisfies(&neg, &crate::term::Term::var("x")));
            let l = crate::term::parse_term(&s, "neg((x /\\ y))").unwrap();
            let r = crate::term::parse_term(&s, "(neg(x) \\/ neg(y))").unwrap();
            assert!(a.satisfies(&l, &r));
        }
        let k = kleene_three();
        let s = k.signature().clone();
        let l = crate::term::parse_term(&s, "(x /\\ neg(x))").unwrap();
        let r = crate::term::parse_term(&s, "((x /\\ neg(x)) /\\ (y \\/ neg(y)))").unwrap();
        assert!(k.satisfies(&l, &r));
    }

    #[test]
    fn registry_and_params() {
        let a = builtin("pcdl-Bn", Some(2)).unwrap();
        let b = builtin("pcdl-B2", None).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.generators()[0].size(), 5);
        assert!(builtin("pcdl-Bn", None).is_err());
        assert!(builtin("nope", None).is_err());
        let dl = builtin("distributive-lattices", None).unwrap();
        assert!(dl.flags.all_fp_exact && dl.flags.admissibility_equals_validity);
    }
}
