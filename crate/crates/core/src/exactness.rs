//! Exact algebras: embeddings into finitely generated free algebras,
//! exact congruences and the exact type of a finitely presented algebra.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finalg::search::{Prog, Relation, Search, SourcePlan, TableChecks};
use crate::finalg::{
    all_congruences, find_homomorphisms, minimal_elements, product, quotient, subuniverse,
    Congruence, CongruenceOptions, Elem, FiniteAlgebra, Homomorphism, SearchMode,
};
use crate::par;
use crate::preorder::{PreorderedSet, TypeTag};
use crate::term::{Identity, Substitution};
use crate::variety::{free_algebra, FinitelyPresented, FpRoute, FreeAlgebra, VarietySpec};

/// Upper bound on |F(n)|^k candidate maps for a homomorphism search from a
/// k-generated algebra.
pub const WORK_CAP: u128 = 20_000_000;

/// Largest hom-set for which closed separating families are searched.
pub const CLOSED_FAMILY_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExactnessVerdict {
    /// Injective homomorphism into F(n), listed on the algebra's elements.
    Exact {
        n: usize,
        embedding: Vec<Elem>,
    },
    /// Exact by a catalog flag; no embedding was found up to `searched_up_to`.
    ExactByCatalog {
        citation: String,
        searched_up_to: usize,
    },
    NotExactCertified {
        reason: String,
    },
    UnknownUpTo {
        n: usize,
    },
}

impl ExactnessVerdict {
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            ExactnessVerdict::Exact { .. } | ExactnessVerdict::ExactByCatalog { .. }
        )
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, ExactnessVerdict::UnknownUpTo { .. })
    }

    pub fn summary(&self) -> String {
        match self {
            ExactnessVerdict::Exact { n, .. } => format!("EXACT (embeds into F({n}))"),
            ExactnessVerdict::ExactByCatalog { searched_up_to, .. } => {
                format!("EXACT (catalog; no embedding found up to n = {searched_up_to})")
            }
            ExactnessVerdict::NotExactCertified { reason } => format!("NOT_EXACT ({reason})"),
            ExactnessVerdict::UnknownUpTo { n } => format!("UNKNOWN_UP_TO({n})"),
        }
    }
}

pub fn default_n_max(a: &FiniteAlgebra) -> usize {
    a.generators().map_or(0, |g| g.len()).max(3)
}

fn gens_of(a: &FiniteAlgebra) -> Result<Vec<Elem>> {
    a.generators()
        .map(|g| g.to_vec())
        .ok_or_else(|| Error::InvalidParam(format!("algebra `{}` has no generating set", a.name)))
}

/// Source of a homomorphism search. A bare algebra is checked against its
/// operation tables; a presentation only against its relations, which is
/// sound for targets inside the variety.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    Algebra(&'a Arc<FiniteAlgebra>),
    Presented(&'a FinitelyPresented),
}

impl<'a> From<&'a Arc<FiniteAlgebra>> for Source<'a> {
    fn from(a: &'a Arc<FiniteAlgebra>) -> Self {
        Source::Algebra(a)
    }
}

impl<'a> From<&'a FinitelyPresented> for Source<'a> {
    fn from(fp: &'a FinitelyPresented) -> Self {
        Source::Presented(fp)
    }
}

impl<'a> Source<'a> {
    pub fn algebra(&self) -> &'a Arc<FiniteAlgebra> {
        match self {
            Source::Algebra(a) => a,
            Source::Presented(fp) => &fp.algebra,
        }
    }

    fn plan(&self) -> Result<SourcePlan> {
        match self {
            Source::Algebra(a) => SourcePlan::new(a, &gens_of(a)?, Vec::new(), TableChecks::All),
            Source::Presented(fp) => {
                relation_plan(&fp.algebra, &fp.generated.gens, &fp.sigma, &fp.vars)
            }
        }
    }
}

/// Search plan over an algebra generated by the interpretations of `vars`
/// in which a map is a homomorphism iff the generator images satisfy `sigma`.
pub(crate) fn relation_plan(
    a: &FiniteAlgebra,
    gens: &[Elem],
    sigma: &[Identity],
    vars: &[String],
) -> Result<SourcePlan> {
    let idx = |v: &str| vars.iter().position(|x| x == v);
    let relations = sigma
        .iter()
        .map(|id| {
            Ok(Relation {
                lhs: Prog::compile(&id.lhs, &idx)?,
                rhs: Prog::compile(&id.rhs, &idx)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SourcePlan::new(a, gens, relations, TableChecks::UpTo(0))
}

pub(crate) fn work(size: usize, k: usize) -> u128 {
    (size as u128).saturating_pow(k as u32)
}

/// F(n), or `None` once the free algebra is over budget.
fn free_or_stop(v: &VarietySpec, n: usize) -> Result<Option<FreeAlgebra>> {
    match free_algebra(v, n) {
        Ok(f) => Ok(Some(f)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn catalog_citation(v: &VarietySpec) -> String {
    v.citations
        .get("all_fp_exact")
        .cloned()
        .unwrap_or_else(|| "catalog flag all_fp_exact".into())
}

/// Necessary conditions for `a` to embed into some F(n), using
/// F(n) <= ∏ B^(B^n) over the generating algebras B. Returns the failed
/// condition, or `None` when all pass (which proves nothing).
pub fn prefilter(v: &VarietySpec, a: &Arc<FiniteAlgebra>) -> Result<Option<String>> {
    if v.generators().is_empty() {
        return Ok(None);
    }
    let mut homs: Vec<Vec<Vec<Elem>>> = Vec::new();
    for b in v.generators() {
        let h: Vec<Vec<Elem>> = find_homomorphisms(a, b, &[], SearchMode::All)?
            .into_iter()
            .map(|h| h.map().to_vec())
            .collect();
        if h.is_empty() {
            return Ok(Some(format!(
                "no homomorphism into the generating algebra `{}`",
                b.name
            )));
        }
        homs.push(h);
    }
    let all: Vec<&Vec<Elem>> = homs.iter().flatten().collect();
    if !separates(a.size(), &all) {
        return Ok(Some(
            "homomorphisms into the generating algebras do not separate points".into(),
        ));
    }
    if v.generators().len() == 1 && homs[0].len() <= CLOSED_FAMILY_CAP {
        let b = &v.generators()[0];
        if !closed_family_exists(b, &homs[0])? {
            return Ok(Some(format!(
                "no point-separating family of homomorphisms into `{}` is closed under the permuting congruence pairs and pivot relations of `{}`",
                b.name, b.name
            )));
        }
    }
    Ok(None)
}

fn separates(size: usize, maps: &[&Vec<Elem>]) -> bool {
    (0..size).all(|x| (x + 1..size).all(|y| maps.iter().any(|m| m[x] != m[y])))
}

/// Whether some S ⊆ Hom(A, B) separates points and satisfies the closure
/// conditions met by {a -> t_a(p) : p ∈ B^n} for an embedding a -> t_a into F(n):
/// for permuting θ1, θ2 ∈ Con(B), any φ, ψ ∈ S have χ ∈ S with χ θ1 φ and
/// χ θ2 ψ pointwise; and for each c ∈ B some φ ∈ S has (φ, ψ) pointwise in
/// the subalgebra of B² generated by {c} × B, for all ψ ∈ S.
fn closed_family_exists(b: &Arc<FiniteAlgebra>, h: &[Vec<Elem>]) -> Result<bool> {
    let k = h.len();
    let cons = all_congruences(b, CongruenceOptions::default())?;
    let pairs: Vec<(&Congruence, &Congruence)> = cons
        .iter()
        .flat_map(|t1| cons.iter().map(move |t2| (t1, t2)))
        .filter(|(t1, t2)| !t1.is_total() && !t2.is_total() && t1.permutes_to_total(t2))
        .collect();
    let rel =
        |t: &Congruence, f: &[Elem], g: &[Elem]| f.iter().zip(g).all(|(&x, &y)| t.related(x, y));
    // close_ok[p][i][j] = bitmask of χ with χ θ1 h_i and χ θ2 h_j.
    let close_ok: Vec<Vec<Vec<u32>>> = pairs
        .iter()
        .map(|(t1, t2)| {
            (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            (0..k)
                                .filter(|&c| rel(t1, &h[c], &h[i]) && rel(t2, &h[c], &h[j]))
                                .fold(0u32, |m, c| m | 1 << c)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let n = b.size();
    let sq = product(&[b.as_ref(), b.as_ref()])?;
    // pivot[c][i] = bitmask of ψ with (h_i, ψ) inside R_c.
    let pivot: Vec<Vec<u32>> = (0..n as Elem)
        .map(|c| {
            let gens: Vec<Elem> = (0..n as Elem).map(|y| c * n as Elem + y).collect();
            let mut inside = vec![false; n * n];
            for e in subuniverse(&sq, &gens) {
                inside[e as usize] = true;
            }
            (0..k)
                .map(|i| {
                    (0..k)
                        .filter(|&j| {
                            h[i].iter()
                                .zip(&h[j])
                                .all(|(&x, &y)| inside[x as usize * n + y as usize])
                        })
                        .fold(0u32, |m, j| m | 1 << j)
                })
                .collect()
        })
        .collect();
    let size = h[0].len();
    Ok((1u32..1 << k).any(|s| {
        let members: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).collect();
        let maps: Vec<&Vec<Elem>> = members.iter().map(|&i| &h[i]).collect();
        separates(size, &maps)
            && close_ok.iter().all(|t| {
                members
                    .iter()
                    .all(|&i| members.iter().all(|&j| t[i][j] & s != 0))
            })
            && pivot
                .iter()
                .all(|pc| members.iter().any(|&i| pc[i] & s == s))
    }))
}

/// Least injective homomorphism `a -> target` in generator-image order.
pub fn find_embedding<'a>(
    src: impl Into<Source<'a>>,
    target: &FiniteAlgebra,
) -> Result<Option<Vec<Elem>>> {
    let plan = src.into().plan()?;
    let mut s = Search::new(&plan, target);
    s.injective = true;
    Ok(s.first())
}

/// Searches an embedding of `a` into F(1), .., F(n_max).
pub fn is_exact<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
    n_max: usize,
) -> Result<ExactnessVerdict> {
    let src = src.into();
    let a = src.algebra();
    let k = gens_of(a)?.len();
    if let Some(reason) = prefilter(v, a)? {
        return Ok(ExactnessVerdict::NotExactCertified { reason });
    }
    let mut reached = 0;
    for n in 1..=n_max {
        let Some(f) = free_or_stop(v, n)? else { break };
        if f.size() >= a.size() {
            if work(f.size(), k) > WORK_CAP {
                break;
            }
            if let Some(embedding) = find_embedding(src, f.algebra())? {
                return Ok(ExactnessVerdict::Exact { n, embedding });
            }
        }
        reached = n;
    }
    Ok(if v.flags.all_fp_exact {
        ExactnessVerdict::ExactByCatalog {
            citation: catalog_citation(v),
            searched_up_to: reached,
        }
    } else {
        ExactnessVerdict::UnknownUpTo { n: reached }
    })
}

/// Checks that `embedding` is an injective homomorphism `a -> F(n)`.
pub fn validate_embedding(
    v: &VarietySpec,
    a: &Arc<FiniteAlgebra>,
    n: usize,
    embedding: &[Elem],
) -> Result<()> {
    let f = free_algebra(v, n)?;
    let h = Homomorphism::new(a.clone(), f.algebra().clone(), embedding.to_vec())?;
    if !h.is_injective() {
        return Err(Error::NotHomomorphism(
            "embedding witness is not injective".into(),
        ));
    }
    Ok(())
}

/// A congruence that is the kernel of a homomorphism into F(n).
#[derive(Clone, Debug, Serialize)]
pub struct KernelWitness {
    pub theta: Congruence,
    pub n: usize,
    /// The homomorphism A -> F(n) on all elements of A.
    pub map: Vec<Elem>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelSearch {
    /// Distinct kernels, first by n, then in search order.
    pub kernels: Vec<KernelWitness>,
    pub searched_up_to: usize,
    /// Number of distinct kernels after each n.
    pub counts: Vec<usize>,
}

impl KernelSearch {
    pub fn get(&self, theta: &Congruence) -> Option<&KernelWitness> {
        self.kernels.iter().find(|k| k.theta == *theta)
    }

    pub fn minimal(&self) -> Vec<Congruence> {
        let all: Vec<Congruence> = self.kernels.iter().map(|k| k.theta.clone()).collect();
        let mut m = minimal_elements(&all);
        m.sort();
        m
    }
}

/// Kernels of all homomorphisms `a -> F(n)` for n = 1..n_max: exactly the
/// congruences whose quotients embed into one of these free algebras.
pub fn exact_kernels<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
    n_max: usize,
) -> Result<KernelSearch> {
    let src = src.into();
    let a = src.algebra();
    let gens = gens_of(a)?;
    let plan = src.plan()?;
    let mut out = KernelSearch {
        kernels: Vec::new(),
        searched_up_to: 0,
        counts: Vec::new(),
    };
    let mut seen: HashMap<Congruence, usize> = HashMap::new();
    for n in 1..=n_max {
        let Some(f) = free_or_stop(v, n)? else { break };
        if work(f.size(), gens.len()) > WORK_CAP {
            break;
        }
        let search = Search::new(&plan, f.algebra());
        let parts = search.fold(Vec::new, |acc: &mut Vec<(Congruence, Vec<Elem>)>, img| {
            let theta = Congruence::from_labels(img);
            if !acc.iter().any(|(t, _)| *t == theta) {
                acc.push((theta, img.to_vec()));
            }
        });
        for (theta, map) in parts.into_iter().flatten() {
            if !seen.contains_key(&theta) {
                seen.insert(theta.clone(), out.kernels.len());
                out.kernels.push(KernelWitness { theta, n, map });
            }
        }
        out.searched_up_to = n;
        out.counts.push(out.kernels.len());
    }
    Ok(out)
}

/// The quotient `a/θ` with generators, and the embedding induced by a kernel witness.
fn induced_embedding(a: &FiniteAlgebra, w: &KernelWitness) -> Result<(FiniteAlgebra, Vec<Elem>)> {
    let (q, proj) = quotient(a, &w.theta)?;
    let mut emb = vec![0; q.size()];
    for (x, &b) in proj.iter().enumerate() {
        emb[b as usize] = w.map[x];
    }
    Ok((q, emb))
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceEntry {
    pub theta: Congruence,
    pub quotient_size: usize,
    pub verdict: ExactnessVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactCongruenceSet {
    pub entries: Vec<CongruenceEntry>,
    /// Indices of entries flagged exact.
    pub exact: Vec<usize>,
    pub minimal: Vec<Congruence>,
    /// Some verdict is unknown, so `exact` may miss congruences.
    pub under_approximate: bool,
    pub searched_up_to: usize,
}

impl ExactCongruenceSet {
    /// The minimal set cannot change: every congruence of unknown status lies
    /// above a known exact one.
    pub fn minimal_certified(&self) -> bool {
        self.entries
            .iter()
            .filter(|e| e.verdict.is_unknown())
            .all(|e| self.minimal.iter().any(|m| m.leq(&e.theta)))
    }
}

pub fn con_options() -> CongruenceOptions {
    CongruenceOptions {
        max_count: 20_000,
        ..CongruenceOptions::default()
    }
}

/// Classifies every congruence of `a` as exact, certified non-exact or unknown.
pub fn exact_congruences<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
    n_max: usize,
) -> Result<ExactCongruenceSet> {
    let src = src.into();
    let a = src.algebra();
    let cons = all_congruences(a, con_options())?;
    let ks = exact_kernels(v, src, n_max)?;
    let delta = Congruence::identity(a.size());
    let delta_verdict = match ks.get(&delta) {
        Some(_) => None,
        None => Some(is_exact(v, src, n_max)?),
    };
    let entries: Vec<Result<CongruenceEntry>> = par::map(&cons, |theta| {
        let (q, _) = quotient(a, theta)?;
        let quotient_size = q.size();
        let verdict = if let Some(w) = ks.get(theta) {
            let (_, embedding) = induced_embedding(a, w)?;
            ExactnessVerdict::Exact { n: w.n, embedding }
        } else if theta.is_identity() && delta_verdict.is_some() {
            delta_verdict.clone().expect("checked")
        } else if v.flags.all_fp_exact && prefilter(v, &Arc::new(q.clone()))?.is_none() {
            ExactnessVerdict::ExactByCatalog {
                citation: catalog_citation(v),
                searched_up_to: ks.searched_up_to,
            }
        } else {
            match prefilter(v, &Arc::new(q))? {
                Some(reason) => ExactnessVerdict::NotExactCertified { reason },
                None => ExactnessVerdict::UnknownUpTo {
                    n: ks.searched_up_to,
                },
            }
        };
        Ok(CongruenceEntry {
            theta: theta.clone(),
            quotient_size,
            verdict,
        })
    });
    let entries: Vec<CongruenceEntry> = entries.into_iter().collect::<Result<_>>()?;
    let exact: Vec<usize> = (0..entries.len())
        .filter(|&i| entries[i].verdict.is_exact())
        .collect();
    let flagged: Vec<Congruence> = exact.iter().map(|&i| entries[i].theta.clone()).collect();
    let under_approximate = entries.iter().any(|e| e.verdict.is_unknown());
    Ok(ExactCongruenceSet {
        minimal: minimal_elements(&flagged),
        exact,
        entries,
        under_approximate,
        searched_up_to: ks.searched_up_to,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeRoute {
    /// Δ is exact, so min Con_e = {Δ}.
    DeltaExact,
    /// Con(A) is a chain with an exact member.
    Chain,
    /// Minimal exact congruences from the full classification of Con(A).
    Congruences,
    /// Con(A) too large: minimal kernels found up to the bound.
    KernelsOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalExact {
    pub theta: Congruence,
    pub quotient_size: usize,
    pub verdict: ExactnessVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactTypeReport {
    #[serde(rename = "type")]
    pub type_tag: TypeTag,
    pub route: TypeRoute,
    pub delta: ExactnessVerdict,
    pub minimal: Vec<MinimalExact>,
    pub con_size: Option<usize>,
    pub searched_up_to: usize,
}

impl ExactTypeReport {
    pub fn certified(&self) -> bool {
        self.type_tag.is_certified()
    }
}

/// Whether some homomorphism `a -> F(1)` exists, i.e. Σ has a unifier.
pub fn is_unifiable<'a>(v: &VarietySpec, src: impl Into<Source<'a>>) -> Result<bool> {
    let f1 = free_algebra(v, 1)?;
    let plan = src.into().plan()?;
    Ok(Search::new(&plan, f1.algebra()).first().is_some())
}

fn is_chain(cons: &[Congruence]) -> bool {
    cons.iter()
        .enumerate()
        .all(|(i, x)| cons[i + 1..].iter().all(|y| x.leq(y) || y.leq(x)))
}

/// Exact type of a finitely presented algebra from its minimal exact congruences.
pub fn exact_type_of_algebra<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
    n_max: usize,
) -> Result<ExactTypeReport> {
    let src = src.into();
    let a = src.algebra();
    if !is_unifiable(v, src)? {
        return Err(Error::NotUnifiable);
    }
    let delta = is_exact(v, src, n_max)?;
    let delta_theta = Congruence::identity(a.size());
    if delta.is_exact() {
        return Ok(ExactTypeReport {
            type_tag: TypeTag::Unitary,
            route: TypeRoute::DeltaExact,
            minimal: vec![MinimalExact {
                theta: delta_theta,
                quotient_size: a.size(),
                verdict: delta.clone(),
            }],
            delta,
            con_size: None,
            searched_up_to: n_max,
        });
    }
    let cons = match all_congruences(a, con_options()) {
        Ok(c) => Some(c),
        Err(Error::CapExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let minimal_from = |ks: &KernelSearch| -> Result<Vec<MinimalExact>> {
        ks.minimal()
            .into_iter()
            .map(|theta| {
                let w = ks.get(&theta).expect("minimal kernel has a witness");
                let (q, embedding) = induced_embedding(a, w)?;
                Ok(MinimalExact {
                    theta,
                    quotient_size: q.size(),
                    verdict: ExactnessVerdict::Exact { n: w.n, embedding },
                })
            })
            .collect()
    };
    match cons {
        Some(cons) if is_chain(&cons) => {
            let ks = exact_kernels(v, src, n_max)?;
            Ok(ExactTypeReport {
                type_tag: TypeTag::Unitary,
                route: TypeRoute::Chain,
                minimal: minimal_from(&ks)?,
                delta,
                con_size: Some(cons.len()),
                searched_up_to: ks.searched_up_to,
            })
        }
        Some(cons) => {
            let set = exact_congruences(v, src, n_max)?;
            let minimal = set
                .minimal
                .iter()
                .map(|m| {
                    let e = set.entries.iter().find(|e| e.theta == *m).expect("entry");
                    MinimalExact {
                        theta: m.clone(),
                        quotient_size: e.quotient_size,
                        verdict: e.verdict.clone(),
                    }
                })
                .collect::<Vec<_>>();
            let type_tag = if set.minimal_certified() {
                match minimal.len() {
                    1 => TypeTag::Unitary,
                    k => TypeTag::Finitary(k),
                }
            } else {
                TypeTag::UnknownBounded(set.searched_up_to)
            };
            Ok(ExactTypeReport {
                type_tag,
                route: TypeRoute::Congruences,
                minimal,
                delta,
                con_size: Some(cons.len()),
                searched_up_to: set.searched_up_to,
            })
        }
        None => {
            let ks = exact_kernels(v, src, n_max)?;
            Ok(ExactTypeReport {
                type_tag: TypeTag::UnknownBounded(ks.searched_up_to),
                route: TypeRoute::KernelsOnly,
                minimal: minimal_from(&ks)?,
                delta,
                con_size: None,
                searched_up_to: ks.searched_up_to,
            })
        }
    }
}

/// Exact congruences as coexact projections: θ1 ≤ θ2 iff θ2 ⊆ θ1.
pub fn enumerate_coexact<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
    n_max: usize,
) -> Result<PreorderedSet> {
    let set = exact_congruences(v, src, n_max)?;
    let thetas: Vec<&Congruence> = set.exact.iter().map(|&i| &set.entries[i].theta).collect();
    if thetas.is_empty() {
        return Err(Error::NotUnifiable);
    }
    let labels = thetas.iter().map(|t| t.pairs_label()).collect();
    let p = PreorderedSet::from_fn(labels, |i, j| thetas[j].leq(thetas[i]))?;
    Ok(if set.minimal_certified() {
        p
    } else {
        p.truncated(set.searched_up_to)
    })
}

/// A retraction pair: ι: A -> F(m) and ρ: F(m) -> A with ρ ∘ ι = id.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectivityWitness {
    pub m: usize,
    pub iota: Vec<Elem>,
    /// Images under ρ of the free generators.
    pub rho_generators: Vec<Elem>,
}

/// Searches a retraction of F(m) onto `a`, m = number of generators of `a`.
pub fn is_projective<'a>(
    v: &VarietySpec,
    src: impl Into<Source<'a>>,
) -> Result<Option<ProjectivityWitness>> {
    let src = src.into();
    let a = src.algebra();
    let gens = gens_of(a)?;
    let m = gens.len();
    let f = free_algebra(v, m)?;
    if work(f.size(), m) > WORK_CAP || work(a.size(), m) > WORK_CAP {
        return Err(Error::CapExceeded(format!(
            "projectivity search over F({m})"
        )));
    }
    let fplan = SourcePlan::new(
        f.algebra(),
        &(0..m).map(|i| f.generator(i)).collect::<Vec<_>>(),
        Vec::new(),
        TableChecks::All,
    )?;
    let rho_for = |iota: &[Elem]| -> Option<Vec<Elem>> {
        let mut s = Search::new(&fplan, a);
        for &g in &gens {
            s.constrain(iota[g as usize], g);
        }
        s.first()
    };
    let plan = src.plan()?;
    let mut s = Search::new(&plan, f.algebra());
    s.injective = true;
    let Some(iota) = s.first_where(|iota| rho_for(iota).is_some()) else {
        return Ok(None);
    };
    let rho = rho_for(&iota).expect("found above");
    let w = ProjectivityWitness {
        m,
        iota,
        rho_generators: (0..m).map(|i| rho[f.generator(i) as usize]).collect(),
    };
    validate_projectivity(v, a, &w)?;
    Ok(Some(w))
}

pub fn validate_projectivity(
    v: &VarietySpec,
    a: &Arc<FiniteAlgebra>,
    w: &ProjectivityWitness,
) -> Result<()> {
    let f = free_algebra(v, w.m)?;
    let iota = Homomorphism::new(a.clone(), f.algebra().clone(), w.iota.clone())?;
    let rho = f.extend(a, &w.rho_generators);
    let rho = Homomorphism::new(f.algebra().clone(), a.clone(), rho)?;
    let back = iota.then(&rho)?;
    if back.map().iter().enumerate().any(|(x, &y)| x as Elem != y) {
        return Err(Error::NotHomomorphism("ρ ∘ ι is not the identity".into()));
    }
    Ok(())
}

/// Names for F(n) that avoid `taken`.
pub fn fresh_names(n: usize, taken: &[String]) -> Vec<String> {
    for prefix in ["u", "v", "w", "y", "t"] {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|s| !taken.contains(s)) {
            return names;
        }
    }
    (1..=n).map(|i| format!("fresh_{i}")).collect()
}

/// σ: x -> α_x where α_x is a witness term of the image of x under an
/// embedding of Fp(Σ, X) into F(n). Validates that σ unifies Σ with kernel Θ_Σ.
pub fn exact_presentation_substitution(
    v: &VarietySpec,
    fp: &FinitelyPresented,
    n: usize,
    embedding: &[Elem],
) -> Result<Substitution> {
    validate_embedding(v, &fp.algebra, n, embedding)?;
    let f = free_algebra(v, n)?.with_names(fresh_names(n, &fp.vars))?;
    let sigma = Substitution::from_pairs(
        fp.vars
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), f.witness(embedding[fp.generator(i) as usize]))),
    );
    check_unifier_kernel(&f, fp, &sigma)?;
    Ok(sigma)
}

fn check_unifier_kernel(
    f: &FreeAlgebra,
    fp: &FinitelyPresented,
    sigma: &Substitution,
) -> Result<()> {
    for Identity { lhs, rhs } in &fp.sigma {
        if f.eval(&sigma.apply(lhs))? != f.eval(&sigma.apply(rhs))? {
            return Err(Error::NotHomomorphism(
                "substitution does not unify Σ".into(),
            ));
        }
    }
    if let FpRoute::Quotient { free, theta, .. } = &fp.route {
        let images: Vec<Elem> = fp
            .vars
            .iter()
            .map(|x| f.eval(&sigma.image(x)))
            .collect::<Result<_>>()?;
        let u = free.extend(f.algebra(), &images);
        if Congruence::from_labels(&u) != *theta {
            return Err(Error::NotHomomorphism("kernel differs from Θ_Σ".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::variety::finitely_present;

    fn fp(variety: &str, sigma: &str, vars: &[&str]) -> (Arc<VarietySpec>, FinitelyPresented) {
        let v = builtin(variety, None).unwrap();
        let s = v.parse_identities(sigma).unwrap();
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let a = finitely_present(&v, &s, &vars).unwrap();
        (v, a)
    }

    #[test]
    fn free_algebra_is_exact() {
        let (v, a) = fp("distributive-lattices", "", &["x", "y"]);
        let verdict = is_exact(&v, &a, 3).unwrap();
        assert!(
            matches!(verdict, ExactnessVerdict::Exact { n: 2, .. }),
            "{verdict:?}"
        );
    }

    #[test]
    fn dl_example_is_exact() {
        let (v, a) = fp(
            "distributive-lattices",
            "(x /\\ y) = (z \\/ w)",
            &["x", "y", "z", "w"],
        );
        assert_eq!(a.size(), 7);
        let verdict = is_exact(&v, &a, 4).unwrap();
        let ExactnessVerdict::Exact { n, embedding } = &verdict else {
            panic!("{verdict:?}")
        };
        validate_embedding(&v, &a.algebra, *n, embedding).unwrap();
        let sigma = exact_presentation_substitution(&v, &a, *n, embedding).unwrap();
        assert_eq!(sigma.iter().count(), 4);
        let r = exact_type_of_algebra(&v, &a, 4).unwrap();
        assert_eq!(r.type_tag, TypeTag::Unitary);
    }

    #[test]
    fn b2_prime_is_finitary_two() {
        let (v, a) = fp("pcdl-B2", "(x \\/ star(x)) = one", &["x"]);
        assert_eq!(a.size(), 4);
        let d = is_exact(&v, &a, 3).unwrap();
        assert!(
            matches!(d, ExactnessVerdict::NotExactCertified { .. }),
            "{d:?}"
        );
        let r = exact_type_of_algebra(&v, &a, 3).unwrap();
        assert_eq!(r.type_tag, TypeTag::Finitary(2));
        let p = enumerate_coexact(&v, &a, 3).unwrap();
        assert_eq!(p.classify_type(), TypeTag::Finitary(2));
    }

    #[test]
    fn projective_boolean() {
        let (v, a) = fp("boolean", "(x \\/ y) = one", &["x", "y"]);
        let w = is_projective(&v, &a).unwrap().expect("projective");
        validate_projectivity(&v, &a.algebra, &w).unwrap();
        let (v, a) = fp("boolean", "", &["x"]);
        assert!(is_projective(&v, &a).unwrap().is_some());
    }
}

#[cfg(test)]
mod willard_tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::variety::finitely_present;

    #[test]
    fn three_minimal_kernels() {
        let v = builtin("willard", None).unwrap();
        let s = v.parse_identities("(x . y) = 0").unwrap();
        let a = finitely_present(&v, &s, &["x".into(), "y".into()]).unwrap();
        let ks = exact_kernels(&v, &a, 3).unwrap();
        eprintln!("size {} counts {:?}", a.size(), ks.counts);
        assert_eq!(ks.searched_up_to, 3);
        let min = ks.minimal();
        for m in &min {
            let w = ks.get(m).unwrap();
            let f = free_algebra(&v, w.n).unwrap();
            eprintln!(
                "n={} x->{} y->{}",
                w.n,
                f.witness(w.map[a.generator(0) as usize])
                    .to_string(v.signature()),
                f.witness(w.map[a.generator(1) as usize])
                    .to_string(v.signature())
            );
        }
        assert_eq!(min.len(), 3);
    }
}
