//! Varieties generated by finite algebras (or by a normal-form engine), their
//! free algebras and finitely presented algebras.

mod io;

pub use io::{load_variety, variety_to_json, BoundsJson, FlagsJson, VarietyJson};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finalg::{
    all_congruences, close, closure_tables, congruence_generated, quotient, AlgebraJson,
    Congruence, CongruenceOptions, Elem, FiniteAlgebra, Generated, Recipe,
};
use crate::term::{Clause, Identity, OpId, Signature, Substitution, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Every unifiable finitely presented algebra is exact.
    pub all_fp_exact: bool,
    /// A clause is admissible iff it is valid.
    pub admissibility_equals_validity: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub n_max: usize,
    pub size_budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            n_max: 3,
            size_budget: 5000,
        }
    }
}

/// Builds free algebras for varieties without a finite generating algebra.
pub trait NormalFormEngine: Send + Sync + fmt::Debug {
    /// F(n) with generators `0..n` and discovery-ordered recipes.
    fn free_algebra(
        &self,
        sig: &Arc<Signature>,
        n: usize,
        budget: usize,
    ) -> Result<(FiniteAlgebra, Generated)>;
}

pub struct VarietySpec {
    pub name: String,
    signature: Arc<Signature>,
    generators: Vec<Arc<FiniteAlgebra>>,
    engine: Option<Arc<dyn NormalFormEngine>>,
    pub flags: Flags,
    /// Flag name -> literature note backing it.
    pub citations: BTreeMap<String, String>,
    pub bounds: Bounds,
    /// V = ISP(generators), so finitely presented algebras can be built from solution sets.
    pub isp_closed: bool,
    memo: Mutex<HashMap<usize, Arc<FreeCore>>>,
    cache_dir: RwLock<Option<PathBuf>>,
}

impl fmt::Debug for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VarietySpec")
            .field("name", &self.name)
            .field("generators", &self.generators.len())
            .field("flags", &self.flags)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl VarietySpec {
    pub fn from_generators(
        name: impl Into<String>,
        generators: Vec<Arc<FiniteAlgebra>>,
    ) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidParam("a variety needs at least one generator".into()))?;
        let signature = first.signature().clone();
        for g in &generators {
            if **g.signature() != *signature {
                return Err(Error::SignatureMismatch(format!("generator `{}`", g.name)));
            }
            if g.size() > 255 {
                return Err(Error::InvalidParam(
                    "generators must have at most 255 elements".into(),
                ));
            }
        }
        Ok(Self::raw(name.into(), signature, generators, None))
    }

    pub fn from_engine(
        name: impl Into<String>,
        signature: Arc<Signature>,
        engine: Arc<dyn NormalFormEngine>,
    ) -> Self {
        Self::raw(name.into(), signature, Vec::new(), Some(engine))
    }

    fn raw(
        name: String,
        signature: Arc<Signature>,
        generators: Vec<Arc<FiniteAlgebra>>,
        engine: Option<Arc<dyn NormalFormEngine>>,
    ) -> Self {
        VarietySpec {
            name,
            signature,
            generators,
            engine,
            flags: Flags::default(),
            citations: BTreeMap::new(),
            bounds: Bounds::default(),
            isp_closed: false,
            memo: Mutex::new(HashMap::new()),
            cache_dir: RwLock::new(None),
        }
    }

    pub fn with_flags(mut self, flags: Flags, citations: &[(&str, &str)]) -> Self {
        self.flags = flags;
        self.citations = citations
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        self
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_isp(mut self, isp: bool) -> Self {
        self.isp_closed = isp;
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn generators(&self) -> &[Arc<FiniteAlgebra>] {
        &self.generators
    }

    pub fn has_engine(&self) -> bool {
        self.engine.is_some()
    }

    pub fn set_cache_dir(&self, dir: Option<PathBuf>) {
        *self.cache_dir.write().expect("cache lock") = dir;
    }

    pub fn cache_dir(&self) -> Option<PathBuf> {
        self.cache_dir.read().expect("cache lock").clone()
    }

    /// Index of the least free algebra containing all constants: F(0) when the
    /// signature has constants, F(1) otherwise.
    pub fn ground_rank(&self) -> usize {
        if self.signature.has_constants() {
            0
        } else {
            1
        }
    }

    pub fn parse_identities(&self, src: &str) -> Result<Vec<Identity>> {
        crate::term::parse_identities(&self.signature, src)
    }

    pub fn parse_clause(&self, src: &str) -> Result<Clause> {
        crate::term::parse_clause(&self.signature, src)
    }

    pub fn parse_term(&self, src: &str) -> Result<Term> {
        crate::term::parse_term(&self.signature, src)
    }

    /// Upper bound on |F(n)| from the generators: the product of |B|^(|B|^n).
    pub fn size_estimate(&self, n: usize) -> Option<u128> {
        if self.generators.is_empty() {
            return None;
        }
        let mut total: u128 = 1;
        for g in &self.generators {
            let pts = (g.size() as u128).checked_pow(n as u32)?;
            let f = (g.size() as u128).checked_pow(u32::try_from(pts).ok()?)?;
            total = total.checked_mul(f)?;
        }
        Some(total)
    }
}

/// Shared, immutable part of a free algebra.
#[derive(Debug)]
pub struct FreeCore {
    pub algebra: Arc<FiniteAlgebra>,
    pub generated: Generated,
}

/// F_V(n): generators are elements `0..n`; every element has a witness term.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    core: Arc<FreeCore>,
    names: Vec<String>,
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl FreeAlgebra {
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.core.algebra
    }

    pub fn size(&self) -> usize {
        self.core.algebra.size()
    }

    pub fn generated(&self) -> &Generated {
        &self.core.generated
    }

    pub fn generator(&self, i: usize) -> Elem {
        self.core.generated.gens[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_names(&self, names: Vec<String>) -> Result<FreeAlgebra> {
        if names.len() != self.rank() {
            return Err(Error::InvalidParam(format!(
                "{} names for rank {}",
                names.len(),
                self.rank()
            )));
        }
        Ok(FreeAlgebra {
            core: self.core.clone(),
            names,
        })
    }

    pub fn same_core(&self, other: &FreeAlgebra) -> bool {
        Arc::ptr_eq(&self.core, &other.core)
    }

    pub fn witness(&self, e: Elem) -> Term {
        self.core.generated.term(e, &self.names)
    }

    pub fn var_index(&self, v: &str) -> Option<usize> {
        self.names.iter().position(|n| n == v)
    }

    pub fn eval(&self, t: &Term) -> Result<Elem> {
        eval_term(self, t)
    }

    /// Image of every element under the homomorphism sending generator `i` to `images[i]`.
    pub fn extend(&self, target: &FiniteAlgebra, images: &[Elem]) -> Vec<Elem> {
        self.core.generated.map_into(target, images)
    }
}

/// Evaluates a term whose variables are generator names of `f`.
pub fn eval_term(f: &FreeAlgebra, t: &Term) -> Result<Elem> {
    f.algebra()
        .eval(t, &|v| f.var_index(v).map(|i| f.generator(i)))
}

/// F_V(n), memoized per variety and optionally cached on disk as
/// `<cache>/<variety>/<n>.alg.json`.
pub fn free_algebra(v: &VarietySpec, n: usize) -> Result<FreeAlgebra> {
    free_algebra_with_budget(v, n, v.bounds.size_budget)
}

pub fn free_algebra_with_budget(v: &VarietySpec, n: usize, budget: usize) -> Result<FreeAlgebra> {
    let core = {
        let mut memo = v.memo.lock().expect("memo lock");
        match memo.get(&n) {
            Some(c) => c.clone(),
            None => {
                let c = Arc::new(load_or_build(v, n, budget)?);
                memo.insert(n, c.clone());
                c
            }
        }
    };
    if core.algebra.size() > budget {
        return Err(Error::BudgetExceeded {
            what: format!("|F({n})|"),
            reached: core.algebra.size(),
            budget,
        });
    }
    Ok(FreeAlgebra {
        core,
        names: default_names(n),
    })
}

fn cache_path(dir: &Path, v: &VarietySpec, n: usize) -> PathBuf {
    dir.join(&v.name).join(format!("{n}.alg.json"))
}

#[derive(Serialize, Deserialize)]
struct CachedFree {
    algebra: AlgebraJson,
    /// `[-1 - i]` for generator i, `[op, args...]` otherwise.
    recipes: Vec<Vec<i64>>,
}

fn load_or_build(v: &VarietySpec, n: usize, budget: usize) -> Result<FreeCore> {
    let dir = v.cache_dir();
    if let Some(d) = &dir {
        let p = cache_path(d, v, n);
        if p.exists() {
            let src = std::fs::read_to_string(&p)?;
            let c: CachedFree = serde_json::from_str(&src)?;
            let alg = c.algebra.to_algebra(Some(v.signature.clone()))?;
            let recipes = c
                .recipes
                .iter()
                .map(|r| match r.first() {
                    Some(&x) if x < 0 => Recipe::Gen((-1 - x) as usize),
                    Some(&op) => {
                        Recipe::Op(op as OpId, r[1..].iter().map(|&a| a as Elem).collect())
                    }
                    None => Recipe::Gen(0),
                })
                .collect();
            let gens = alg.generators().map(|g| g.to_vec()).unwrap_or_default();
            return Ok(FreeCore {
                algebra: Arc::new(alg),
                generated: Generated::from_closure(gens, recipes),
            });
        }
    }
    let core = build_free(v, n, budget)?;
    if let Some(d) = &dir {
        let p = cache_path(d, v, n);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let c = CachedFree {
            algebra: AlgebraJson::from_algebra(&core.algebra),
            recipes: core
                .generated
                .recipes
                .iter()
                .map(|r| match r {
                    Recipe::Gen(i) => vec![-1 - *i as i64],
                    Recipe::Op(op, args) => std::iter::once(*op as i64)
                        .chain(args.iter().map(|&a| a as i64))
                        .collect(),
                })
                .collect(),
        };
        std::fs::write(&p, serde_json::to_string(&c)?)?;
    }
    Ok(core)
}

fn build_free(v: &VarietySpec, n: usize, budget: usize) -> Result<FreeCore> {
    if let Some(engine) = &v.engine {
        let (alg, generated) = engine.free_algebra(&v.signature, n, budget)?;
        return Ok(FreeCore {
            algebra: Arc::new(alg),
            generated,
        });
    }
    let points: Vec<Vec<Vec<Elem>>> = v
        .generators
        .iter()
        .map(|b| all_points(b.size(), n))
        .collect();
    let (alg, generated) = subpower_closure(
        &v.signature,
        &v.generators,
        &points,
        n,
        budget,
        &format!("F_{}({n})", v.name),
    )?;
    let names = default_names(n);
    let labels = (0..alg.size() as Elem)
        .map(|e| generated.term(e, &names).to_string(&v.signature))
        .collect();
    Ok(FreeCore {
        algebra: Arc::new(alg.with_labels(labels)?),
        generated,
    })
}

fn all_points(b: usize, n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut buf = vec![0; n];
    crate::finalg::for_each_tuple(b, &mut buf, &mut |t| out.push(t.to_vec()));
    out
}

const MAX_COORDS: usize = 1 << 16;
const MAX_TABLE: usize = 1 << 26;

/// The subalgebra of ∏_B B^{points_B} generated by the n coordinate projections.
fn subpower_closure(
    sig: &Arc<Signature>,
    gens: &[Arc<FiniteAlgebra>],
    points: &[Vec<Vec<Elem>>],
    n: usize,
    budget: usize,
    name: &str,
) -> Result<(FiniteAlgebra, Generated)> {
    let width: usize = points.iter().map(Vec::len).sum();
    if width > MAX_COORDS {
        return Err(Error::BudgetExceeded {
            what: "coordinates per element".into(),
            reached: width,
            budget: MAX_COORDS,
        });
    }
    let owner: Vec<usize> = points
        .iter()
        .enumerate()
        .flat_map(|(b, p)| std::iter::repeat_n(b, p.len()))
        .collect();
    let proj: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            points
                .iter()
                .flat_map(|ps| ps.iter().map(move |p| p[i] as u8))
                .collect()
        })
        .collect();
    let apply = |op: OpId, args: &[&Vec<u8>]| -> Vec<u8> {
        let mut buf = [0 as Elem; 8];
        (0..width)
            .map(|c| {
                for (k, a) in args.iter().enumerate() {
                    buf[k] = a[c] as Elem;
                }
                gens[owner[c]].apply(op, &buf[..args.len()]) as u8
            })
            .collect()
    };
    if sig.max_arity() > 8 {
        return Err(Error::InvalidParam("arity above 8".into()));
    }
    let c = close(sig, proj, apply, budget)?;
    let size = c.elems.len();
    let max_entries = size.saturating_pow(sig.max_arity() as u32);
    if max_entries > MAX_TABLE {
        return Err(Error::BudgetExceeded {
            what: "table entries".into(),
            reached: max_entries,
            budget: MAX_TABLE,
        });
    }
    let tables = closure_tables(sig, &c, apply)?;
    let alg = FiniteAlgebra::new(name, sig.clone(), size, tables)?
        .with_generators(c.gen_elems.clone())?;
    Ok((alg, Generated::from_closure(c.gen_elems, c.recipes)))
}

/// Fp_V(Σ, X).
#[derive(Clone, Debug)]
pub struct FinitelyPresented {
    pub sigma: Vec<Identity>,
    pub vars: Vec<String>,
    /// Generators are the images of `vars`, in order.
    pub algebra: Arc<FiniteAlgebra>,
    pub generated: Generated,
    pub route: FpRoute,
}

#[derive(Clone, Debug)]
pub enum FpRoute {
    /// F(X) / Θ_Σ with the projection map.
    Quotient {
        free: FreeAlgebra,
        theta: Congruence,
        projection: Vec<Elem>,
    },
    /// Subalgebra of ∏_B B^{Sol_B(Σ)} generated by the projections; sound when V = ISP(generators).
    Solutions { points: usize },
}

impl FinitelyPresented {
    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn generator(&self, i: usize) -> Elem {
        self.generated.gens[i]
    }

    pub fn witness(&self, e: Elem) -> Term {
        self.generated.term(e, &self.vars)
    }

    pub fn eval(&self, t: &Term) -> Result<Elem> {
        let gens = &self.generated.gens;
        self.algebra.eval(t, &|v| {
            self.vars.iter().position(|w| w == v).map(|i| gens[i])
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.algebra.signature()
    }
}

fn check_vars(sigma: &[Identity], vars: &[String]) -> Result<()> {
    for id in sigma {
        for v in id.lhs.vars().into_iter().chain(id.rhs.vars()) {
            if !vars.contains(&v) {
                return Err(Error::UnknownVariable(v));
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(Error::InvalidParam(format!("variable `{v}` listed twice")));
        }
    }
    Ok(())
}

/// Θ_Σ on a free algebra whose names cover Var(Σ).
pub fn sigma_congruence(free: &FreeAlgebra, sigma: &[Identity]) -> Result<Congruence> {
    let pairs = sigma_pairs(free, sigma)?;
    Ok(congruence_generated(free.algebra(), &pairs))
}

pub fn sigma_pairs(free: &FreeAlgebra, sigma: &[Identity]) -> Result<Vec<(Elem, Elem)>> {
    sigma
        .iter()
        .map(|id| Ok((free.eval(&id.lhs)?, free.eval(&id.rhs)?)))
        .collect()
}

/// Fp_V(Σ, X) as F(X)/Θ_Σ. When F(X) exceeds the size budget and V = ISP of
/// its generators, falls back to the solution-set construction.
pub fn finitely_present(
    v: &VarietySpec,
    sigma: &[Identity],
    vars: &[String],
) -> Result<FinitelyPresented> {
    check_vars(sigma, vars)?;
    match free_algebra(v, vars.len()) {
        Ok(f) => finitely_present_quotient(&f.with_names(vars.to_vec())?, sigma),
        Err(Error::BudgetExceeded { .. }) if v.isp_closed && !v.generators.is_empty() => {
            finitely_present_solutions(v, sigma, vars)
        }
        Err(e) => Err(e),
    }
}

pub fn finitely_present_quotient(
    free: &FreeAlgebra,
    sigma: &[Identity],
) -> Result<FinitelyPresented> {
    let vars = free.names().to_vec();
    check_vars(sigma, &vars)?;
    let theta = sigma_congruence(free, sigma)?;
    let (q, projection) = quotient(free.algebra(), &theta)?;
    let gens: Vec<Elem> = (0..vars.len())
        .map(|i| projection[free.generator(i) as usize])
        .collect();
    let labels = (0..q.size() as Elem).map(|e| e.to_string()).collect();
    let q = q.with_generators(gens.clone())?.with_labels(labels)?;
    let generated = Generated::new(&q, &gens)?;
    let q = {
        let names = vars.clone();
        let sig = q.signature().clone();
        let labels = (0..q.size() as Elem)
            .map(|e| generated.term(e, &names).to_string(&sig))
            .collect();
        q.with_labels(labels)?
    };
    Ok(FinitelyPresented {
        sigma: sigma.to_vec(),
        vars,
        algebra: Arc::new(q),
        generated,
        route: FpRoute::Quotient {
            free: free.clone(),
            theta,
            projection,
        },
    })
}

/// Solutions of Σ in each generator, then the generated subpower.
pub fn finitely_present_solutions(
    v: &VarietySpec,
    sigma: &[Identity],
    vars: &[String],
) -> Result<FinitelyPresented> {
    check_vars(sigma, vars)?;
    if v.generators.is_empty() {
        return Err(Error::InvalidParam(
            "solution route needs generating algebras".into(),
        ));
    }
    let n = vars.len();
    let points: Vec<Vec<Vec<Elem>>> = v
        .generators
        .iter()
        .map(|b| {
            all_points(b.size(), n)
                .into_iter()
                .filter(|p| holds_under(b, sigma, vars, p).unwrap_or(false))
                .collect()
        })
        .collect();
    let total: usize = points.iter().map(Vec::len).sum();
    let (alg, generated) = if total == 0 {
        // Σ has no solution in any generator: Fp is trivial.
        let a = FiniteAlgebra::from_fn("Fp", v.signature.clone(), 1, |_, _| 0)?
            .with_generators(vec![0; n])?;
        let g = Generated::new(&a, &vec![0; n])?;
        (a, g)
    } else {
        subpower_closure(
            &v.signature,
            &v.generators,
            &points,
            n,
            v.bounds.size_budget,
            "Fp",
        )?
    };
    let sig = v.signature.clone();
    let labels = (0..alg.size() as Elem)
        .map(|e| generated.term(e, vars).to_string(&sig))
        .collect();
    Ok(FinitelyPresented {
        sigma: sigma.to_vec(),
        vars: vars.to_vec(),
        algebra: Arc::new(alg.with_labels(labels)?),
        generated,
        route: FpRoute::Solutions { points: total },
    })
}

/// Whether all of Σ hold in `a` when `vars[i]` is interpreted as `assignment[i]`.
pub fn holds_under(
    a: &FiniteAlgebra,
    sigma: &[Identity],
    vars: &[String],
    assignment: &[Elem],
) -> Result<bool> {
    if vars.len() != assignment.len() {
        return Err(Error::InvalidParam("assignment length".into()));
    }
    let env = |v: &str| vars.iter().position(|w| w == v).map(|i| assignment[i]);
    for id in sigma {
        if a.eval(&id.lhs, &env)? != a.eval(&id.rhs, &env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidityVerdict {
    Valid,
    /// θ ⊇ Θ_Σ on F(m) containing no conclusion pair, with the canonical
    /// assignment into F(m)/θ.
    Invalid {
        theta: Congruence,
        assignment: Substitution,
    },
}

fn clause_free(v: &VarietySpec, clause: &Clause) -> Result<FreeAlgebra> {
    let mut vars = clause.vars();
    if vars.is_empty() {
        vars.push("x".into());
    }
    free_algebra(v, vars.len())?.with_names(vars)
}

/// V ⊨ Σ ⇒ Δ. The least candidate countermodel is F(m)/Θ_Σ: the clause is
/// valid iff some conclusion pair already lies in Θ_Σ.
pub fn validity(v: &VarietySpec, clause: &Clause) -> Result<ValidityVerdict> {
    let f = clause_free(v, clause)?;
    let theta = sigma_congruence(&f, &clause.premises)?;
    let deltas = sigma_pairs(&f, &clause.conclusions)?;
    if deltas.iter().any(|&(a, b)| theta.related(a, b)) {
        return Ok(ValidityVerdict::Valid);
    }
    let assignment = Substitution::from_pairs(f.names().iter().enumerate().map(|(i, x)| {
        (
            x.clone(),
            f.witness(theta.representatives()[theta.block_of(f.generator(i)) as usize]),
        )
    }));
    Ok(ValidityVerdict::Invalid { theta, assignment })
}

/// The same question answered by scanning all of Con(F(m)); used to cross-check.
pub fn validity_by_scan(v: &VarietySpec, clause: &Clause) -> Result<ValidityVerdict> {
    let f = clause_free(v, clause)?;
    let sig_pairs = sigma_pairs(&f, &clause.premises)?;
    let deltas = sigma_pairs(&f, &clause.conclusions)?;
    let cons = all_congruences(f.algebra(), CongruenceOptions::default())?;
    let mut bad: Vec<&Congruence> = cons
        .iter()
        .filter(|t| sig_pairs.iter().all(|&(a, b)| t.related(a, b)))
        .filter(|t| !deltas.iter().any(|&(a, b)| t.related(a, b)))
        .collect();
    bad.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then(x.cmp(y)));
    match bad.first() {
        None => Ok(ValidityVerdict::Valid),
        Some(theta) => {
            let reps = theta.representatives();
            let assignment =
                Substitution::from_pairs(f.names().iter().enumerate().map(|(i, x)| {
                    (
                        x.clone(),
                        f.witness(reps[theta.block_of(f.generator(i)) as usize]),
                    )
                }));
            Ok(ValidityVerdict::Invalid {
                theta: (*theta).clone(),
                assignment,
            })
        }
    }
}

/// Checks that every subdirectly irreducible quotient of a subalgebra of a
/// generator embeds into some generator. For congruence-distributive
/// varieties this gives V = ISP(generators).
pub fn check_isp(v: &VarietySpec) -> Result<bool> {
    use crate::finalg::{find_homomorphisms, subalgebra_generated, SearchMode};
    for b in &v.generators {
        let n = b.size();
        if n > 16 {
            return Err(Error::CapExceeded(
                "generator too large for the subalgebra scan".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for mask in 1u32..(1 << n) {
            let gens: Vec<Elem> = (0..n as Elem).filter(|&i| mask >> i & 1 == 1).collect();
            let sub = crate::finalg::subuniverse(b, &gens);
            if sub != gens || !seen.insert(sub.clone()) {
                continue;
            }
            let s = subalgebra_generated(b, &sub)?.algebra.without_generators();
            for theta in all_congruences(&s, CongruenceOptions::default())? {
                let (q, _) = quotient(&s, &theta)?;
                if q.size() == 1 || !is_subdirectly_irreducible(&q)? {
                    continue;
                }
                let q = Arc::new(q);
                let embeds = v.generators.iter().any(|g| {
                    find_homomorphisms(&q, g, &[], SearchMode::Injective)
                        .map(|h| !h.is_empty())
                        .unwrap_or(false)
                });
                if !embeds {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn is_subdirectly_irreducible(a: &FiniteAlgebra) -> Result<bool> {
    let cons = all_congruences(a, CongruenceOptions::default())?;
    let atoms: Vec<&Congruence> = cons
        .iter()
        .filter(|c| !c.is_identity())
        .filter(|c| !cons.iter().any(|d| !d.is_identity() && d != *c && d.leq(c)))
        .collect();
    Ok(atoms.len() == 1)
}
