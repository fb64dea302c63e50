//! Finite algebras given by operation tables.

mod congruence;
mod hom;
mod io;
pub(crate) mod search;

pub use congruence::{
    all_congruences, all_congruences_by_joins, all_congruences_by_partitions, congruence_generated,
    export_con_dot, minimal_elements, Congruence, CongruenceOptions, UnionFind,
};
pub use hom::{find_homomorphisms, Homomorphism, SearchMode};
pub use io::{algebra_from_json, algebra_to_json, AlgebraJson, OpJson, SignatureJson};

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::par;
use crate::term::{OpId, Signature, Term};

pub type Elem = u32;

/// Row-major index of `args` in a table over a carrier of `size` elements;
/// the first argument is the most significant digit.
#[inline]
pub fn table_index(size: usize, args: &[Elem]) -> usize {
    args.iter().fold(0usize, |acc, &a| acc * size + a as usize)
}

#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub name: String,
    signature: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<Elem>>,
    labels: Option<Vec<String>>,
    generators: Option<Vec<Elem>>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.size == other.size && self.tables == other.tables
    }
}
impl Eq for FiniteAlgebra {}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        signature: Arc<Signature>,
        size: usize,
        tables: Vec<Vec<Elem>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParam("algebras are nonempty".into()));
        }
        if tables.len() != signature.len() {
            return Err(Error::SignatureMismatch(format!(
                "{} tables for {} operations",
                tables.len(),
                signature.len()
            )));
        }
        for (op, table) in tables.iter().enumerate() {
            let decl = signature.op(op);
            let want = size
                .checked_pow(decl.arity as u32)
                .ok_or_else(|| Error::CapExceeded("table too large".into()))?;
            if table.len() != want {
                return Err(Error::MalformedTable {
                    symbol: decl.symbol.clone(),
                    msg: format!("expected {want} entries, found {}", table.len()),
                });
            }
            if let Some(&bad) = table.iter().find(|&&v| v as usize >= size) {
                return Err(Error::MalformedTable {
                    symbol: decl.symbol.clone(),
                    msg: format!("entry {bad} outside 0..{size}"),
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            signature,
            size,
            tables,
            labels: None,
            generators: None,
        })
    }

    /// Builds tables by evaluating `f` on every argument tuple.
    pub fn from_fn(
        name: impl Into<String>,
        signature: Arc<Signature>,
        size: usize,
        f: impl Fn(OpId, &[Elem]) -> Elem,
    ) -> Result<Self> {
        let tables = (0..signature.len())
            .map(|op| {
                let k = signature.arity(op);
                let mut t = Vec::with_capacity(size.pow(k as u32));
                let mut args = vec![0; k];
                for_each_tuple(size, &mut args, &mut |a| t.push(f(op, a)));
                t
            })
            .collect();
        FiniteAlgebra::new(name, signature, size, tables)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::InvalidParam(format!(
                "{} labels for {} elements",
                labels.len(),
                self.size
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_generators(mut self, gens: Vec<Elem>) -> Result<Self> {
        for &g in &gens {
            self.check(g)?;
        }
        self.generators = Some(gens);
        Ok(self)
    }

    pub fn without_generators(mut self) -> Self {
        self.generators = None;
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn table(&self, op: OpId) -> &[Elem] {
        &self.tables[op]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn generators(&self) -> Option<&[Elem]> {
        self.generators.as_deref()
    }

    pub fn label(&self, e: Elem) -> String {
        match &self.labels {
            Some(l) => l[e as usize].clone(),
            None => e.to_string(),
        }
    }

    pub fn check(&self, e: Elem) -> Result<()> {
        if (e as usize) < self.size {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                elem: e as usize,
                size: self.size,
            })
        }
    }

    #[inline]
    pub fn apply(&self, op: OpId, args: &[Elem]) -> Elem {
        self.tables[op][table_index(self.size, args)]
    }

    #[inline]
    pub fn apply2(&self, op: OpId, a: Elem, b: Elem) -> Elem {
        self.tables[op][a as usize * self.size + b as usize]
    }

    /// Evaluates a term under an assignment of its variables.
    pub fn eval(&self, t: &Term, env: &dyn Fn(&str) -> Option<Elem>) -> Result<Elem> {
        match t {
            Term::Var(v) => env(v).ok_or_else(|| Error::UnknownVariable(v.clone())),
            Term::App(op, args) => {
                if *op >= self.signature.len() || self.signature.arity(*op) != args.len() {
                    return Err(Error::SignatureMismatch(
                        "term does not fit signature".into(),
                    ));
                }
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, env))
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.apply(*op, &vals))
            }
        }
    }

    /// Checks an identity under every assignment of its variables.
    pub fn satisfies(&self, lhs: &Term, rhs: &Term) -> bool {
        let mut vars = Vec::new();
        lhs.vars_ordered(&mut vars);
        rhs.vars_ordered(&mut vars);
        let mut vals = vec![0; vars.len()];
        let mut ok = true;
        for_each_tuple(self.size, &mut vals, &mut |a| {
            if !ok {
                return;
            }
            let env = |v: &str| vars.iter().position(|w| w == v).map(|i| a[i]);
            if self.eval(lhs, &env).ok() != self.eval(rhs, &env).ok() {
                ok = false;
            }
        });
        ok
    }

    /// Elements obtained from the constants alone.
    pub fn constant_closure(&self) -> Vec<Elem> {
        subuniverse(self, &[])
    }
}

/// Visits every tuple in `0..size` of the length of `buf`, in lexicographic order.
pub fn for_each_tuple(size: usize, buf: &mut [Elem], f: &mut dyn FnMut(&[Elem])) {
    let k = buf.len();
    buf.iter_mut().for_each(|b| *b = 0);
    if size == 0 {
        return;
    }
    loop {
        f(buf);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            buf[i] += 1;
            if (buf[i] as usize) < size {
                break;
            }
            buf[i] = 0;
        }
    }
}

/// Direct product with mixed-radix encoding; the first factor is the most
/// significant digit.
pub fn product(factors: &[&FiniteAlgebra]) -> Result<FiniteAlgebra> {
    let first = factors.first().ok_or(Error::EmptyProduct)?;
    for f in factors {
        if f.signature != first.signature {
            return Err(Error::SignatureMismatch(format!(
                "`{}` vs `{}`",
                first.name, f.name
            )));
        }
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
    let size = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::CapExceeded("product too large".into()))?;
    let decode = |mut e: usize| -> Vec<Elem> {
        let mut coords = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            coords[i] = (e % sizes[i]) as Elem;
            e /= sizes[i];
        }
        coords
    };
    let coords: Vec<Vec<Elem>> = (0..size).map(decode).collect();
    let name = factors
        .iter()
        .map(|f| f.name.as_str())
        .collect::<Vec<_>>()
        .join(" x ");
    let alg = FiniteAlgebra::from_fn(name, first.signature.clone(), size, |op, args| {
        let mut e = 0usize;
        let mut col = vec![0; args.len()];
        for (i, f) in factors.iter().enumerate() {
            for (c, &a) in col.iter_mut().zip(args) {
                *c = coords[a as usize][i];
            }
            e = e * sizes[i] + f.apply(op, &col) as usize;
        }
        e as Elem
    })?;
    if factors.iter().all(|f| f.labels.is_some()) {
        let labels = coords
            .iter()
            .map(|c| {
                let parts: Vec<_> = c
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| factors[i].label(x))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        return alg.with_labels(labels);
    }
    Ok(alg)
}

/// How an element was first produced during a closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Gen(usize),
    Op(OpId, Vec<Elem>),
}

/// Builds a term for element `e` from recipes, with generator `i` printed as `names[i]`.
pub fn recipe_term(recipes: &[Recipe], e: Elem, names: &[String]) -> Term {
    let mut memo: HashMap<Elem, Term> = HashMap::new();
    recipe_term_memo(recipes, e, names, &mut memo)
}

fn recipe_term_memo(
    recipes: &[Recipe],
    e: Elem,
    names: &[String],
    memo: &mut HashMap<Elem, Term>,
) -> Term {
    if let Some(t) = memo.get(&e) {
        return t.clone();
    }
    let t = match &recipes[e as usize] {
        Recipe::Gen(i) => Term::Var(names[*i].clone()),
        Recipe::Op(op, args) => Term::App(
            *op,
            args.iter()
                .map(|&a| recipe_term_memo(recipes, a, names, memo))
                .collect(),
        ),
    };
    memo.insert(e, t.clone());
    t
}

const CLOSE_CHUNK: usize = 32;

pub(crate) struct Closure<E> {
    pub elems: Vec<E>,
    pub recipes: Vec<Recipe>,
    pub index: HashMap<E, Elem>,
    /// Index of each generator (duplicates collapse onto the first).
    pub gen_elems: Vec<Elem>,
}

/// Layered closure of `gens` under the operations of `sig`. Generators get the
/// first indices, then constants, then new elements in discovery order.
pub(crate) fn close<E, F>(
    sig: &Signature,
    gens: Vec<E>,
    apply: F,
    budget: usize,
) -> Result<Closure<E>>
where
    E: Clone + Eq + Hash + Send + Sync,
    F: Fn(OpId, &[&E]) -> E + Sync + Send,
{
    let mut c = Closure {
        elems: Vec::new(),
        recipes: Vec::new(),
        index: HashMap::new(),
        gen_elems: Vec::new(),
    };
    let push = |c: &mut Closure<E>, e: E, r: Recipe| -> Result<Elem> {
        if let Some(&i) = c.index.get(&e) {
            return Ok(i);
        }
        let i = c.elems.len() as Elem;
        if c.elems.len() >= budget {
            return Err(Error::BudgetExceeded {
                what: "closure size".into(),
                reached: c.elems.len() + 1,
                budget,
            });
        }
        c.index.insert(e.clone(), i);
        c.elems.push(e);
        c.recipes.push(r);
        Ok(i)
    };
    for (i, g) in gens.into_iter().enumerate() {
        let idx = push(&mut c, g, Recipe::Gen(i))?;
        c.gen_elems.push(idx);
    }
    for op in sig.constants() {
        let e = apply(op, &[]);
        push(&mut c, e, Recipe::Op(op, Vec::new()))?;
    }
    let ops: Vec<(OpId, usize)> = (0..sig.len())
        .map(|op| (op, sig.arity(op)))
        .filter(|&(_, k)| k > 0)
        .collect();
    let mut lo = 0usize;
    loop {
        let hi = c.elems.len();
        if lo == hi {
            break;
        }
        // Tuples over 0..hi with at least one entry in lo..hi, split on the first
        // entry; chunks keep the budget check close to the discovery.
        for start in (0..hi).step_by(CLOSE_CHUNK) {
            let end = (start + CLOSE_CHUNK).min(hi);
            let elems = &c.elems;
            let index = &c.index;
            let found: Vec<Vec<(E, Recipe)>> = par::map_range(end - start, |i| {
                let a0 = start + i;
                let mut out = Vec::new();
                let mut seen: HashMap<E, ()> = HashMap::new();
                for &(op, k) in &ops {
                    let mut rest = vec![0 as Elem; k - 1];
                    let first_new = a0 >= lo;
                    let mut visit = |rest: &[Elem]| {
                        if !first_new && !rest.iter().any(|&r| r as usize >= lo) {
                            return;
                        }
                        let mut args: Vec<&E> = Vec::with_capacity(k);
                        args.push(&elems[a0]);
                        args.extend(rest.iter().map(|&r| &elems[r as usize]));
                        let e = apply(op, &args);
                        if !index.contains_key(&e) && seen.insert(e.clone(), ()).is_none() {
                            let mut full = vec![a0 as Elem];
                            full.extend_from_slice(rest);
                            out.push((e, Recipe::Op(op, full)));
                        }
                    };
                    for_each_tuple(hi, &mut rest, &mut visit);
                }
                out
            });
            for batch in found {
                for (e, r) in batch {
                    push(&mut c, e, r)?;
                }
            }
        }
        lo = hi;
    }
    Ok(c)
}

/// Operation tables of a closed set, looked up through its index.
pub(crate) fn closure_tables<E, F>(
    sig: &Signature,
    c: &Closure<E>,
    apply: F,
) -> Result<Vec<Vec<Elem>>>
where
    E: Clone + Eq + Hash + Send + Sync,
    F: Fn(OpId, &[&E]) -> E + Sync + Send,
{
    let n = c.elems.len();
    let mut tables = Vec::with_capacity(sig.len());
    for op in 0..sig.len() {
        let k = sig.arity(op);
        if k == 0 {
            let e = apply(op, &[]);
            tables.push(vec![c.index[&e]]);
            continue;
        }
        let rows: Vec<Result<Vec<Elem>>> = par::map_range(n, |a0| {
            let mut rest = vec![0 as Elem; k - 1];
            let mut row = Vec::with_capacity(n.pow(k as u32 - 1));
            let mut missing = false;
            for_each_tuple(n, &mut rest, &mut |rest| {
                let mut args: Vec<&E> = Vec::with_capacity(k);
                args.push(&c.elems[a0]);
                args.extend(rest.iter().map(|&r| &c.elems[r as usize]));
                match c.index.get(&apply(op, &args)) {
                    Some(&i) => row.push(i),
                    None => missing = true,
                }
            });
            if missing {
                Err(Error::NotHomomorphism("closure is not closed".into()))
            } else {
                Ok(row)
            }
        });
        let mut t = Vec::with_capacity(n.pow(k as u32));
        for r in rows {
            t.extend(r?);
        }
        tables.push(t);
    }
    Ok(tables)
}

/// The subuniverse generated by `gens`, sorted ascending.
pub fn subuniverse(a: &FiniteAlgebra, gens: &[Elem]) -> Vec<Elem> {
    let c = close(
        &a.signature,
        gens.to_vec(),
        |op, args: &[&Elem]| {
            let v: Vec<Elem> = args.iter().map(|&&x| x).collect();
            a.apply(op, &v)
        },
        usize::MAX,
    )
    .expect("unbounded closure");
    let mut out = c.elems;
    out.sort_unstable();
    out
}

/// Recipes for every element of an algebra in terms of a generating sequence,
/// together with an evaluation order in which recipe arguments come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub gens: Vec<Elem>,
    pub recipes: Vec<Recipe>,
    pub order: Vec<Elem>,
}

impl Generated {
    pub fn new(a: &FiniteAlgebra, gens: &[Elem]) -> Result<Generated> {
        for &g in gens {
            a.check(g)?;
        }
        let apply = |op: OpId, args: &[&Elem]| {
            let v: Vec<Elem> = args.iter().map(|&&x| x).collect();
            a.apply(op, &v)
        };
        let c = close(a.signature(), gens.to_vec(), apply, usize::MAX)?;
        if c.elems.len() != a.size() {
            return Err(Error::InvalidParam(format!(
                "generators span {} of {} elements",
                c.elems.len(),
                a.size()
            )));
        }
        let mut recipes = vec![Recipe::Gen(0); a.size()];
        for (i, r) in c.recipes.iter().enumerate() {
            recipes[c.elems[i] as usize] = match r {
                Recipe::Gen(j) => Recipe::Gen(*j),
                Recipe::Op(op, args) => {
                    Recipe::Op(*op, args.iter().map(|&x| c.elems[x as usize]).collect())
                }
            };
        }
        // Duplicated generators keep the recipe of their first occurrence.
        Ok(Generated {
            gens: gens.to_vec(),
            recipes,
            order: c.elems,
        })
    }

    /// Recipes already in discovery order (arguments precede results).
    pub fn from_closure(gens: Vec<Elem>, recipes: Vec<Recipe>) -> Generated {
        let order = (0..recipes.len() as Elem).collect();
        Generated {
            gens,
            recipes,
            order,
        }
    }

    /// The homomorphic image of every element once generator `i` is sent to `images[i]`.
    /// The caller is responsible for the assignment extending to a homomorphism.
    pub fn map_into(&self, target: &FiniteAlgebra, images: &[Elem]) -> Vec<Elem> {
        let mut out = vec![Elem::MAX; self.recipes.len()];
        let mut args = Vec::new();
        for &e in &self.order {
            out[e as usize] = match &self.recipes[e as usize] {
                Recipe::Gen(j) => images[*j],
                Recipe::Op(op, a) => {
                    args.clear();
                    args.extend(a.iter().map(|&x| out[x as usize]));
                    target.apply(*op, &args)
                }
            };
        }
        out
    }

    pub fn term(&self, e: Elem, names: &[String]) -> Term {
        recipe_term(&self.recipes, e, names)
    }
}

/// A generated subalgebra with its inclusion map and a witness term for each element.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub algebra: FiniteAlgebra,
    /// Subalgebra element -> parent element.
    pub inclusion: Vec<Elem>,
    /// Witness terms over `g1..gk`.
    pub witnesses: Vec<Term>,
    pub recipes: Vec<Recipe>,
}

/// Elements are numbered in discovery order: generators, constants, then the rest.
pub fn subalgebra_generated(a: &FiniteAlgebra, gens: &[Elem]) -> Result<Subalgebra> {
    for &g in gens {
        a.check(g)?;
    }
    let apply = |op: OpId, args: &[&Elem]| {
        let v: Vec<Elem> = args.iter().map(|&&x| x).collect();
        a.apply(op, &v)
    };
    let c = close(&a.signature, gens.to_vec(), apply, usize::MAX)?;
    let tables = closure_tables(&a.signature, &c, apply)?;
    let names: Vec<String> = (1..=gens.len()).map(|i| format!("g{i}")).collect();
    let witnesses = (0..c.elems.len())
        .map(|e| recipe_term(&c.recipes, e as Elem, &names))
        .collect();
    let mut alg = FiniteAlgebra::new(
        format!("Sg({})", a.name),
        a.signature.clone(),
        c.elems.len(),
        tables,
    )?
    .with_generators(c.gen_elems.clone())?;
    if let Some(l) = &a.labels {
        alg = alg.with_labels(c.elems.iter().map(|&e| l[e as usize].clone()).collect())?;
    }
    Ok(Subalgebra {
        algebra: alg,
        inclusion: c.elems,
        witnesses,
        recipes: c.recipes,
    })
}

/// A / theta, with blocks numbered as in the canonical form of `theta`.
/// Returns the quotient and the projection map.
pub fn quotient(a: &FiniteAlgebra, theta: &Congruence) -> Result<(FiniteAlgebra, Vec<Elem>)> {
    if theta.size() != a.size {
        return Err(Error::InvalidParam(
            "congruence over a different carrier".into(),
        ));
    }
    if !theta.is_compatible(a) {
        return Err(Error::InvalidParam("partition is not a congruence".into()));
    }
    let blocks = theta.blocks().to_vec();
    let reps = theta.representatives();
    let q = FiniteAlgebra::from_fn(
        format!("{}/theta", a.name),
        a.signature.clone(),
        reps.len(),
        |op, args| {
            let v: Vec<Elem> = args.iter().map(|&b| reps[b as usize]).collect();
            blocks[a.apply(op, &v) as usize]
        },
    )?;
    let mut q = match &a.labels {
        Some(l) => q.with_labels(reps.iter().map(|&r| l[r as usize].clone()).collect())?,
        None => q,
    };
    if let Some(g) = &a.generators {
        q = q.with_generators(g.iter().map(|&x| blocks[x as usize]).collect())?;
    }
    Ok((q, blocks))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::term::OpDecl;

    pub fn lattice_sig() -> Arc<Signature> {
        Arc::new(
            Signature::new(vec![
                OpDecl::new("meet", 2).infix("/\\"),
                OpDecl::new("join", 2).infix("\\/"),
            ])
            .unwrap(),
        )
    }

    /// The chain 0 < 1 < ... < n-1 as a lattice.
    pub fn chain(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::from_fn(format!("C{n}"), lattice_sig(), n, |op, a| {
            if op == 0 {
                a[0].min(a[1])
            } else {
                a[0].max(a[1])
            }
        })
        .unwrap()
    }

    #[test]
    fn product_sizes_and_encoding() {
        let c2 = chain(2);
        let c3 = chain(3);
        let p = product(&[&c2, &c3]).unwrap();
        assert_eq!(p.size(), 6);
        // (1,0) meet (0,2) = (0,0); encoded 1*3+0 = 3 and 0*3+2 = 2.
        assert_eq!(p.apply2(0, 3, 2), 0);
        assert_eq!(p.apply2(1, 3, 2), 5);
        assert!(matches!(product(&[]), Err(Error::EmptyProduct)));
    }

    #[test]
    fn malformed_tables_rejected() {
        let sig = lattice_sig();
        let bad = FiniteAlgebra::new("bad", sig.clone(), 2, vec![vec![0, 0, 0], vec![0, 1, 1, 1]]);
        assert!(matches!(bad, Err(Error::MalformedTable { .. })));
        let bad = FiniteAlgebra::new("bad", sig, 2, vec![vec![0, 0, 0, 2], vec![0, 1, 1, 1]]);
        assert!(matches!(bad, Err(Error::MalformedTable { .. })));
    }

    #[test]
    fn subalgebra_witnesses_evaluate_back() {
        let c2 = chain(2);
        let sq = product(&[&c2; 8]).unwrap();
        // Projections 2^3 -> 2 as points of 2^8.
        let gens: Vec<Elem> = (0..3)
            .map(|i| (0..8).map(|p| ((p >> i) & 1) << (7 - p)).sum())
            .collect();
        let sub = subalgebra_generated(&sq, &gens).unwrap();
        // Free distributive lattice on three generators has 18 elements.
        assert_eq!(sub.algebra.size(), 18);
        for (i, w) in sub.witnesses.iter().enumerate() {
            let env = |v: &str| v[1..].parse::<usize>().ok().map(|k| gens[k - 1]);
            assert_eq!(sq.eval(w, &env).unwrap(), sub.inclusion[i]);
        }
    }

    #[test]
    fn quotient_of_chain() {
        let c3 = chain(3);
        let theta = congruence_generated(&c3, &[(1, 2)]);
        let (q, proj) = quotient(&c3, &theta).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(proj, vec![0, 1, 1]);
    }
}
