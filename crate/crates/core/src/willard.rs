//! Groupoids with 0 and 1 satisfying
//!   0x = x0 = 0,  1x = 0,  x(yz) = 0,  (x1)1 = x1,
//!   x y z1 .. zn y = x y z1 .. zn 1   (products associate to the left).
//!
//! Normal forms are 0, 1 and left-associated words `h a1 .. ak` where `h` is
//! a variable and each `ai` is a variable or 1; variables among the `ai` are
//! distinct and no two 1s are adjacent. The head may reappear once as a
//! letter and 1 may reappear when separated by a variable.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finalg::{close, closure_tables, Elem, FiniteAlgebra, Generated};
use crate::term::{Signature, Substitution, Term};
use crate::variety::NormalFormEngine;

pub const ONE: u16 = u16::MAX;

/// Normal form over interned variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nf {
    Zero,
    One,
    /// `w[0]` is the head variable; the rest are letters (`ONE` or a variable).
    Word(Vec<u16>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    ZeroLeft,
    ZeroRight,
    OneLeft,
    RightNested,
    DoubleOne,
    /// The repetition schema with `n` letters between the two occurrences.
    Repeat(usize),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::ZeroLeft => write!(f, "0x = 0"),
            Axiom::ZeroRight => write!(f, "x0 = 0"),
            Axiom::OneLeft => write!(f, "1x = 0"),
            Axiom::RightNested => write!(f, "x(yz) = 0"),
            Axiom::DoubleOne => write!(f, "(x1)1 = x1"),
            Axiom::Repeat(n) => {
                let zs: String = (1..=*n).map(|i| format!(" z{i}")).collect();
                write!(f, "x y{zs} y = x y{zs} 1")
            }
        }
    }
}

/// Operation ids in the groupoid signature.
#[derive(Clone, Copy, Debug)]
pub struct Ops {
    pub mul: usize,
    pub zero: usize,
    pub one: usize,
}

impl Ops {
    pub fn find(sig: &Signature) -> Result<Ops> {
        let get = |s: &str, k: usize| {
            sig.lookup(s)
                .filter(|&id| sig.arity(id) == k)
                .ok_or_else(|| {
                    Error::SignatureMismatch(format!("groupoid signature lacks `{s}`/{k}"))
                })
        };
        Ok(Ops {
            mul: get("mul", 2)?,
            zero: get("zero", 0)?,
            one: get("one", 0)?,
        })
    }

    fn mul(&self, a: Term, b: Term) -> Term {
        Term::App(self.mul, vec![a, b])
    }
}

impl Axiom {
    /// Left and right sides of the axiom as terms over x, y, z and z1..zn.
    pub fn sides(&self, ops: &Ops) -> (Term, Term) {
        let v = Term::var;
        let zero = Term::constant(ops.zero);
        let one = Term::constant(ops.one);
        match self {
            Axiom::ZeroLeft => (ops.mul(zero.clone(), v("x")), zero),
            Axiom::ZeroRight => (ops.mul(v("x"), zero.clone()), zero),
            Axiom::OneLeft => (ops.mul(one, v("x")), zero),
            Axiom::RightNested => (ops.mul(v("x"), ops.mul(v("y"), v("z"))), zero),
            Axiom::DoubleOne => {
                let x1 = ops.mul(v("x"), one.clone());
                (ops.mul(x1.clone(), one), x1)
            }
            Axiom::Repeat(n) => {
                let mut spine = ops.mul(v("x"), v("y"));
                for i in 1..=*n {
                    spine = ops.mul(spine, v(&format!("z{i}")));
                }
                (ops.mul(spine.clone(), v("y")), ops.mul(spine, one))
            }
        }
    }
}

/// One rewrite step `redex -> contractum`, an instance of `axiom` under `subst`.
#[derive(Clone, Debug)]
pub struct RewriteStep {
    pub axiom: Axiom,
    pub subst: Substitution,
    pub redex: Term,
    pub contractum: Term,
}

impl RewriteStep {
    /// Re-derives the step from the axiom schema.
    pub fn is_instance(&self, ops: &Ops) -> bool {
        let (l, r) = self.axiom.sides(ops);
        self.subst.apply(&l) == self.redex && self.subst.apply(&r) == self.contractum
    }

    pub fn to_string(&self, sig: &Signature) -> String {
        format!(
            "{}: {} -> {}",
            self.axiom,
            self.redex.display(sig),
            self.contractum.display(sig)
        )
    }
}

/// Interns variable names for normal forms.
#[derive(Clone, Debug, Default)]
pub struct Names {
    names: Vec<String>,
    index: HashMap<String, u16>,
}

impl Names {
    pub fn new(names: &[String]) -> Self {
        let mut n = Names::default();
        for s in names {
            n.intern(s);
        }
        n
    }

    pub fn intern(&mut self, s: &str) -> u16 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.names.len() as u16;
        self.names.push(s.to_string());
        self.index.insert(s.to_string(), i);
        i
    }

    pub fn get(&self, s: &str) -> Option<u16> {
        self.index.get(s).copied()
    }

    pub fn name(&self, i: u16) -> &str {
        &self.names[i as usize]
    }
}

/// Product of two normal forms.
pub fn mul(u: &Nf, v: &Nf) -> Nf {
    mul_logged(u, v, &mut |_, _, _| {})
}

/// Product of normal forms; `log(axiom, u, v)` is called for every rule used,
/// with the operands of the product being rewritten.
fn mul_logged(u: &Nf, v: &Nf, log: &mut dyn FnMut(Axiom, &Nf, &Nf)) -> Nf {
    match (u, v) {
        (_, Nf::Zero) => {
            log(Axiom::ZeroRight, u, v);
            Nf::Zero
        }
        (Nf::Zero, _) => {
            log(Axiom::ZeroLeft, u, v);
            Nf::Zero
        }
        (Nf::One, _) => {
            log(Axiom::OneLeft, u, v);
            Nf::Zero
        }
        (_, Nf::Word(w)) if w.len() > 1 => {
            log(Axiom::RightNested, u, v);
            Nf::Zero
        }
        (Nf::Word(w), Nf::One) => append_one(w, log),
        (Nf::Word(w), Nf::Word(y)) => {
            let y = y[0];
            match w[1..].iter().position(|&l| l == y) {
                Some(p) => {
                    let n = w.len() - 2 - p;
                    log(Axiom::Repeat(n), u, v);
                    append_one(w, log)
                }
                None => {
                    let mut out = w.clone();
                    out.push(y);
                    Nf::Word(out)
                }
            }
        }
    }
}

fn append_one(w: &[u16], log: &mut dyn FnMut(Axiom, &Nf, &Nf)) -> Nf {
    if w.len() > 1 && w[w.len() - 1] == ONE {
        let u = Nf::Word(w.to_vec());
        log(Axiom::DoubleOne, &u, &Nf::One);
        return u;
    }
    let mut out = w.to_vec();
    out.push(ONE);
    Nf::Word(out)
}

pub fn is_normal_form(nf: &Nf) -> bool {
    match nf {
        Nf::Zero | Nf::One => true,
        Nf::Word(w) => {
            if w.is_empty() || w[0] == ONE {
                return false;
            }
            let letters = &w[1..];
            let mut seen = HashSet::new();
            for (i, &l) in letters.iter().enumerate() {
                if l == ONE {
                    if i > 0 && letters[i - 1] == ONE {
                        return false;
                    }
                } else if !seen.insert(l) {
                    return false;
                }
            }
            true
        }
    }
}

pub fn nf_to_term(nf: &Nf, names: &Names, ops: &Ops) -> Term {
    let atom = |l: u16| {
        if l == ONE {
            Term::constant(ops.one)
        } else {
            Term::Var(names.name(l).to_string())
        }
    };
    match nf {
        Nf::Zero => Term::constant(ops.zero),
        Nf::One => Term::constant(ops.one),
        Nf::Word(w) => w[1..]
            .iter()
            .fold(atom(w[0]), |acc, &l| ops.mul(acc, atom(l))),
    }
}

/// Juxtaposition form, e.g. `x y z 1`.
pub fn nf_to_string(nf: &Nf, names: &Names) -> String {
    match nf {
        Nf::Zero => "0".into(),
        Nf::One => "1".into(),
        Nf::Word(w) => w
            .iter()
            .map(|&l| {
                if l == ONE {
                    "1".to_string()
                } else {
                    names.name(l).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" "),
    }
}

/// The result of normalizing a term.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub nf: Nf,
    pub names: Names,
    pub term: Term,
    pub steps: Vec<RewriteStep>,
}

impl fmt::Display for Normalized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&nf_to_string(&self.nf, &self.names))
    }
}

fn nf_of(t: &Term, ops: &Ops, names: &mut Names, steps: &mut Vec<RewriteStep>) -> Result<Nf> {
    match t {
        Term::Var(v) => Ok(Nf::Word(vec![names.intern(v)])),
        Term::App(op, args) if *op == ops.zero && args.is_empty() => Ok(Nf::Zero),
        Term::App(op, args) if *op == ops.one && args.is_empty() => Ok(Nf::One),
        Term::App(op, args) if *op == ops.mul && args.len() == 2 => {
            let u = nf_of(&args[0], ops, names, steps)?;
            let v = nf_of(&args[1], ops, names, steps)?;
            let snapshot = names.clone();
            let mut log =
                |ax: Axiom, a: &Nf, b: &Nf| steps.push(step_for(ax, a, b, &snapshot, ops));
            Ok(mul_logged(&u, &v, &mut log))
        }
        _ => Err(Error::SignatureMismatch(
            "term outside the groupoid signature".into(),
        )),
    }
}

/// Reconstructs the instance substitution for a logged rule application `a * b`.
fn step_for(ax: Axiom, a: &Nf, b: &Nf, names: &Names, ops: &Ops) -> RewriteStep {
    let t = |nf: &Nf| nf_to_term(nf, names, ops);
    let redex = ops.mul(t(a), t(b));
    let s = |pairs: Vec<(&str, Term)>| {
        Substitution::from_pairs(pairs.into_iter().map(|(k, v)| (k.to_string(), v)))
    };
    let (subst, contractum) = match ax {
        Axiom::ZeroLeft => (s(vec![("x", t(b))]), Term::constant(ops.zero)),
        Axiom::ZeroRight | Axiom::OneLeft => {
            let x = if ax == Axiom::ZeroRight { t(a) } else { t(b) };
            (s(vec![("x", x)]), Term::constant(ops.zero))
        }
        Axiom::RightNested => {
            let Nf::Word(w) = b else {
                unreachable!("nested right factor is a word")
            };
            let y = Nf::Word(w[..w.len() - 1].to_vec());
            let z = Nf::Word(vec![w[w.len() - 1]]);
            let z = if w[w.len() - 1] == ONE {
                Term::constant(ops.one)
            } else {
                t(&z)
            };
            (
                s(vec![("x", t(a)), ("y", t(&y)), ("z", z)]),
                Term::constant(ops.zero),
            )
        }
        Axiom::DoubleOne => {
            let Nf::Word(w) = a else {
                unreachable!("double one on a word")
            };
            let x = Nf::Word(w[..w.len() - 1].to_vec());
            (s(vec![("x", t(&x))]), t(a))
        }
        Axiom::Repeat(n) => {
            let Nf::Word(w) = a else {
                unreachable!("repeat on a word")
            };
            let p = w.len() - 1 - n;
            let x = Nf::Word(w[..p].to_vec());
            let atom = |l: u16| {
                if l == ONE {
                    Term::constant(ops.one)
                } else {
                    Term::Var(names.name(l).to_string())
                }
            };
            let mut pairs = vec![("x".to_string(), t(&x)), ("y".to_string(), atom(w[p]))];
            for (i, &l) in w[p + 1..].iter().enumerate() {
                pairs.push((format!("z{}", i + 1), atom(l)));
            }
            let subst = Substitution::from_pairs(pairs);
            (subst, ops.mul(t(a), Term::constant(ops.one)))
        }
    };
    RewriteStep {
        axiom: ax,
        subst,
        redex,
        contractum,
    }
}

/// Normal form of `t` with the list of rewrite steps used.
pub fn normalize(sig: &Signature, t: &Term) -> Result<Normalized> {
    let ops = Ops::find(sig)?;
    let mut names = Names::default();
    let mut steps = Vec::new();
    let nf = nf_of(t, &ops, &mut names, &mut steps)?;
    Ok(Normalized {
        term: nf_to_term(&nf, &names, &ops),
        nf,
        names,
        steps,
    })
}

pub fn equal_in_willard(sig: &Signature, s: &Term, t: &Term) -> Result<bool> {
    Ok(normalize(sig, s)?.term == normalize(sig, t)?.term)
}

/// All normal forms over `n` variables, ordered by head, then letters.
pub fn enumerate_normal_forms(n: usize) -> Vec<Nf> {
    let mut out = vec![Nf::Zero, Nf::One];
    for h in 0..n as u16 {
        let mut acc = Vec::new();
        extend_words(n, &mut vec![h], &mut acc);
        acc.sort();
        out.extend(acc.into_iter().map(Nf::Word));
    }
    out
}

fn extend_words(n: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    out.push(cur.clone());
    let last_one = cur.len() > 1 && cur[cur.len() - 1] == ONE;
    if !last_one {
        cur.push(ONE);
        extend_words(n, cur, out);
        cur.pop();
    }
    for v in 0..n as u16 {
        if cur[1..].contains(&v) {
            continue;
        }
        cur.push(v);
        extend_words(n, cur, out);
        cur.pop();
    }
}

/// Free algebras by closure of the variables under the normal-form product.
#[derive(Debug, Clone, Copy, Default)]
pub struct WillardEngine;

impl NormalFormEngine for WillardEngine {
    fn free_algebra(
        &self,
        sig: &Arc<Signature>,
        n: usize,
        budget: usize,
    ) -> Result<(FiniteAlgebra, Generated)> {
        let ops = Ops::find(sig)?;
        let gens: Vec<Nf> = (0..n as u16).map(|i| Nf::Word(vec![i])).collect();
        let apply = |op: usize, args: &[&Nf]| -> Nf {
            if op == ops.mul {
                mul(args[0], args[1])
            } else if op == ops.zero {
                Nf::Zero
            } else {
                Nf::One
            }
        };
        let c = close(sig, gens, apply, budget)?;
        let tables = closure_tables(sig, &c, apply)?;
        let names = Names::new(&crate::variety::default_names(n));
        let labels = c.elems.iter().map(|e| nf_to_string(e, &names)).collect();
        let alg = FiniteAlgebra::new(
            format!("F_willard({n})"),
            sig.clone(),
            c.elems.len(),
            tables,
        )?
        .with_generators(c.gen_elems.clone())?
        .with_labels(labels)?;
        Ok((alg, Generated::from_closure(c.gen_elems, c.recipes)))
    }
}

/// Normal form of each element of an engine-built free algebra (from its labels).
pub fn element_nf(f: &FiniteAlgebra, e: Elem) -> Option<Nf> {
    let label = f.labels()?.get(e as usize)?;
    let mut names = Names::new(&crate::variety::default_names(f.generators()?.len()));
    Some(match label.as_str() {
        "0" => Nf::Zero,
        "1" => Nf::One,
        s => Nf::Word(
            s.split(' ')
                .map(|p| if p == "1" { ONE } else { names.intern(p) })
                .collect(),
        ),
    })
}

/// Checks every axiom in `a` by exhaustive assignment; schema instances with
/// `n <= exhaustive_n` range over all elements, larger ones up to `max_n`
/// put atoms (generators and constants) at the z positions.
pub fn model_check(a: &FiniteAlgebra, exhaustive_n: usize, max_n: usize) -> Result<()> {
    let ops = Ops::find(a.signature())?;
    let size = a.size() as Elem;
    let m = |x, y| a.apply2(ops.mul, x, y);
    let zero = a.apply(ops.zero, &[]);
    let one = a.apply(ops.one, &[]);
    let fail = |what: &str| Err(Error::NotHomomorphism(format!("axiom {what} fails")));
    for x in 0..size {
        if m(zero, x) != zero || m(x, zero) != zero {
            return fail("0x = x0 = 0");
        }
        if m(one, x) != zero {
            return fail("1x = 0");
        }
        if m(m(x, one), one) != m(x, one) {
            return fail("(x1)1 = x1");
        }
        for y in 0..size {
            for z in 0..size {
                if m(x, m(y, z)) != zero {
                    return fail("x(yz) = 0");
                }
            }
        }
    }
    let mut atoms: Vec<Elem> = a.generators().map(|g| g.to_vec()).unwrap_or_default();
    atoms.extend([zero, one]);
    for n in 0..=max_n {
        let zs: Vec<Elem> = if n <= exhaustive_n {
            (0..size).collect()
        } else {
            atoms.clone()
        };
        for x in 0..size {
            for y in 0..size {
                let xy = m(x, y);
                let mut ok = true;
                let mut buf = vec![0; n];
                crate::finalg::for_each_tuple(zs.len(), &mut buf, &mut |t| {
                    if !ok {
                        return;
                    }
                    let w = t.iter().fold(xy, |acc, &i| m(acc, zs[i as usize]));
                    if m(w, y) != m(w, one) {
                        ok = false;
                    }
                });
                if !ok {
                    return fail(&Axiom::Repeat(n).to_string());
                }
            }
        }
    }
    Ok(())
}

/// Irreducible terms reachable from `t` by applying axioms left to right at
/// any position, in any order. Independent of the normal-form product.
pub fn rewrite_oracle(sig: &Signature, t: &Term, cap: usize) -> Result<BTreeSet<Term>> {
    let ops = Ops::find(sig)?;
    let mut seen: HashSet<Term> = HashSet::new();
    let mut stack = vec![t.clone()];
    let mut out = BTreeSet::new();
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        if seen.len() > cap {
            return Err(Error::CapExceeded("rewrite oracle".into()));
        }
        let succ = one_step(&s, &ops);
        if succ.is_empty() {
            out.insert(s);
        } else {
            stack.extend(succ);
        }
    }
    Ok(out)
}

fn one_step(t: &Term, ops: &Ops) -> Vec<Term> {
    let mut out = Vec::new();
    if let Some(r) = root_step(t, ops) {
        out.push(r);
    }
    if let Term::App(op, args) = t {
        for i in 0..args.len() {
            for r in one_step(&args[i], ops) {
                let mut a = args.clone();
                a[i] = r;
                out.push(Term::App(*op, a));
            }
        }
    }
    out
}

fn root_step(t: &Term, ops: &Ops) -> Option<Term> {
    let Term::App(op, args) = t else { return None };
    if *op != ops.mul {
        return None;
    }
    let (a, b) = (&args[0], &args[1]);
    let zero = Term::constant(ops.zero);
    let one = Term::constant(ops.one);
    let is_mul = |x: &Term| matches!(x, Term::App(o, _) if *o == ops.mul);
    if *a == zero || *b == zero || *a == one || is_mul(b) {
        return Some(zero);
    }
    if *b == one {
        if let Term::App(o, inner) = a {
            if *o == ops.mul && inner[1] == one {
                return Some(a.clone());
            }
        }
    }
    // x y z1..zn y: b occurs as a right child on the left spine of a.
    if *b != one {
        let mut cur = a;
        while let Term::App(o, inner) = cur {
            if *o != ops.mul {
                break;
            }
            if inner[1] == *b {
                return Some(ops.mul(a.clone(), one));
            }
            cur = &inner[0];
        }
    }
    None
}

/// Outcome of checking the unifier families for `xy = 0` and `xy = x1`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FamilyReport {
    pub unify_xy_zero: Vec<bool>,
    /// ⊑-incomparability of σ1, σ2, σ3 (kernels on F(x, y)).
    pub exact_incomparable: bool,
    /// Minimal exact congruences of Fp(xy = 0) found up to F(`exact_bound`).
    pub minimal_exact: usize,
    pub exact_bound: usize,
    /// The σ1, σ2, σ3 kernels are exactly the minimal exact ones, pulled back to F(x, y).
    pub complete_at_bound: bool,
    pub unify_xy_x1: Vec<bool>,
    /// For i != j, whether some σ' with image length <= bound gives σ' ∘ σi = σj.
    pub instantiations: Vec<(usize, usize, bool)>,
    pub bound: usize,
}

impl FamilyReport {
    pub fn all_pass(&self) -> bool {
        self.unify_xy_zero.iter().all(|&b| b)
            && self.exact_incomparable
            && self.minimal_exact == 3
            && self.complete_at_bound
            && self.unify_xy_x1.iter().all(|&b| b)
            && self.instantiations.iter().all(|&(_, _, found)| !found)
    }
}

/// σn: x -> x y z1 .. zn, y -> y.
pub fn sigma_family(n: usize, ops: &Ops) -> Substitution {
    let mut x = ops.mul(Term::var("x"), Term::var("y"));
    for i in 1..=n {
        x = ops.mul(x, Term::var(&format!("z{i}")));
    }
    Substitution::from_pairs([("x".to_string(), x)])
}

/// The three unifiers of xy = 0: x -> 1; x -> 0; y -> y z.
pub fn zero_unifiers(ops: &Ops) -> [Substitution; 3] {
    [
        Substitution::from_pairs([("x".to_string(), Term::constant(ops.one))]),
        Substitution::from_pairs([("x".to_string(), Term::constant(ops.zero))]),
        Substitution::from_pairs([("y".to_string(), ops.mul(Term::var("y"), Term::var("z")))]),
    ]
}

/// Kernel of F(x, y) -> W, e -> σ(e), as a congruence on F(x, y).
fn substitution_kernel(
    f: &crate::variety::FreeAlgebra,
    sig: &Signature,
    s: &Substitution,
) -> Result<crate::finalg::Congruence> {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(f.size());
    for e in 0..f.size() as Elem {
        let nf = normalize(sig, &s.apply(&f.witness(e)))?.to_string();
        let next = ids.len() as u32;
        labels.push(*ids.entry(nf).or_insert(next));
    }
    Ok(crate::finalg::Congruence::from_labels(&labels))
}

/// Checks the two unifier families against the catalog variety: σ1..σ3 for
/// xy = 0 and σ1..σ`family` for xy = x1, with instantiations searched up to
/// image length `bound` and exact congruences up to F(`exact_bound`).
pub fn verify_unifier_families(
    family: usize,
    bound: usize,
    exact_bound: usize,
) -> Result<FamilyReport> {
    use crate::variety::{finitely_present, free_algebra, FpRoute};
    let v = crate::catalog::builtin("willard", None)?;
    let sig = v.signature().clone();
    let ops = Ops::find(&sig)?;
    let vars = vec!["x".to_string(), "y".to_string()];
    let holds = |s: &Substitution, lhs: &Term, rhs: &Term| -> Result<bool> {
        equal_in_willard(&sig, &s.apply(lhs), &s.apply(rhs))
    };
    let xy = ops.mul(Term::var("x"), Term::var("y"));
    let x1 = ops.mul(Term::var("x"), Term::constant(ops.one));
    let zeros = zero_unifiers(&ops);
    let unify_xy_zero = zeros
        .iter()
        .map(|s| holds(s, &xy, &Term::constant(ops.zero)))
        .collect::<Result<Vec<_>>>()?;

    let f2 = free_algebra(&v, 2)?.with_names(vars.clone())?;
    let kernels = zeros
        .iter()
        .map(|s| substitution_kernel(&f2, &sig, s))
        .collect::<Result<Vec<_>>>()?;
    let exact_incomparable = (0..3).all(|i| (0..3).all(|j| i == j || !kernels[i].leq(&kernels[j])));

    let sigma = v.parse_identities("(x . y) = 0")?;
    let fp = finitely_present(&v, &sigma, &vars)?;
    let ks = crate::exactness::exact_kernels(&v, &fp, exact_bound)?;
    let minimal = ks.minimal();
    let FpRoute::Quotient { projection, .. } = &fp.route else {
        return Err(Error::InvalidParam(
            "expected a quotient presentation".into(),
        ));
    };
    let pulled: Vec<_> = minimal
        .iter()
        .map(|m| {
            let labels: Vec<u32> = projection.iter().map(|&p| m.block_of(p)).collect();
            crate::finalg::Congruence::from_labels(&labels)
        })
        .collect();
    let complete_at_bound =
        pulled.len() == kernels.len() && kernels.iter().all(|k| pulled.contains(k));

    let fam: Vec<Substitution> = (1..=family).map(|n| sigma_family(n, &ops)).collect();
    let unify_xy_x1 = fam
        .iter()
        .map(|s| holds(s, &xy, &x1))
        .collect::<Result<Vec<_>>>()?;
    let mut instantiations = Vec::new();
    for i in 0..family {
        for j in 0..family {
            if i != j {
                let found = find_instantiation(&sig, &fam[i], &fam[j], &vars, bound)?.is_some();
                instantiations.push((i + 1, j + 1, found));
            }
        }
    }
    Ok(FamilyReport {
        unify_xy_zero,
        exact_incomparable,
        minimal_exact: minimal.len(),
        exact_bound: ks.searched_up_to,
        complete_at_bound,
        unify_xy_x1,
        instantiations,
        bound,
    })
}

/// Searches σ' with every image of length at most `bound` such that
/// σ'(σ1(v)) = σ2(v) in the variety for each v in `vars`.
pub fn find_instantiation(
    sig: &Signature,
    s1: &Substitution,
    s2: &Substitution,
    vars: &[String],
    bound: usize,
) -> Result<Option<Substitution>> {
    let ops = Ops::find(sig)?;
    let mut names = Names::default();
    // Targets and sources as normal forms over a shared name table.
    let mut targets = Vec::new();
    let mut sources = Vec::new();
    for v in vars {
        let mut steps = Vec::new();
        targets.push(nf_of(&s2.image(v), &ops, &mut names, &mut steps)?);
        sources.push(s1.image(v));
    }
    let mut todo: Vec<String> = Vec::new();
    for s in &sources {
        s.vars_ordered(&mut todo);
    }
    let fresh = (0..)
        .map(|i| format!("u{i}"))
        .find(|f| names.get(f).is_none())
        .expect("fresh");
    names.intern(&fresh);
    for v in &todo {
        names.intern(v);
    }
    let pool: Vec<u16> = (0..names.names.len() as u16).collect();
    let mut cands = vec![Nf::Zero, Nf::One];
    for &h in &pool {
        let mut acc = Vec::new();
        words_over(&pool, bound, &mut vec![h], &mut acc);
        cands.extend(acc.into_iter().map(Nf::Word));
    }
    let mut assign: HashMap<String, Nf> = HashMap::new();
    let found = search_inst(&sources, &targets, 0, &cands, &ops, &mut assign)?;
    Ok(found.then(|| {
        Substitution::from_pairs(
            assign
                .iter()
                .map(|(k, v)| (k.clone(), nf_to_term(v, &names, &ops))),
        )
    }))
}

fn words_over(pool: &[u16], bound: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    out.push(cur.clone());
    if cur.len() >= bound {
        return;
    }
    if !(cur.len() > 1 && cur[cur.len() - 1] == ONE) {
        cur.push(ONE);
        words_over(pool, bound, cur, out);
        cur.pop();
    }
    for &v in pool {
        if cur[1..].contains(&v) {
            continue;
        }
        cur.push(v);
        words_over(pool, bound, cur, out);
        cur.pop();
    }
}

/// Value of a term under a partial assignment; `None` when some variable is unassigned.
fn eval_partial(t: &Term, ops: &Ops, assign: &HashMap<String, Nf>) -> Option<Nf> {
    match t {
        Term::Var(v) => assign.get(v).cloned(),
        Term::App(op, _) if *op == ops.zero => Some(Nf::Zero),
        Term::App(op, _) if *op == ops.one => Some(Nf::One),
        Term::App(_, args) => {
            let a = eval_partial(&args[0], ops, assign)?;
            let b = eval_partial(&args[1], ops, assign)?;
            Some(mul(&a, &b))
        }
    }
}

/// Left spine of a product, leftmost factor first.
fn spine(t: &Term, ops: &Ops) -> Vec<Term> {
    match t {
        Term::App(op, args) if *op == ops.mul => {
            let mut s = spine(&args[0], ops);
            s.push(args[1].clone());
            s
        }
        other => vec![other.clone()],
    }
}

fn is_prefix(p: &Nf, target: &Nf) -> bool {
    match (p, target) {
        (Nf::Word(a), Nf::Word(b)) => a.len() <= b.len() && b[..a.len()] == a[..],
        _ => false,
    }
}

fn search_inst(
    sources: &[Term],
    targets: &[Nf],
    k: usize,
    cands: &[Nf],
    ops: &Ops,
    assign: &mut HashMap<String, Nf>,
) -> Result<bool> {
    if k == sources.len() {
        return Ok(true);
    }
    let factors = spine(&sources[k], ops);
    let target = &targets[k];
    // Assign the variables of this source in spine order, pruning on prefixes:
    // a nonzero product of words only grows by appending letters.
    #[allow(clippy::too_many_arguments)]
    fn go(
        factors: &[Term],
        i: usize,
        acc: Option<Nf>,
        target: &Nf,
        cands: &[Nf],
        ops: &Ops,
        assign: &mut HashMap<String, Nf>,
        rest: &mut dyn FnMut(&mut HashMap<String, Nf>) -> Result<bool>,
    ) -> Result<bool> {
        if i == factors.len() {
            return if acc.as_ref() == Some(target) {
                rest(assign)
            } else {
                Ok(false)
            };
        }
        let mut vars = Vec::new();
        factors[i].vars_ordered(&mut vars);
        let free: Vec<String> = vars
            .into_iter()
            .filter(|v| !assign.contains_key(v))
            .collect();
        if free.is_empty() {
            let f = eval_partial(&factors[i], ops, assign).expect("assigned");
            let next = match &acc {
                None => f,
                Some(a) => mul(a, &f),
            };
            if matches!(target, Nf::Word(_)) && !is_prefix(&next, target) {
                return Ok(false);
            }
            return go(factors, i + 1, Some(next), target, cands, ops, assign, rest);
        }
        let v = free[0].clone();
        // A bare variable factor of a nonzero target is a prefix of it when it
        // heads the product and an atom otherwise; other values give 0.
        let narrowed: Vec<Nf>;
        let choices: &[Nf] = match (&factors[i], target) {
            (Term::Var(_), Nf::Word(t)) => {
                narrowed = cands
                    .iter()
                    .filter(|c| match (c, &acc) {
                        (Nf::Word(w), None) => w.len() <= t.len() && t[..w.len()] == w[..],
                        (Nf::Word(w), Some(_)) => w.len() == 1,
                        (Nf::One, Some(_)) => true,
                        _ => false,
                    })
                    .cloned()
                    .collect();
                &narrowed
            }
            _ => cands,
        };
        for c in choices {
            assign.insert(v.clone(), c.clone());
            if go(factors, i, acc.clone(), target, cands, ops, assign, rest)? {
                return Ok(true);
            }
        }
        assign.remove(&v);
        Ok(false)
    }
    let mut rest =
        |assign: &mut HashMap<String, Nf>| search_inst(sources, targets, k + 1, cands, ops, assign);
    let mut local = assign.clone();
    let ok = go(&factors, 0, None, target, cands, ops, &mut local, &mut rest)?;
    if ok {
        *assign = local;
    }
    Ok(ok)
}
