//! Signatures, terms, identities, clauses and substitutions.

mod parse;
mod syntactic;

pub use parse::{parse_clause, parse_identities, parse_identity, parse_term};
pub use syntactic::{boolean_mgu, syntactic_mgu, BooleanOps};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type OpId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpDecl {
    pub symbol: String,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glyph: Option<String>,
}

impl OpDecl {
    pub fn new(symbol: &str, arity: usize) -> Self {
        OpDecl {
            symbol: symbol.to_string(),
            arity,
            infix: None,
            glyph: None,
        }
    }

    pub fn infix(mut self, glyph: &str) -> Self {
        self.infix = Some(glyph.to_string());
        self
    }

    pub fn glyph(mut self, glyph: &str) -> Self {
        self.glyph = Some(glyph.to_string());
        self
    }
}

/// Ordered operation symbols. Two signatures are compatible when their
/// (symbol, arity) lists agree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Signature {
    pub ops: Vec<OpDecl>,
    #[serde(skip)]
    by_symbol: HashMap<String, OpId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.ops.len() == other.ops.len()
            && self
                .ops
                .iter()
                .zip(&other.ops)
                .all(|(a, b)| a.symbol == b.symbol && a.arity == b.arity)
    }
}
impl Eq for Signature {}

impl Signature {
    pub fn new(ops: Vec<OpDecl>) -> Result<Self> {
        let mut by_symbol = HashMap::new();
        for (i, op) in ops.iter().enumerate() {
            if op.symbol.is_empty() || !is_ident(&op.symbol) {
                return Err(Error::InvalidParam(format!(
                    "operation symbol `{}` is not an identifier",
                    op.symbol
                )));
            }
            if op.infix.is_some() && op.arity != 2 {
                return Err(Error::InvalidParam(format!(
                    "infix glyph on non-binary `{}`",
                    op.symbol
                )));
            }
            if op.glyph.is_some() && op.arity != 0 {
                return Err(Error::InvalidParam(format!(
                    "constant glyph on non-constant `{}`",
                    op.symbol
                )));
            }
            if by_symbol.insert(op.symbol.clone(), i).is_some() {
                return Err(Error::InvalidParam(format!(
                    "duplicate symbol `{}`",
                    op.symbol
                )));
            }
        }
        Ok(Signature { ops, by_symbol })
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(self) -> Result<Self> {
        Signature::new(self.ops)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, id: OpId) -> &OpDecl {
        &self.ops[id]
    }

    pub fn arity(&self, id: OpId) -> usize {
        self.ops[id].arity
    }

    pub fn lookup(&self, symbol: &str) -> Option<OpId> {
        self.by_symbol.get(symbol).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = OpId> + '_ {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, o)| o.arity == 0)
            .map(|(i, _)| i)
    }

    pub fn has_constants(&self) -> bool {
        self.constants().next().is_some()
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    pub fn app(&self, symbol: &str, args: Vec<Term>) -> Term {
        let id = self
            .lookup(symbol)
            .unwrap_or_else(|| panic!("unknown symbol {symbol}"));
        assert_eq!(self.arity(id), args.len(), "arity of {symbol}");
        Term::App(id, args)
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(OpId, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(op: OpId) -> Term {
        Term::App(op, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    /// Variables in order of first occurrence.
    pub fn vars_ordered(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_ordered(out)),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.rename(f)).collect()),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }

    pub fn to_string(&self, sig: &Signature) -> String {
        self.display(sig).to_string()
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self.term, self.sig, f)
    }
}

fn write_term(t: &Term, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(v),
        Term::App(op, args) => {
            let decl = sig.op(*op);
            if let (Some(g), true) = (&decl.glyph, args.is_empty()) {
                return f.write_str(g);
            }
            if let (Some(g), 2) = (&decl.infix, args.len()) {
                f.write_str("(")?;
                write_term(&args[0], sig, f)?;
                write!(f, " {g} ")?;
                write_term(&args[1], sig, f)?;
                return f.write_str(")");
            }
            f.write_str(&decl.symbol)?;
            if !args.is_empty() {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_term(a, sig, f)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Identity { lhs, rhs }
    }

    pub fn vars_ordered(&self, out: &mut Vec<String>) {
        self.lhs.vars_ordered(out);
        self.rhs.vars_ordered(out);
    }

    pub fn to_string(&self, sig: &Signature) -> String {
        format!("{} = {}", self.lhs.display(sig), self.rhs.display(sig))
    }

    pub fn apply(&self, s: &Substitution) -> Identity {
        Identity::new(s.apply(&self.lhs), s.apply(&self.rhs))
    }
}

/// `premises => conclusions`; an empty conclusion set is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub premises: Vec<Identity>,
    pub conclusions: Vec<Identity>,
}

impl Clause {
    pub fn new(premises: Vec<Identity>, conclusions: Vec<Identity>) -> Self {
        Clause {
            premises: dedup(premises),
            conclusions: dedup(conclusions),
        }
    }

    /// Variables of premises then conclusions, by first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for id in self.premises.iter().chain(&self.conclusions) {
            id.vars_ordered(&mut out);
        }
        out
    }

    pub fn to_string(&self, sig: &Signature) -> String {
        let p: Vec<_> = self.premises.iter().map(|i| i.to_string(sig)).collect();
        let c: Vec<_> = self.conclusions.iter().map(|i| i.to_string(sig)).collect();
        format!("{} => {}", p.join(", "), c.join(" | "))
            .trim()
            .to_string()
    }
}

fn dedup(v: Vec<Identity>) -> Vec<Identity> {
    let mut out: Vec<Identity> = Vec::with_capacity(v.len());
    for id in v {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

/// A random term of depth at most `depth` over `vars` and the operations of `sig`.
pub fn random_term<R: rand::Rng>(
    sig: &Signature,
    vars: &[String],
    depth: usize,
    rng: &mut R,
) -> Term {
    let leaves = vars.len() + sig.constants().count();
    if depth == 0 || rng.gen_bool(0.3) {
        let i = rng.gen_range(0..leaves);
        return match vars.get(i) {
            Some(v) => Term::var(v),
            None => Term::constant(sig.constants().nth(i - vars.len()).expect("constant")),
        };
    }
    let ops: Vec<OpId> = (0..sig.len()).filter(|&o| sig.arity(o) > 0).collect();
    if ops.is_empty() {
        return Term::var(&vars[rng.gen_range(0..vars.len())]);
    }
    let op = ops[rng.gen_range(0..ops.len())];
    let args = (0..sig.arity(op))
        .map(|_| random_term(sig, vars, depth - 1, rng))
        .collect();
    Term::App(op, args)
}

pub fn random_identity<R: rand::Rng>(
    sig: &Signature,
    vars: &[String],
    depth: usize,
    rng: &mut R,
) -> Identity {
    Identity::new(
        random_term(sig, vars, depth, rng),
        random_term(sig, vars, depth, rng),
    )
}

pub fn identities_vars(ids: &[Identity]) -> Vec<String> {
    let mut out = Vec::new();
    for id in ids {
        id.vars_ordered(&mut out);
    }
    out
}

/// Finite map from variables to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, Term)>>(pairs: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s.insert(v, t);
        }
        s
    }

    /// Identity bindings `x -> x` are dropped.
    pub fn insert(&mut self, v: String, t: Term) {
        if t == Term::Var(v.clone()) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn image(&self, v: &str) -> Term {
        self.map.get(v).cloned().unwrap_or_else(|| Term::var(v))
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.image(v),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// `self.compose(other)` is `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &other.map {
            out.insert(v.clone(), self.apply(t));
        }
        for (v, t) in &self.map {
            if !other.map.contains_key(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        out
    }

    pub fn to_string(&self, sig: &Signature) -> String {
        let parts: Vec<_> = self
            .map
            .iter()
            .map(|(v, t)| format!("{v} -> {}", t.display(sig)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

pub fn apply_substitution(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}

pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    s1.compose(s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Signature {
        Signature::new(vec![
            OpDecl::new("meet", 2).infix("/\\"),
            OpDecl::new("join", 2).infix("\\/"),
            OpDecl::new("f", 1),
            OpDecl::new("c", 0),
        ])
        .unwrap()
    }

    #[test]
    fn simultaneous_application() {
        let sig = lat();
        let s = Substitution::from_pairs([
            ("x".to_string(), Term::var("y")),
            ("y".to_string(), Term::var("x")),
        ]);
        let t = parse_term(&sig, "(x /\\ y)").unwrap();
        assert_eq!(s.apply(&t).to_string(&sig), "(y /\\ x)");
    }

    #[test]
    fn compose_order() {
        let sig = lat();
        let s1 = Substitution::from_pairs([("y".to_string(), parse_term(&sig, "f(z)").unwrap())]);
        let s2 = Substitution::from_pairs([("x".to_string(), parse_term(&sig, "f(y)").unwrap())]);
        let t = Term::var("x");
        let c = s1.compose(&s2);
        assert_eq!(c.apply(&t), s1.apply(&s2.apply(&t)));
        assert_eq!(c.apply(&t).to_string(&sig), "f(f(z))");
    }

    #[test]
    fn clause_dedups_and_prints() {
        let sig = lat();
        let c = parse_clause(&sig, "x = y, x = y => f(x) = c | f(x) = c").unwrap();
        assert_eq!(c.premises.len(), 1);
        assert_eq!(c.conclusions.len(), 1);
        assert_eq!(c.to_string(&sig), "x = y => f(x) = c");
    }

    #[test]
    fn signature_rejects_duplicates() {
        assert!(Signature::new(vec![OpDecl::new("f", 1), OpDecl::new("f", 2)]).is_err());
    }
}
