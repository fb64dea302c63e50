//! Oracles for integration tests, built only on operation tables and terms.

#![allow(dead_code)]

use std::collections::HashSet;

use exunif::finalg::{Elem, FiniteAlgebra};
use exunif::term::{Identity, Signature, Term};

/// All points of B^n in lexicographic order.
pub fn points(size: usize, n: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..size as Elem).map(move |e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
    }
    out
}

/// |F(n)| for V(B): n-ary term functions of B, by enumerating terms depth by
/// depth and keeping one per function until a depth adds nothing.
pub fn term_function_count(b: &FiniteAlgebra, n: usize) -> usize {
    let pts = points(b.size(), n);
    let sig = b.signature().clone();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut layer: Vec<Vec<Elem>> = Vec::new();
    for i in 0..n {
        layer.push(pts.iter().map(|p| p[i]).collect());
    }
    for c in sig.constants() {
        let v = b.apply(c, &[]);
        layer.push(vec![v; pts.len()]);
    }
    layer.retain(|f| seen.insert(f.clone()));
    let mut all: Vec<Vec<Elem>> = layer.clone();
    loop {
        let mut next = Vec::new();
        for op in 0..sig.len() {
            let k = sig.arity(op);
            if k == 0 {
                continue;
            }
            for args in tuples(all.len(), k) {
                let f: Vec<Elem> = (0..pts.len())
                    .map(|j| {
                        let a: Vec<Elem> = args.iter().map(|&i| all[i][j]).collect();
                        b.apply(op, &a)
                    })
                    .collect();
                if seen.insert(f.clone()) {
                    next.push(f);
                }
            }
        }
        if next.is_empty() {
            return all.len();
        }
        all.extend(next);
    }
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// All terms over `vars` and the operations of `sig` with depth <= `depth`.
pub fn terms_up_to(sig: &Signature, vars: &[String], depth: usize) -> Vec<Term> {
    let mut all: Vec<Term> = vars.iter().map(|v| Term::var(v)).collect();
    all.extend(sig.constants().map(Term::constant));
    for _ in 0..depth {
        let mut next = all.clone();
        for op in 0..sig.len() {
            let k = sig.arity(op);
            if k == 0 {
                continue;
            }
            for args in tuples(all.len(), k) {
                next.push(Term::App(
                    op,
                    args.iter().map(|&i| all[i].clone()).collect(),
                ));
            }
        }
        all = next;
        all.sort();
        all.dedup();
    }
    all
}

/// Whether `lhs = rhs` holds in every generator under every assignment of `vars`.
pub fn holds_in(gens: &[&FiniteAlgebra], lhs: &Term, rhs: &Term, vars: &[String]) -> bool {
    gens.iter().all(|b| {
        points(b.size(), vars.len()).iter().all(|p| {
            let env = |v: &str| vars.iter().position(|w| w == v).map(|i| p[i]);
            b.eval(lhs, &env).unwrap() == b.eval(rhs, &env).unwrap()
        })
    })
}

pub fn identity_holds(gens: &[&FiniteAlgebra], id: &Identity, vars: &[String]) -> bool {
    holds_in(gens, &id.lhs, &id.rhs, vars)
}
