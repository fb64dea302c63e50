use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use super::{for_each_tuple, Elem, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Returns true when `a` and `b` were in different classes.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

/// A partition in canonical block-index form: blocks are numbered by first
/// occurrence, so element 0 is always in block 0.
#[derive(
    Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct Congruence {
    blocks: Vec<u32>,
}

impl Congruence {
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut map = std::collections::HashMap::new();
        let blocks = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { blocks }
    }

    pub fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.parent.len();
        let labels: Vec<u32> = (0..n as u32).map(|x| uf.find(x)).collect();
        Congruence::from_labels(&labels)
    }

    pub fn identity(n: usize) -> Self {
        Congruence {
            blocks: (0..n as u32).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence { blocks: vec![0; n] }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn block_of(&self, e: Elem) -> u32 {
        self.blocks[e as usize]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
            .iter()
            .map(|&b| b as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.blocks[a as usize] == self.blocks[b as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_total(&self) -> bool {
        self.num_blocks() <= 1
    }

    /// Least element of each block, in block order.
    pub fn representatives(&self) -> Vec<Elem> {
        let mut reps = vec![u32::MAX; self.num_blocks()];
        for (e, &b) in self.blocks.iter().enumerate() {
            if reps[b as usize] == u32::MAX {
                reps[b as usize] = e as Elem;
            }
        }
        reps
    }

    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (e, &b) in self.blocks.iter().enumerate() {
            out[b as usize].push(e as Elem);
        }
        out
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn leq(&self, other: &Congruence) -> bool {
        let mut img = vec![u32::MAX; self.num_blocks()];
        for (e, &b) in self.blocks.iter().enumerate() {
            let o = other.blocks[e];
            let slot = &mut img[b as usize];
            if *slot == u32::MAX {
                *slot = o;
            } else if *slot != o {
                return false;
            }
        }
        true
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.size());
        for c in [self, other] {
            let reps = c.representatives();
            for (e, &b) in c.blocks.iter().enumerate() {
                uf.union(e as u32, reps[b as usize]);
            }
        }
        Congruence::from_union_find(&mut uf)
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let n = other.num_blocks() as u32;
        let labels: Vec<u32> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(&a, &b)| a * n + b)
            .collect();
        Congruence::from_labels(&labels)
    }

    /// Relational composition is the total relation: for all a, b there is c
    /// with a self c and c other b.
    pub fn permutes_to_total(&self, other: &Congruence) -> bool {
        let nb = other.num_blocks();
        let mut hit = vec![false; self.num_blocks() * nb];
        for e in 0..self.size() {
            hit[self.blocks[e] as usize * nb + other.blocks[e] as usize] = true;
        }
        hit.iter().all(|&h| h)
    }

    /// Whether the partition is preserved by every operation of `a`.
    pub fn is_compatible(&self, a: &FiniteAlgebra) -> bool {
        let sig = a.signature();
        let reps = self.representatives();
        for op in 0..sig.len() {
            let k = sig.arity(op);
            if k == 0 {
                continue;
            }
            let mut args = vec![0; k];
            let mut ok = true;
            for_each_tuple(a.size(), &mut args, &mut |t| {
                if !ok {
                    return;
                }
                let base = self.blocks[a.apply(op, t) as usize];
                let mut u = t.to_vec();
                for i in 0..k {
                    let orig = u[i];
                    u[i] = reps[self.blocks[orig as usize] as usize];
                    if self.blocks[a.apply(op, &u) as usize] != base {
                        ok = false;
                        return;
                    }
                    u[i] = orig;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn pairs_label(&self) -> String {
        let parts: Vec<String> = self
            .classes()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let s: Vec<String> = c.iter().map(|e| e.to_string()).collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        if parts.is_empty() {
            "Δ".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Least congruence containing `pairs`.
pub fn congruence_generated(a: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    let mut uf = UnionFind::new(a.size());
    close_union_find(a, &mut uf, pairs);
    Congruence::from_union_find(&mut uf)
}

/// Closes a union-find under the operations of `a`, seeded by `pairs`.
pub(crate) fn close_union_find(a: &FiniteAlgebra, uf: &mut UnionFind, pairs: &[(Elem, Elem)]) {
    let sig = a.signature().clone();
    let n = a.size();
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    for &(x, y) in pairs {
        if uf.union(x, y) {
            work.push((x, y));
        }
    }
    let ops: Vec<(usize, usize)> = (0..sig.len())
        .map(|op| (op, sig.arity(op)))
        .filter(|&(_, k)| k > 0)
        .collect();
    while let Some((x, y)) = work.pop() {
        for &(op, k) in &ops {
            if k == 1 {
                let (fx, fy) = (a.apply(op, &[x]), a.apply(op, &[y]));
                if uf.union(fx, fy) {
                    work.push((fx, fy));
                }
                continue;
            }
            if k == 2 {
                for c in 0..n as Elem {
                    let (p, q) = (a.apply2(op, x, c), a.apply2(op, y, c));
                    if uf.union(p, q) {
                        work.push((p, q));
                    }
                    let (p, q) = (a.apply2(op, c, x), a.apply2(op, c, y));
                    if uf.union(p, q) {
                        work.push((p, q));
                    }
                }
                continue;
            }
            let mut rest = vec![0; k - 1];
            for pos in 0..k {
                for_each_tuple(n, &mut rest, &mut |r| {
                    let mut u: Vec<Elem> = Vec::with_capacity(k);
                    u.extend_from_slice(&r[..pos]);
                    u.push(x);
                    u.extend_from_slice(&r[pos..]);
                    let p = a.apply(op, &u);
                    u[pos] = y;
                    let q = a.apply(op, &u);
                    if uf.union(p, q) {
                        work.push((p, q));
                    }
                });
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CongruenceOptions {
    /// Up to this size the partition filter is used.
    pub partition_cap: usize,
    /// Maximum number of congruences before giving up.
    pub max_count: usize,
}

impl Default for CongruenceOptions {
    fn default() -> Self {
        CongruenceOptions {
            partition_cap: 12,
            max_count: 200_000,
        }
    }
}

/// Con(A), ordered by decreasing number of blocks and then lexicographically
/// (so Δ comes first and ∇ last).
pub fn all_congruences(a: &FiniteAlgebra, opts: CongruenceOptions) -> Result<Vec<Congruence>> {
    if a.size() <= opts.partition_cap {
        all_congruences_by_partitions(a, opts.max_count)
    } else {
        all_congruences_by_joins(a, opts.max_count)
    }
}

fn canonical_sort(v: &mut [Congruence]) {
    v.sort_by(|x, y| {
        y.num_blocks()
            .cmp(&x.num_blocks())
            .then_with(|| x.blocks.cmp(&y.blocks))
    });
}

/// Enumerates restricted growth strings, pruning as soon as an operation
/// entry with fully assigned arguments and result breaks compatibility.
pub fn all_congruences_by_partitions(
    a: &FiniteAlgebra,
    max_count: usize,
) -> Result<Vec<Congruence>> {
    let n = a.size();
    let sig = a.signature().clone();
    let ops: Vec<(usize, usize)> = (0..sig.len())
        .map(|op| (op, sig.arity(op)))
        .filter(|&(_, k)| k > 0)
        .collect();
    let mut out = Vec::new();
    let mut blocks = vec![0u32; n];
    fn consistent(a: &FiniteAlgebra, ops: &[(usize, usize)], blocks: &[u32], upto: usize) -> bool {
        // Check pairs (x, upto) with x < upto in the same block against all
        // argument tuples drawn from 0..=upto whose images are assigned.
        let i = upto as Elem;
        for x in 0..upto as Elem {
            if blocks[x as usize] != blocks[upto] {
                continue;
            }
            for &(op, k) in ops {
                let mut rest = vec![0; k - 1];
                let mut ok = true;
                for pos in 0..k {
                    for_each_tuple(upto + 1, &mut rest, &mut |r| {
                        if !ok {
                            return;
                        }
                        let mut u: Vec<Elem> = Vec::with_capacity(k);
                        u.extend_from_slice(&r[..pos]);
                        u.push(x);
                        u.extend_from_slice(&r[pos..]);
                        let p = a.apply(op, &u);
                        u[pos] = i;
                        let q = a.apply(op, &u);
                        if p as usize <= upto
                            && q as usize <= upto
                            && blocks[p as usize] != blocks[q as usize]
                        {
                            ok = false;
                        }
                    });
                }
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    fn rec(
        a: &FiniteAlgebra,
        ops: &[(usize, usize)],
        blocks: &mut Vec<u32>,
        i: usize,
        used: u32,
        out: &mut Vec<Congruence>,
        max_count: usize,
    ) -> Result<()> {
        let n = blocks.len();
        if i == n {
            let c = Congruence {
                blocks: blocks.clone(),
            };
            if c.is_compatible(a) {
                if out.len() >= max_count {
                    return Err(Error::CapExceeded(format!(
                        "more than {max_count} congruences"
                    )));
                }
                out.push(c);
            }
            return Ok(());
        }
        for b in 0..=used {
            blocks[i] = b;
            if consistent(a, ops, blocks, i) {
                rec(a, ops, blocks, i + 1, used.max(b + 1), out, max_count)?;
            }
        }
        Ok(())
    }
    if n > 0 {
        blocks[0] = 0;
        rec(a, &ops, &mut blocks, 1, 1, &mut out, max_count)?;
    }
    canonical_sort(&mut out);
    Ok(out)
}

/// Principal congruences closed under joins.
pub fn all_congruences_by_joins(a: &FiniteAlgebra, max_count: usize) -> Result<Vec<Congruence>> {
    let n = a.size();
    let pairs: Vec<(Elem, Elem)> = (0..n as Elem)
        .flat_map(|x| (x + 1..n as Elem).map(move |y| (x, y)))
        .collect();
    let principal: Vec<Congruence> = par::map(&pairs, |&(x, y)| congruence_generated(a, &[(x, y)]));
    let mut seen: HashSet<Congruence> = HashSet::new();
    let mut gens: Vec<Congruence> = Vec::new();
    for p in principal {
        if seen.insert(p.clone()) {
            gens.push(p);
        }
    }
    let id = Congruence::identity(n);
    seen.insert(id.clone());
    let mut all: Vec<Congruence> = seen.iter().cloned().collect();
    all.sort();
    let mut frontier = gens.clone();
    while !frontier.is_empty() {
        let joins: Vec<Vec<Congruence>> =
            par::map(&frontier, |t| gens.iter().map(|g| t.join(g)).collect());
        let mut next = Vec::new();
        for batch in joins {
            for j in batch {
                if !seen.contains(&j) {
                    if seen.len() >= max_count {
                        return Err(Error::CapExceeded(format!(
                            "more than {max_count} congruences"
                        )));
                    }
                    seen.insert(j.clone());
                    next.push(j);
                }
            }
        }
        next.sort();
        frontier = next;
    }
    let mut out: Vec<Congruence> = seen.into_iter().collect();
    canonical_sort(&mut out);
    Ok(out)
}

/// Inclusion-minimal members, in input order.
pub fn minimal_elements(set: &[Congruence]) -> Vec<Congruence> {
    let uniq: BTreeSet<&Congruence> = set.iter().collect();
    let mut out = Vec::new();
    let mut emitted = HashSet::new();
    for c in set {
        let below = uniq.iter().any(|d| *d != c && d.leq(c));
        if !below && emitted.insert(c) {
            out.push(c.clone());
        }
    }
    out
}

/// Hasse diagram of a congruence lattice; nodes are labeled by block count.
pub fn export_con_dot(cons: &[Congruence]) -> String {
    let mut s = String::from("digraph con {\n  rankdir=BT;\n");
    for (i, c) in cons.iter().enumerate() {
        let _ = writeln!(s, "  n{i} [label=\"{}\"];", c.num_blocks());
    }
    for (i, c) in cons.iter().enumerate() {
        for (j, d) in cons.iter().enumerate() {
            if i == j || c == d || !c.leq(d) {
                continue;
            }
            let covered = !cons
                .iter()
                .any(|e| e != c && e != d && c.leq(e) && e.leq(d));
            if covered {
                let _ = writeln!(s, "  n{i} -> n{j};");
            }
        }
    }
    s.push_str("}\n");
    s
}
