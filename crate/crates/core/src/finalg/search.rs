//! Backtracking homomorphism search over a generating set of the source.
//!
//! Generators are assigned one at a time. After generator `j` is placed, the
//! images of every element of Sg(g_0..g_j) follow from recipes, and the
//! checks attached to that stage are run.

use super::{for_each_tuple, Elem, FiniteAlgebra, Recipe};
use crate::error::{Error, Result};
use crate::par;
use crate::term::{OpId, Term};

const NONE: Elem = Elem::MAX;

#[derive(Clone, Debug)]
enum Instr {
    Gen(usize),
    Op(OpId, Vec<usize>),
}

/// A term compiled to a straight-line program over generator indices.
#[derive(Clone, Debug)]
pub(crate) struct Prog {
    instrs: Vec<Instr>,
    max_gen: Option<usize>,
}

impl Prog {
    pub fn compile(t: &Term, var_index: &dyn Fn(&str) -> Option<usize>) -> Result<Prog> {
        let mut p = Prog {
            instrs: Vec::new(),
            max_gen: None,
        };
        p.emit(t, var_index)?;
        Ok(p)
    }

    fn emit(&mut self, t: &Term, var_index: &dyn Fn(&str) -> Option<usize>) -> Result<usize> {
        match t {
            Term::Var(v) => {
                let g = var_index(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
                self.max_gen = Some(self.max_gen.map_or(g, |m| m.max(g)));
                self.instrs.push(Instr::Gen(g));
            }
            Term::App(op, args) => {
                let slots = args
                    .iter()
                    .map(|a| self.emit(a, var_index))
                    .collect::<Result<Vec<_>>>()?;
                self.instrs.push(Instr::Op(*op, slots));
            }
        }
        Ok(self.instrs.len() - 1)
    }

    fn eval(&self, target: &FiniteAlgebra, gen_img: &[Elem], scratch: &mut Vec<Elem>) -> Elem {
        scratch.clear();
        let mut args = Vec::new();
        for ins in &self.instrs {
            let v = match ins {
                Instr::Gen(g) => gen_img[*g],
                Instr::Op(op, slots) => {
                    args.clear();
                    args.extend(slots.iter().map(|&s| scratch[s]));
                    target.apply(*op, &args)
                }
            };
            scratch.push(v);
        }
        *scratch.last().expect("nonempty program")
    }
}

#[derive(Clone, Debug)]
/// `lhs == rhs` evaluated in the target.
pub(crate) struct Relation {
    pub lhs: Prog,
    pub rhs: Prog,
}

impl Relation {
    fn stage(&self) -> usize {
        match self.lhs.max_gen.max(self.rhs.max_gen) {
            Some(g) => g + 1,
            None => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TableChecks {
    /// Check every operation entry; sound for any target.
    All,
    /// Trust relations; additionally check stages whose subuniverse is at most this large.
    UpTo(usize),
}

/// Per-stage work for a fixed source algebra and generating sequence.
#[derive(Clone, Debug)]
pub(crate) struct SourcePlan {
    size: usize,
    gens: Vec<Elem>,
    /// Index 0 holds the constant closure; index j+1 the elements new after generator j.
    stages: Vec<Vec<Elem>>,
    /// For a generator already in the previous subuniverse, that element.
    forced: Vec<Option<Elem>>,
    recipe: Vec<Recipe>,
    table_checks: Vec<Vec<(OpId, Vec<Elem>, Elem)>>,
    relations: Vec<Vec<Relation>>,
}

impl SourcePlan {
    pub fn new(
        a: &FiniteAlgebra,
        gens: &[Elem],
        relations: Vec<Relation>,
        tables: TableChecks,
    ) -> Result<SourcePlan> {
        let n = a.size();
        let sig = a.signature().clone();
        let k = gens.len();
        let mut recipe: Vec<Option<Recipe>> = vec![None; n];
        let mut in_set = vec![false; n];
        let mut list: Vec<Elem> = Vec::new();
        let mut stages: Vec<Vec<Elem>> = Vec::with_capacity(k + 1);
        let mut forced = Vec::with_capacity(k);
        let mut table_checks = Vec::with_capacity(k + 1);
        let ops: Vec<(OpId, usize)> = (0..sig.len()).map(|o| (o, sig.arity(o))).collect();

        for stage in 0..=k {
            let start = list.len();
            if stage > 0 {
                let g = gens[stage - 1];
                a.check(g)?;
                if in_set[g as usize] {
                    forced.push(Some(g));
                } else {
                    forced.push(None);
                    in_set[g as usize] = true;
                    recipe[g as usize] = Some(Recipe::Gen(stage - 1));
                    list.push(g);
                }
            } else {
                for &(op, ar) in &ops {
                    if ar == 0 {
                        let c = a.apply(op, &[]);
                        if !in_set[c as usize] {
                            in_set[c as usize] = true;
                            recipe[c as usize] = Some(Recipe::Op(op, Vec::new()));
                            list.push(c);
                        }
                    }
                }
            }
            // Semi-naive closure: element at position p combines with 0..=p.
            let mut p = start;
            while p < list.len() {
                let limit = p + 1;
                for &(op, ar) in &ops {
                    if ar == 0 {
                        continue;
                    }
                    let mut pos = vec![0; ar];
                    for_each_tuple(limit, &mut pos, &mut |t| {
                        if !t.iter().any(|&i| i as usize == p) {
                            return;
                        }
                        let args: Vec<Elem> = t.iter().map(|&i| list[i as usize]).collect();
                        let r = a.apply(op, &args);
                        if !in_set[r as usize] {
                            in_set[r as usize] = true;
                            recipe[r as usize] = Some(Recipe::Op(op, args));
                            list.push(r);
                        }
                    });
                }
                p += 1;
            }
            let new: Vec<Elem> = list[start..].to_vec();
            let check_tables = match tables {
                TableChecks::All => true,
                TableChecks::UpTo(t) => list.len() <= t,
            };
            let mut checks = Vec::new();
            if check_tables && !new.is_empty() {
                let mut is_new = vec![false; n];
                new.iter().for_each(|&e| is_new[e as usize] = true);
                let cur = list.len();
                for &(op, ar) in &ops {
                    if ar == 0 {
                        if stage == 0 {
                            checks.push((op, Vec::new(), a.apply(op, &[])));
                        }
                        continue;
                    }
                    let mut pos = vec![0; ar];
                    for_each_tuple(cur, &mut pos, &mut |t| {
                        let args: Vec<Elem> = t.iter().map(|&i| list[i as usize]).collect();
                        if !args.iter().any(|&e| is_new[e as usize]) {
                            return;
                        }
                        let r = a.apply(op, &args);
                        if recipe[r as usize] == Some(Recipe::Op(op, args.clone())) {
                            return;
                        }
                        checks.push((op, args, r));
                    });
                }
            }
            stages.push(new);
            table_checks.push(checks);
        }
        if list.len() != n {
            return Err(Error::InvalidParam(format!(
                "generators span {} of {} elements",
                list.len(),
                n
            )));
        }
        let mut rel_stages: Vec<Vec<Relation>> = vec![Vec::new(); k + 1];
        for r in relations {
            let s = r.stage();
            rel_stages[s].push(r);
        }
        Ok(SourcePlan {
            size: n,
            gens: gens.to_vec(),
            stages,
            forced,
            recipe: recipe.into_iter().map(|r| r.expect("covered")).collect(),
            table_checks,
            relations: rel_stages,
        })
    }
}

#[derive(Clone)]
struct State {
    img: Vec<Elem>,
    gen_img: Vec<Elem>,
    owner: Vec<Elem>,
    scratch: Vec<Elem>,
}

pub(crate) struct Search<'a> {
    plan: &'a SourcePlan,
    target: &'a FiniteAlgebra,
    pub injective: bool,
    pub surjective: bool,
    constraints: Vec<Elem>,
}

impl<'a> Search<'a> {
    pub fn new(plan: &'a SourcePlan, target: &'a FiniteAlgebra) -> Self {
        Search {
            plan,
            target,
            injective: false,
            surjective: false,
            constraints: vec![NONE; plan.size],
        }
    }

    pub fn constrain(&mut self, source: Elem, target: Elem) {
        self.constraints[source as usize] = target;
    }

    fn fresh_state(&self) -> State {
        State {
            img: vec![NONE; self.plan.size],
            gen_img: vec![NONE; self.plan.gens.len()],
            owner: vec![
                NONE;
                if self.injective {
                    self.target.size()
                } else {
                    0
                }
            ],
            scratch: Vec::new(),
        }
    }

    /// Assigns images for stage `s` (0 = constants). Leaves partial state on failure.
    fn assign(&self, st: &mut State, s: usize) -> bool {
        let mut args = Vec::new();
        for &e in &self.plan.stages[s] {
            let v = match &self.plan.recipe[e as usize] {
                Recipe::Gen(j) => st.gen_img[*j],
                Recipe::Op(op, a) => {
                    args.clear();
                    args.extend(a.iter().map(|&x| st.img[x as usize]));
                    self.target.apply(*op, &args)
                }
            };
            let c = self.constraints[e as usize];
            if c != NONE && c != v {
                return false;
            }
            if self.injective {
                if st.owner[v as usize] != NONE {
                    return false;
                }
                st.owner[v as usize] = e;
            }
            st.img[e as usize] = v;
        }
        for (op, a, r) in &self.plan.table_checks[s] {
            args.clear();
            args.extend(a.iter().map(|&x| st.img[x as usize]));
            if self.target.apply(*op, &args) != st.img[*r as usize] {
                return false;
            }
        }
        for rel in &self.plan.relations[s] {
            let l = rel.lhs.eval(self.target, &st.gen_img, &mut st.scratch);
            let r = rel.rhs.eval(self.target, &st.gen_img, &mut st.scratch);
            if l != r {
                return false;
            }
        }
        true
    }

    fn undo(&self, st: &mut State, s: usize) {
        for &e in &self.plan.stages[s] {
            let v = st.img[e as usize];
            if v == NONE {
                continue;
            }
            if self.injective && st.owner[v as usize] == e {
                st.owner[v as usize] = NONE;
            }
            st.img[e as usize] = NONE;
        }
    }

    fn candidates(&self, st: &State, j: usize) -> Vec<Elem> {
        if let Some(f) = self.plan.forced[j] {
            return vec![st.img[f as usize]];
        }
        let c = self.constraints[self.plan.gens[j] as usize];
        if c != NONE {
            vec![c]
        } else {
            (0..self.target.size() as Elem).collect()
        }
    }

    fn try_gen(&self, st: &mut State, j: usize, b: Elem) -> bool {
        st.gen_img[j] = b;
        if self.assign(st, j + 1) {
            true
        } else {
            self.undo(st, j + 1);
            false
        }
    }

    fn leave_gen(&self, st: &mut State, j: usize) {
        self.undo(st, j + 1);
        st.gen_img[j] = NONE;
    }

    fn finish(&self, st: &State) -> bool {
        if !self.surjective {
            return true;
        }
        let mut hit = vec![false; self.target.size()];
        st.img.iter().for_each(|&v| hit[v as usize] = true);
        hit.into_iter().all(|h| h)
    }

    /// Returns false when `visit` asked to stop.
    fn dfs(&self, st: &mut State, j: usize, visit: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
        if j == self.plan.gens.len() {
            return !self.finish(st) || visit(&st.img);
        }
        for b in self.candidates(st, j) {
            if self.try_gen(st, j, b) {
                let go = self.dfs(st, j + 1, visit);
                self.leave_gen(st, j);
                if !go {
                    return false;
                }
            }
        }
        true
    }

    /// State after constants and forced leading stages, plus the first branching generator.
    fn base(&self) -> Option<(State, usize)> {
        if self.injective && self.plan.size > self.target.size() {
            return None;
        }
        if self.surjective && self.plan.size < self.target.size() {
            return None;
        }
        let mut st = self.fresh_state();
        if !self.assign(&mut st, 0) {
            return None;
        }
        let mut j = 0;
        while j < self.plan.gens.len() {
            let c = self.candidates(&st, j);
            if c.len() != 1 {
                break;
            }
            if !self.try_gen(&mut st, j, c[0]) {
                return None;
            }
            j += 1;
        }
        Some((st, j))
    }

    /// Runs `visit` over all solutions, splitting work on the first free generator.
    /// Accumulators come back in candidate order.
    pub fn fold<A, I, F>(&self, init: I, step: F) -> Vec<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &[Elem]) + Sync + Send,
    {
        let Some((base, j)) = self.base() else {
            return Vec::new();
        };
        if j == self.plan.gens.len() {
            let mut acc = init();
            if self.finish(&base) {
                step(&mut acc, &base.img);
            }
            return vec![acc];
        }
        let cands = self.candidates(&base, j);
        par::map(&cands, |&b| {
            let mut acc = init();
            let mut st = base.clone();
            if self.try_gen(&mut st, j, b) {
                self.dfs(&mut st, j + 1, &mut |img| {
                    step(&mut acc, img);
                    true
                });
            }
            acc
        })
    }

    pub fn collect<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[Elem]) -> Option<T> + Sync + Send,
    {
        self.fold(Vec::new, |acc: &mut Vec<T>, img| {
            if let Some(t) = f(img) {
                acc.push(t);
            }
        })
        .into_iter()
        .flatten()
        .collect()
    }

    pub fn all(&self) -> Vec<Vec<Elem>> {
        self.collect(|img| Some(img.to_vec()))
    }

    #[cfg(test)]
    pub fn count(&self) -> usize {
        self.fold(|| 0usize, |c, _| *c += 1).into_iter().sum()
    }

    /// First solution in search order (generator images lexicographic).
    pub fn first(&self) -> Option<Vec<Elem>> {
        self.first_where(|_| true)
    }

    pub fn first_where<F>(&self, pred: F) -> Option<Vec<Elem>>
    where
        F: Fn(&[Elem]) -> bool + Sync + Send,
    {
        let (base, j) = self.base()?;
        if j == self.plan.gens.len() {
            return (self.finish(&base) && pred(&base.img)).then(|| base.img.clone());
        }
        let cands = self.candidates(&base, j);
        par::find_map_first(cands.len(), |i| {
            let mut st = base.clone();
            let mut found = None;
            if self.try_gen(&mut st, j, cands[i]) {
                self.dfs(&mut st, j + 1, &mut |img| {
                    if pred(img) {
                        found = Some(img.to_vec());
                        false
                    } else {
                        true
                    }
                });
            }
            found
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalg::product;
    use crate::finalg::tests::chain;

    #[test]
    fn chain_endomorphisms() {
        // Lattice endomorphisms of a 3-chain are the monotone maps: 10.
        let c3 = chain(3);
        let plan = SourcePlan::new(&c3, &[0, 1, 2], Vec::new(), TableChecks::All).unwrap();
        assert_eq!(Search::new(&plan, &c3).count(), 10);
        let mut s = Search::new(&plan, &c3);
        s.injective = true;
        assert_eq!(s.all(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn generators_must_span() {
        let c2 = chain(2);
        let sq = product(&[&c2, &c2]).unwrap();
        assert!(SourcePlan::new(&sq, &[1], Vec::new(), TableChecks::All).is_err());
        let plan = SourcePlan::new(&sq, &[1, 2], Vec::new(), TableChecks::All).unwrap();
        // Homs from the free distributive lattice on 2 generators into 2: any pair.
        assert_eq!(Search::new(&plan, &c2).count(), 4);
    }

    #[test]
    fn first_respects_order() {
        let c3 = chain(3);
        let plan = SourcePlan::new(&c3, &[0, 1, 2], Vec::new(), TableChecks::All).unwrap();
        let s = Search::new(&plan, &c3);
        assert_eq!(s.first(), Some(vec![0, 0, 0]));
        let all = s.all();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }
}
