//! Unifiers as homomorphisms F(X) -> F(n), compared by kernel inclusion (⊑)
//! and by factoring (≼), and the exact type of Σ from unifier kernels.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactness::{fresh_names, prefilter, relation_plan, work, WORK_CAP};
use crate::finalg::search::{Search, SourcePlan, TableChecks};
use crate::finalg::{all_congruences, minimal_elements, quotient, Congruence, Elem};
use crate::preorder::TypeTag;
use crate::term::{Identity, Substitution};
use crate::variety::{
    finitely_present_quotient, free_algebra, sigma_congruence, FreeAlgebra, VarietySpec,
};

/// A V-unifier of Σ over X, as the homomorphism u: F(X) -> F(n) it induces.
#[derive(Clone, Debug, Serialize)]
pub struct SemanticUnifier {
    #[serde(skip)]
    pub sigma: Vec<Identity>,
    pub vars: Vec<String>,
    pub n: usize,
    /// u(x) for each x in `vars`, as elements of F(n).
    pub images: Vec<Elem>,
    /// u on all of F(X).
    #[serde(skip)]
    pub map: Vec<Elem>,
    pub kernel: Congruence,
    /// x -> witness term of u(x) over the codomain names.
    #[serde(skip)]
    pub substitution: Substitution,
    pub codomain_names: Vec<String>,
}

fn free_over(v: &VarietySpec, vars: &[String]) -> Result<FreeAlgebra> {
    free_algebra(v, vars.len())?.with_names(vars.to_vec())
}

fn codomain(v: &VarietySpec, n: usize, vars: &[String]) -> Result<FreeAlgebra> {
    free_algebra(v, n)?.with_names(fresh_names(n, vars))
}

impl SemanticUnifier {
    fn build(
        fx: &FreeAlgebra,
        fn_: &FreeAlgebra,
        sigma: &[Identity],
        images: Vec<Elem>,
    ) -> SemanticUnifier {
        let map = fx.extend(fn_.algebra(), &images);
        let substitution = Substitution::from_pairs(
            fx.names()
                .iter()
                .zip(&images)
                .map(|(x, &e)| (x.clone(), fn_.witness(e))),
        );
        SemanticUnifier {
            sigma: sigma.to_vec(),
            vars: fx.names().to_vec(),
            n: fn_.rank(),
            kernel: Congruence::from_labels(&map),
            images,
            map,
            substitution,
            codomain_names: fn_.names().to_vec(),
        }
    }

    /// The unifier sending `vars[i]` to `images[i]` in F(n) (fresh codomain names).
    pub fn from_images(
        v: &VarietySpec,
        sigma: &[Identity],
        vars: &[String],
        n: usize,
        images: Vec<Elem>,
    ) -> Result<SemanticUnifier> {
        let fx = free_over(v, vars)?;
        let fn_ = codomain(v, n, vars)?;
        if images.len() != vars.len() || images.iter().any(|&e| e as usize >= fn_.size()) {
            return Err(Error::InvalidParam("unifier images".into()));
        }
        let u = Self::build(&fx, &fn_, sigma, images);
        u.validate(v)?;
        Ok(u)
    }

    /// The unifier induced by a substitution whose images use `codomain_vars`.
    pub fn from_substitution(
        v: &VarietySpec,
        sigma: &[Identity],
        vars: &[String],
        subst: &Substitution,
        codomain_vars: &[String],
    ) -> Result<SemanticUnifier> {
        let fx = free_over(v, vars)?;
        let fn_ = free_algebra(v, codomain_vars.len())?.with_names(codomain_vars.to_vec())?;
        let images = vars
            .iter()
            .map(|x| fn_.eval(&subst.image(x)))
            .collect::<Result<Vec<_>>>()?;
        let u = Self::build(&fx, &fn_, sigma, images);
        u.validate(v)?;
        Ok(u)
    }

    pub fn codomain(&self, v: &VarietySpec) -> Result<FreeAlgebra> {
        free_algebra(v, self.n)?.with_names(self.codomain_names.clone())
    }

    /// Re-checks that the stored map is the homomorphism extending `images`,
    /// that Σ holds under it and that `kernel` is its kernel.
    pub fn validate(&self, v: &VarietySpec) -> Result<()> {
        let fx = free_over(v, &self.vars)?;
        let fn_ = self.codomain(v)?;
        if fx.extend(fn_.algebra(), &self.images) != self.map {
            return Err(Error::NotHomomorphism(
                "unifier map differs from its extension".into(),
            ));
        }
        if Congruence::from_labels(&self.map) != self.kernel {
            return Err(Error::NotHomomorphism(
                "stored kernel is not the kernel of the map".into(),
            ));
        }
        for Identity { lhs, rhs } in &self.sigma {
            if self.map[fx.eval(lhs)? as usize] != self.map[fx.eval(rhs)? as usize] {
                return Err(Error::NotHomomorphism("the map does not unify Σ".into()));
            }
        }
        Ok(())
    }

    fn same_source(&self, other: &SemanticUnifier) -> Result<()> {
        if self.sigma != other.sigma || self.vars != other.vars {
            return Err(Error::InvalidParam(
                "unifiers of different presentations".into(),
            ));
        }
        Ok(())
    }
}

/// All homomorphisms F(X) -> F(n) unifying Σ, one per kernel, in search order.
pub fn enumerate_unifiers(
    v: &VarietySpec,
    sigma: &[Identity],
    vars: &[String],
    n: usize,
) -> Result<Vec<SemanticUnifier>> {
    let fx = free_over(v, vars)?;
    let fn_ = codomain(v, n, vars)?;
    if work(fn_.size(), vars.len()) > WORK_CAP {
        return Err(Error::CapExceeded(format!(
            "unifier search F({}) -> F({n})",
            vars.len()
        )));
    }
    let gens: Vec<Elem> = (0..vars.len()).map(|i| fx.generator(i)).collect();
    let plan = relation_plan(fx.algebra(), &gens, sigma, vars)?;
    let search = Search::new(&plan, fn_.algebra());
    let parts = search.fold(Vec::new, |acc: &mut Vec<(Congruence, Vec<Elem>)>, img| {
        let k = Congruence::from_labels(img);
        if !acc.iter().any(|(t, _)| *t == k) {
            acc.push((k, gens.iter().map(|&g| img[g as usize]).collect()));
        }
    });
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (k, images) in parts.into_iter().flatten() {
        if seen.insert(k) {
            out.push(SemanticUnifier::build(&fx, &fn_, sigma, images));
        }
    }
    Ok(out)
}

/// `u2 ⊑ u1`: every identity unified by u1 is unified by u2.
pub fn compare_exact_order(u1: &SemanticUnifier, u2: &SemanticUnifier) -> Result<bool> {
    u1.same_source(u2)?;
    Ok(u1.kernel.leq(&u2.kernel))
}

/// `u2 ≼ u1`: some homomorphism g: F(n1) -> F(n2) has g ∘ u1 = u2. Searches
/// all g, so the answer is exact for these codomains.
pub fn compare_instantiation(
    v: &VarietySpec,
    u1: &SemanticUnifier,
    u2: &SemanticUnifier,
) -> Result<Option<Vec<Elem>>> {
    u1.same_source(u2)?;
    let f1 = u1.codomain(v)?;
    let f2 = u2.codomain(v)?;
    if work(f2.size(), f1.rank()) > WORK_CAP {
        return Err(Error::CapExceeded(format!(
            "factoring search F({}) -> F({})",
            f1.rank(),
            f2.rank()
        )));
    }
    let gens: Vec<Elem> = (0..f1.rank()).map(|i| f1.generator(i)).collect();
    // F(n1) is free on its generators, so only the constraints need checking.
    let plan = SourcePlan::new(f1.algebra(), &gens, Vec::new(), TableChecks::UpTo(0))?;
    let mut s = Search::new(&plan, f2.algebra());
    for (i, &e) in u1.images.iter().enumerate() {
        // Conflicting constraints on one element mean no factorization.
        if let Some(j) = u1.images[..i].iter().position(|&d| d == e) {
            if u2.images[j] != u2.images[i] {
                return Ok(None);
            }
        }
        s.constrain(e, u2.images[i]);
    }
    Ok(s.first()
        .map(|g| gens.iter().map(|&x| g[x as usize]).collect()))
}

/// σ_X: new variables go to fresh generators of an enlarged codomain.
pub fn extend_unifier(
    v: &VarietySpec,
    u: &SemanticUnifier,
    xs: &[String],
) -> Result<SemanticUnifier> {
    if u.vars.iter().any(|y| !xs.contains(y)) {
        return Err(Error::InvalidParam(
            "extension must contain the original variables".into(),
        ));
    }
    let extra: Vec<&String> = xs.iter().filter(|x| !u.vars.contains(x)).collect();
    if extra.is_empty() && xs == u.vars.as_slice() {
        return Ok(u.clone());
    }
    let n2 = u.n + extra.len();
    let mut names = u.codomain_names.clone();
    names.extend(
        fresh_names(n2, &[xs, &names[..]].concat())
            .into_iter()
            .skip(u.n)
            .take(extra.len()),
    );
    let f1 = u.codomain(v)?;
    let f2 = free_algebra(v, n2)?.with_names(names)?;
    let include: Vec<Elem> = (0..u.n).map(|i| f2.generator(i)).collect();
    let inc = f1.extend(f2.algebra(), &include);
    let images: Vec<Elem> = xs
        .iter()
        .map(|x| match u.vars.iter().position(|y| y == x) {
            Some(i) => inc[u.images[i] as usize],
            None => f2.generator(u.n + extra.iter().position(|e| *e == x).expect("extra")),
        })
        .collect();
    let fx = free_over(v, xs)?;
    Ok(SemanticUnifier::build(&fx, &f2, &u.sigma, images))
}

/// Restriction to a subset of the variables (keeping Σ's variables).
pub fn restrict_unifier(
    v: &VarietySpec,
    u: &SemanticUnifier,
    ys: &[String],
) -> Result<SemanticUnifier> {
    let mut needed = Vec::new();
    for id in &u.sigma {
        id.vars_ordered(&mut needed);
    }
    if needed.iter().any(|x| !ys.contains(x)) || ys.iter().any(|y| !u.vars.contains(y)) {
        return Err(Error::InvalidParam(
            "restriction must keep Σ's variables".into(),
        ));
    }
    let images = ys
        .iter()
        .map(|y| u.images[u.vars.iter().position(|x| x == y).expect("checked")])
        .collect();
    let fx = free_over(v, ys)?;
    Ok(SemanticUnifier::build(
        &fx,
        &u.codomain(v)?,
        &u.sigma,
        images,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalUnifier {
    pub kernel: Congruence,
    pub n: usize,
    pub substitution: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SyntacticReport {
    #[serde(rename = "type")]
    pub type_tag: TypeTag,
    /// Proved complete, not just stable.
    pub certified: bool,
    /// First schedule step at which the maximal set stopped changing.
    pub stable_at: Option<usize>,
    pub reached: usize,
    pub maximal: Vec<MaximalUnifier>,
    /// Distinct kernels after each step.
    pub kernel_counts: Vec<usize>,
}

pub fn default_schedule(vars: &[String], n_max: usize) -> Vec<usize> {
    (1..=n_max.max(vars.len()).max(1)).collect()
}

/// Exact type of Σ over X from ⊑-maximal unifier kernels along `schedule`.
pub fn exact_type_syntactic(
    v: &VarietySpec,
    sigma: &[Identity],
    vars: &[String],
    schedule: &[usize],
) -> Result<SyntacticReport> {
    let mut kernels: Vec<(Congruence, usize, String)> = Vec::new();
    let mut last_max: Option<Vec<Congruence>> = None;
    let mut stable_at = None;
    let mut reached = 0;
    let mut counts = Vec::new();
    for &n in schedule {
        let us = match enumerate_unifiers(v, sigma, vars, n) {
            Ok(us) => us,
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        for u in us {
            if !kernels.iter().any(|(k, _, _)| *k == u.kernel) {
                let text = u.substitution.to_string(v.signature());
                kernels.push((u.kernel, n, text));
            }
        }
        reached = n;
        counts.push(kernels.len());
        let all: Vec<Congruence> = kernels.iter().map(|(k, _, _)| k.clone()).collect();
        let mut max = minimal_elements(&all);
        max.sort();
        if last_max.as_ref() == Some(&max) {
            stable_at.get_or_insert(n);
        } else {
            stable_at = None;
        }
        last_max = Some(max);
    }
    let Some(max) = last_max else {
        return Err(Error::BudgetExceeded {
            what: "unifier search".into(),
            reached: 0,
            budget: v.bounds.size_budget,
        });
    };
    if max.is_empty() {
        return Err(Error::NotUnifiable);
    }
    let maximal = max
        .iter()
        .map(|k| {
            let (_, n, s) = kernels.iter().find(|(c, _, _)| c == k).expect("kernel");
            MaximalUnifier {
                kernel: k.clone(),
                n: *n,
                substitution: s.clone(),
            }
        })
        .collect();
    let certified = certify(v, sigma, vars, &max, stable_at.is_some())?;
    let type_tag = if stable_at.is_some() || certified {
        match max.len() {
            1 => TypeTag::Unitary,
            k => TypeTag::Finitary(k),
        }
    } else {
        TypeTag::UnknownBounded(reached)
    };
    Ok(SyntacticReport {
        type_tag,
        certified,
        stable_at,
        reached,
        maximal,
        kernel_counts: counts,
    })
}

/// The maximal set is complete when it is {Θ_Σ}, or when every congruence
/// above Θ_Σ that is not an achieved kernel lies above a maximal unifier's
/// kernel or has a quotient refuted as non-exact.
fn certify(
    v: &VarietySpec,
    sigma: &[Identity],
    vars: &[String],
    max: &[Congruence],
    stable: bool,
) -> Result<bool> {
    let fx = free_over(v, vars)?;
    let theta = sigma_congruence(&fx, sigma)?;
    if max.len() == 1 && max[0] == theta {
        return Ok(true);
    }
    if !stable {
        return Ok(false);
    }
    let fp = finitely_present_quotient(&fx, sigma)?;
    let crate::variety::FpRoute::Quotient { projection, .. } = &fp.route else {
        return Ok(false);
    };
    let push = |k: &Congruence| {
        let mut labels = vec![0; fp.size()];
        for (x, &p) in projection.iter().enumerate() {
            labels[p as usize] = k.block_of(x as Elem);
        }
        Congruence::from_labels(&labels)
    };
    let max_a: Vec<Congruence> = max.iter().map(push).collect();
    let cons = match all_congruences(&fp.algebra, crate::exactness::con_options()) {
        Ok(c) => c,
        Err(Error::CapExceeded(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    for c in &cons {
        if max_a.iter().any(|m| m.leq(c)) {
            continue;
        }
        let (q, _) = quotient(&fp.algebra, c)?;
        if prefilter(v, &Arc::new(q))?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    fn vars(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unsatisfiable_has_no_unifiers() {
        let v = builtin("bounded-distributive-lattices", None).unwrap();
        let s = v.parse_identities("one = zero").unwrap();
        for n in 1..=2 {
            assert!(enumerate_unifiers(&v, &s, &vars(&["x"]), n)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn identity_unifier_and_orders() {
        let v = builtin("distributive-lattices", None).unwrap();
        let xs = vars(&["x", "y"]);
        let us = enumerate_unifiers(&v, &[], &xs, 2).unwrap();
        let id = us
            .iter()
            .find(|u| u.kernel.is_identity())
            .expect("identity unifier");
        for u in &us {
            u.validate(&v).unwrap();
            assert!(compare_exact_order(id, u).unwrap());
            assert!(compare_exact_order(u, u).unwrap());
            assert!(compare_instantiation(&v, id, u).unwrap().is_some());
            assert!(compare_instantiation(&v, u, u).unwrap().is_some());
        }
    }

    #[test]
    fn instantiation_implies_kernel_inclusion() {
        let v = builtin("boolean", None).unwrap();
        let xs = vars(&["x", "y"]);
        let s = v.parse_identities("(x \\/ y) = one").unwrap();
        let us: Vec<_> = (1..=2)
            .flat_map(|n| enumerate_unifiers(&v, &s, &xs, n).unwrap())
            .collect();
        for a in &us {
            for b in &us {
                if compare_instantiation(&v, a, b).unwrap().is_some() {
                    assert!(compare_exact_order(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn extension_restricts_back() {
        let v = builtin("distributive-lattices", None).unwrap();
        let s = v.parse_identities("(x /\\ y) = x").unwrap();
        let xs = vars(&["x", "y"]);
        for u in enumerate_unifiers(&v, &s, &xs, 2).unwrap() {
            let e = extend_unifier(&v, &u, &vars(&["x", "y", "z"])).unwrap();
            e.validate(&v).unwrap();
            let r = restrict_unifier(&v, &e, &xs).unwrap();
            assert_eq!(r.kernel, u.kernel);
        }
    }

    #[test]
    fn syntactic_types() {
        let v = builtin("distributive-lattices", None).unwrap();
        let s = v.parse_identities("(x /\\ y) = (z \\/ w)").unwrap();
        let r = exact_type_syntactic(&v, &s, &vars(&["x", "y", "z", "w"]), &[1, 2, 3]).unwrap();
        assert_eq!(r.type_tag, TypeTag::Unitary);
        assert!(r.certified);
        let b2 = builtin("pcdl-B2", None).unwrap();
        let s = b2.parse_identities("(x \\/ star(x)) = one").unwrap();
        let r = exact_type_syntactic(&b2, &s, &vars(&["x"]), &[1, 2, 3]).unwrap();
        assert_eq!(r.type_tag, TypeTag::Finitary(2));
        assert!(r.certified);
    }
}
