//! Admissibility of clauses Σ ⇒ Δ: every unifier of Σ unifies some member of Δ.
//!
//! Unifiers are homomorphisms F(X) -> F(n); their kernels on F(X) are
//! accumulated for growing n, and each kernel that contains the Σ-pairs must
//! contain some Δ-pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactness::{exact_type_of_algebra, is_exact, ExactnessVerdict};
use crate::finalg::{minimal_elements, quotient, Congruence, Elem};
use crate::preorder::TypeTag;
use crate::term::{Clause, Identity, Substitution};
use crate::unify::{enumerate_unifiers, extend_unifier, SemanticUnifier};
use crate::variety::{
    finitely_present, free_algebra, sigma_pairs, validity, FinitelyPresented, ValidityVerdict,
    VarietySpec,
};

/// A unifier of the premises that unifies no conclusion.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// Codomain F(n).
    pub n: usize,
    pub codomain_names: Vec<String>,
    /// Kernel of the unifier on F(X), X the clause variables.
    pub kernel: Congruence,
    /// x -> witness term over the codomain names.
    pub assignment: Vec<(String, String)>,
    #[serde(skip)]
    pub substitution: Substitution,
}

impl Witness {
    fn from_unifier(v: &VarietySpec, u: &SemanticUnifier) -> Witness {
        let sig = v.signature();
        Witness {
            n: u.n,
            codomain_names: u.codomain_names.clone(),
            kernel: u.kernel.clone(),
            assignment: u
                .substitution
                .iter()
                .map(|(x, t)| (x.clone(), t.to_string(sig)))
                .collect(),
            substitution: u.substitution.clone(),
        }
    }

    /// Applies the substitution to the clause and evaluates both sides of
    /// every identity in F(n): premises must hold, conclusions must fail.
    pub fn validate(&self, v: &VarietySpec, clause: &Clause) -> Result<()> {
        let f = free_algebra(v, self.n)?.with_names(self.codomain_names.clone())?;
        let holds = |id: &Identity| -> Result<bool> {
            let id = id.apply(&self.substitution);
            Ok(f.eval(&id.lhs)? == f.eval(&id.rhs)?)
        };
        for p in &clause.premises {
            if !holds(p)? {
                return Err(Error::NotHomomorphism(format!(
                    "witness does not unify premise {}",
                    p.to_string(v.signature())
                )));
            }
        }
        for c in &clause.conclusions {
            if holds(c)? {
                return Err(Error::NotHomomorphism(format!(
                    "witness unifies conclusion {}",
                    c.to_string(v.signature())
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdmissibilityVerdict {
    AdmissibleCertified {
        route: String,
    },
    /// No counterexample among unifiers into F(1), .., F(n).
    AdmissibleUpTo {
        n: usize,
        /// The kernel set did not grow at the last step.
        saturated: bool,
    },
    NotAdmissible {
        witness: Witness,
    },
    /// The premises have no unifier, so the clause holds vacuously.
    VacuouslyAdmissible,
}

impl AdmissibilityVerdict {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, AdmissibilityVerdict::NotAdmissible { .. })
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, AdmissibilityVerdict::AdmissibleUpTo { .. })
    }

    pub fn label(&self) -> String {
        match self {
            AdmissibilityVerdict::AdmissibleCertified { .. } => "ADMISSIBLE_CERTIFIED".into(),
            AdmissibilityVerdict::AdmissibleUpTo { n, .. } => format!("ADMISSIBLE_UP_TO({n})"),
            AdmissibilityVerdict::NotAdmissible { .. } => "NOT_ADMISSIBLE".into(),
            AdmissibilityVerdict::VacuouslyAdmissible => "ADMISSIBLE_VACUOUS".into(),
        }
    }
}

/// The clause variables, or a single dummy variable for a ground clause.
pub fn clause_vars(clause: &Clause) -> Vec<String> {
    let mut vars = clause.vars();
    if vars.is_empty() {
        vars.push("x".into());
    }
    vars
}

pub fn default_n_max(clause: &Clause) -> usize {
    clause_vars(clause).len().max(3)
}

fn unifies_some(deltas: &[(Elem, Elem)], kernel: &Congruence) -> bool {
    deltas.iter().any(|&(a, b)| kernel.related(a, b))
}

/// Least index of a conclusion unified by `u`, if any.
fn first_unified(deltas: &[(Elem, Elem)], kernel: &Congruence) -> Option<usize> {
    deltas.iter().position(|&(a, b)| kernel.related(a, b))
}

/// Decides admissibility by kernel saturation over F(1), .., F(n_max), or by
/// validity when the variety flags the two notions as equal.
pub fn decide(
    v: &VarietySpec,
    clause: &Clause,
    n_max: Option<usize>,
) -> Result<AdmissibilityVerdict> {
    let vars = clause_vars(clause);
    let n_max = n_max.unwrap_or_else(|| default_n_max(clause));
    if enumerate_unifiers(v, &clause.premises, &vars, 1)?.is_empty() {
        // Any unifier into F(n) composed with F(n) -> F(1) is one into F(1).
        return Ok(AdmissibilityVerdict::VacuouslyAdmissible);
    }
    if v.flags.admissibility_equals_validity {
        return decide_by_validity(v, clause, &vars, n_max);
    }
    let fx = free_algebra(v, vars.len())?.with_names(vars.clone())?;
    let deltas = sigma_pairs(&fx, &clause.conclusions)?;
    let mut kernels: Vec<Congruence> = Vec::new();
    let mut reached = 0;
    let mut saturated = false;
    for n in 1..=n_max {
        let us = match enumerate_unifiers(v, &clause.premises, &vars, n) {
            Ok(us) => us,
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded(_)) => break,
            Err(e) => return Err(e),
        };
        if let Some(u) = us.iter().find(|u| !unifies_some(&deltas, &u.kernel)) {
            return Ok(AdmissibilityVerdict::NotAdmissible {
                witness: Witness::from_unifier(v, u),
            });
        }
        let before = kernels.len();
        for u in us {
            if !kernels.contains(&u.kernel) {
                kernels.push(u.kernel);
            }
        }
        saturated = n > 1 && kernels.len() == before;
        reached = n;
    }
    if reached == 0 {
        return Err(Error::BudgetExceeded {
            what: "unifier search".into(),
            reached: 0,
            budget: v.bounds.size_budget,
        });
    }
    Ok(AdmissibilityVerdict::AdmissibleUpTo {
        n: reached,
        saturated,
    })
}

/// Validity route. A counterexample is F(X)/Θ_Σ itself, which is exact under
/// the flag; its embedding into some F(n) yields the witness unifier.
fn decide_by_validity(
    v: &VarietySpec,
    clause: &Clause,
    vars: &[String],
    n_max: usize,
) -> Result<AdmissibilityVerdict> {
    match validity(v, clause)? {
        ValidityVerdict::Valid => Ok(AdmissibilityVerdict::AdmissibleCertified {
            route: "validity (admissibility equals validity)".into(),
        }),
        ValidityVerdict::Invalid { .. } => {
            let fp = finitely_present(v, &clause.premises, vars)?;
            match is_exact(v, &fp, n_max.max(vars.len() + 1))? {
                ExactnessVerdict::Exact { n, embedding } => {
                    let images = (0..vars.len())
                        .map(|i| embedding[fp.generator(i) as usize])
                        .collect();
                    let u = SemanticUnifier::from_images(v, &clause.premises, vars, n, images)?;
                    Ok(AdmissibilityVerdict::NotAdmissible {
                        witness: Witness::from_unifier(v, &u),
                    })
                }
                _ => Err(Error::Undecided(
                    "clause is invalid but no countermodel embedding was found within bounds"
                        .into(),
                )),
            }
        }
    }
}

/// Checks each member of a complete set of unifiers of Σ, extended to the
/// clause variables, against Δ.
pub fn decide_via_complete_set(
    v: &VarietySpec,
    clause: &Clause,
    set: &[SemanticUnifier],
) -> Result<AdmissibilityVerdict> {
    if set.is_empty() {
        return Ok(AdmissibilityVerdict::VacuouslyAdmissible);
    }
    let vars = clause_vars(clause);
    let fx = free_algebra(v, vars.len())?.with_names(vars.clone())?;
    let deltas = sigma_pairs(&fx, &clause.conclusions)?;
    for u in set {
        if u.sigma != clause.premises {
            return Err(Error::InvalidParam(
                "complete set is for different premises".into(),
            ));
        }
        let ux = extend_unifier(v, u, &vars)?;
        if !unifies_some(&deltas, &ux.kernel) {
            return Ok(AdmissibilityVerdict::NotAdmissible {
                witness: Witness::from_unifier(v, &ux),
            });
        }
    }
    Ok(AdmissibilityVerdict::AdmissibleCertified {
        route: "complete set of exact unifiers".into(),
    })
}

/// Σ's variables by first occurrence, or a dummy one.
fn sigma_vars(sigma: &[Identity]) -> Vec<String> {
    let mut vars = crate::term::identities_vars(sigma);
    if vars.is_empty() {
        vars.push("x".into());
    }
    vars
}

/// A certified complete set of ⊑-maximal unifiers of Σ over Var(Σ): the
/// projections onto the minimal exact congruences of Fp(Σ), realized through
/// their embeddings. `None` when the minimal set is not certified or some
/// member has no explicit embedding.
pub fn complete_set(
    v: &VarietySpec,
    sigma: &[Identity],
    n_max: usize,
) -> Result<Option<Vec<SemanticUnifier>>> {
    let vars = sigma_vars(sigma);
    let fp = finitely_present(v, sigma, &vars)?;
    let report = match exact_type_of_algebra(v, &fp, n_max) {
        Ok(r) => r,
        Err(Error::NotUnifiable) => return Ok(Some(Vec::new())),
        Err(e) => return Err(e),
    };
    if !report.certified() {
        return Ok(None);
    }
    let mut out = Vec::new();
    for m in &report.minimal {
        let ExactnessVerdict::Exact { n, embedding } = &m.verdict else {
            return Ok(None);
        };
        out.push(projection_unifier(v, &fp, &m.theta, *n, embedding)?);
    }
    Ok(Some(out))
}

/// Fp(Σ) -> Fp/θ -> F(n) as a unifier of Σ.
fn projection_unifier(
    v: &VarietySpec,
    fp: &FinitelyPresented,
    theta: &Congruence,
    n: usize,
    embedding: &[Elem],
) -> Result<SemanticUnifier> {
    let (_, proj) = quotient(&fp.algebra, theta)?;
    let images = (0..fp.vars.len())
        .map(|i| embedding[proj[fp.generator(i) as usize] as usize])
        .collect();
    SemanticUnifier::from_images(v, &fp.sigma, &fp.vars, n, images)
}

/// `decide`, upgraded to a certified verdict through a certified complete
/// set of unifiers when the bounded search found no counterexample.
pub fn decide_certified(
    v: &VarietySpec,
    clause: &Clause,
    n_max: Option<usize>,
) -> Result<AdmissibilityVerdict> {
    let verdict = decide(v, clause, n_max)?;
    if verdict.is_certified() {
        return Ok(verdict);
    }
    let n = n_max.unwrap_or_else(|| default_n_max(clause));
    match complete_set(v, &clause.premises, n)? {
        Some(set) => decide_via_complete_set(v, clause, &set),
        None => Ok(verdict),
    }
}

/// ⊑-maximal unifiers of Σ over Var(Σ): the certified complete set when
/// available, else the maximal kernels found up to `n_max`.
pub fn mu_set(
    v: &VarietySpec,
    sigma: &[Identity],
    n_max: usize,
) -> Result<(Vec<SemanticUnifier>, bool)> {
    if let Some(set) = complete_set(v, sigma, n_max)? {
        return Ok((set, true));
    }
    let vars = sigma_vars(sigma);
    let mut all: Vec<SemanticUnifier> = Vec::new();
    for n in 1..=n_max {
        match enumerate_unifiers(v, sigma, &vars, n) {
            Ok(us) => {
                for u in us {
                    if !all.iter().any(|w| w.kernel == u.kernel) {
                        all.push(u);
                    }
                }
            }
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded(_)) => break,
            Err(e) => return Err(e),
        }
    }
    let kernels: Vec<Congruence> = all.iter().map(|u| u.kernel.clone()).collect();
    let max = minimal_elements(&kernels);
    let set = all
        .into_iter()
        .filter(|u| max.contains(&u.kernel))
        .collect();
    Ok((set, false))
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    /// Indices into the original conclusions, ascending.
    pub kept: Vec<usize>,
    #[serde(skip)]
    pub clause: Clause,
    pub mu_set_size: usize,
    pub mu_set_certified: bool,
    pub verdict: AdmissibilityVerdict,
}

/// Keeps, for each member of a μ-set of Σ's unifiers, the first conclusion it
/// unifies. The reduced clause is re-decided.
pub fn reduce_conclusions(
    v: &VarietySpec,
    clause: &Clause,
    n_max: Option<usize>,
) -> Result<Reduction> {
    let n = n_max.unwrap_or_else(|| default_n_max(clause));
    if !decide_certified(v, clause, Some(n))?.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    let (set, certified) = mu_set(v, &clause.premises, n)?;
    let vars = clause_vars(clause);
    let fx = free_algebra(v, vars.len())?.with_names(vars.clone())?;
    let deltas = sigma_pairs(&fx, &clause.conclusions)?;
    let mut kept = Vec::new();
    for u in &set {
        let ux = extend_unifier(v, u, &vars)?;
        let i = first_unified(&deltas, &ux.kernel).ok_or(Error::NotAdmissible)?;
        if !kept.contains(&i) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    let reduced = Clause::new(
        clause.premises.clone(),
        kept.iter()
            .map(|&i| clause.conclusions[i].clone())
            .collect(),
    );
    let verdict = decide_certified(v, &reduced, Some(n))?;
    if !verdict.is_admissible() {
        return Err(Error::Undecided(
            "reduced clause failed to re-verify; the μ-set is incomplete".into(),
        ));
    }
    Ok(Reduction {
        kept,
        clause: reduced,
        mu_set_size: set.len(),
        mu_set_certified: certified,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Reducibility {
    pub reducible: bool,
    #[serde(rename = "type")]
    pub type_tag: TypeTag,
    /// The discriminating clause for a finitary type, as text.
    pub discriminating: Option<String>,
    /// Its verdict; must be admissible.
    pub clause_verdict: Option<String>,
    /// Verdicts of its single-conclusion parts; all must be NOT_ADMISSIBLE.
    pub single_verdicts: Vec<String>,
}

/// Σ is admissibly reducible iff its exact type is unitary. For a finitary
/// type the clause Σ ⇒ {φ_ij ≈ ψ_ij}, with (φ_ij, ψ_ij) in the i-th minimal
/// kernel but not the j-th, is admissible while none of its single
/// conclusions is.
pub fn check_admissibly_reducible(
    v: &VarietySpec,
    sigma: &[Identity],
    n_max: usize,
) -> Result<Reducibility> {
    let vars = sigma_vars(sigma);
    let fp = finitely_present(v, sigma, &vars)?;
    let report = match exact_type_of_algebra(v, &fp, n_max) {
        Ok(r) => r,
        // Every clause with these premises is vacuously admissible.
        Err(Error::NotUnifiable) => {
            return Ok(Reducibility {
                reducible: true,
                type_tag: TypeTag::Unitary,
                discriminating: None,
                clause_verdict: None,
                single_verdicts: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    match report.type_tag {
        TypeTag::Unitary => Ok(Reducibility {
            reducible: true,
            type_tag: TypeTag::Unitary,
            discriminating: None,
            clause_verdict: None,
            single_verdicts: Vec::new(),
        }),
        TypeTag::Finitary(_) => {
            let kernels: Vec<&Congruence> = report.minimal.iter().map(|m| &m.theta).collect();
            let mut conclusions = Vec::new();
            for (i, ki) in kernels.iter().enumerate() {
                for (j, kj) in kernels.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let (a, b) = least_pair(ki, kj).ok_or_else(|| {
                        Error::Undecided("minimal kernels are not incomparable".into())
                    })?;
                    let id = Identity::new(fp.witness(a), fp.witness(b));
                    if !conclusions.contains(&id) {
                        conclusions.push(id);
                    }
                }
            }
            let clause = Clause::new(sigma.to_vec(), conclusions);
            let sig = v.signature();
            let whole = decide_certified(v, &clause, Some(n_max))?;
            let singles = clause
                .conclusions
                .iter()
                .map(|c| {
                    decide(
                        v,
                        &Clause::new(sigma.to_vec(), vec![c.clone()]),
                        Some(n_max),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let confirmed = whole.is_admissible() && singles.iter().all(|s| !s.is_admissible());
            if !confirmed {
                return Err(Error::Undecided(
                    "discriminating clause did not behave as predicted".into(),
                ));
            }
            Ok(Reducibility {
                reducible: false,
                type_tag: report.type_tag,
                discriminating: Some(clause.to_string(sig)),
                clause_verdict: Some(whole.label()),
                single_verdicts: singles.iter().map(|s| s.label()).collect(),
            })
        }
        other => Err(Error::Undecided(format!("exact type {other}"))),
    }
}

/// Least pair (a, b), a < b, related by `yes` but not by `no`.
fn least_pair(yes: &Congruence, no: &Congruence) -> Option<(Elem, Elem)> {
    let n = yes.size() as Elem;
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .find(|&(a, b)| yes.related(a, b) && !no.related(a, b))
}

/// Re-checks a verdict: witnesses must re-validate.
pub fn audit(v: &VarietySpec, clause: &Clause, verdict: &AdmissibilityVerdict) -> Result<()> {
    if let AdmissibilityVerdict::NotAdmissible { witness } = verdict {
        witness.validate(v, clause)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    const MIXED: &str = "(x \\/ star(x)) = one => x = one | star(x) = one";

    #[test]
    fn b2_trio() {
        let v = builtin("pcdl-B2", None).unwrap();
        let mixed = v.parse_clause(MIXED).unwrap();
        for n in 2..=4 {
            let r = decide(&v, &mixed, Some(n)).unwrap();
            assert!(r.is_admissible(), "{}", r.label());
        }
        assert!(decide_certified(&v, &mixed, None).unwrap().is_certified());
        for src in [
            "(x \\/ star(x)) = one => x = one",
            "(x \\/ star(x)) = one => star(x) = one",
            "(x \\/ star(x)) = one => x = one | star(x) = zero",
        ] {
            let c = v.parse_clause(src).unwrap();
            let r = decide(&v, &c, None).unwrap();
            let AdmissibilityVerdict::NotAdmissible { witness } = &r else {
                panic!("{src}: {}", r.label())
            };
            witness.validate(&v, &c).unwrap();
        }
    }

    #[test]
    fn complete_set_agrees() {
        let v = builtin("pcdl-B2", None).unwrap();
        let s = v.parse_identities("(x \\/ star(x)) = one").unwrap();
        let set = complete_set(&v, &s, 3).unwrap().expect("certified");
        assert_eq!(set.len(), 2);
        let mixed = v.parse_clause(MIXED).unwrap();
        assert!(decide_via_complete_set(&v, &mixed, &set)
            .unwrap()
            .is_certified());
        let single = v.parse_clause("(x \\/ star(x)) = one => x = one").unwrap();
        let r = decide_via_complete_set(&v, &single, &set).unwrap();
        audit(&v, &single, &r).unwrap();
        assert!(!r.is_admissible());
    }

    #[test]
    fn dl_matches_validity() {
        let v = builtin("distributive-lattices", None).unwrap();
        for (src, valid) in [
            ("(x /\\ y) = x => (x \\/ y) = y", true),
            ("(x /\\ y) = x => x = y", false),
            ("(x /\\ y) = (z \\/ w) => x = z | (x /\\ z) = z", true),
        ] {
            let c = v.parse_clause(src).unwrap();
            let r = decide(&v, &c, None).unwrap();
            assert_eq!(r.is_admissible(), valid, "{src}");
            audit(&v, &c, &r).unwrap();
        }
    }

    #[test]
    fn vacuous_and_reduction() {
        let v = builtin("bounded-distributive-lattices", None).unwrap();
        let c = v.parse_clause("one = zero => x = y").unwrap();
        assert!(matches!(
            decide(&v, &c, None).unwrap(),
            AdmissibilityVerdict::VacuouslyAdmissible
        ));
        let v = builtin("distributive-lattices", None).unwrap();
        let c = v
            .parse_clause("(x /\\ y) = x => (x \\/ y) = y | (x \\/ y) = y | x = y")
            .unwrap();
        let r = reduce_conclusions(&v, &c, None).unwrap();
        assert_eq!(r.kept, vec![0]);
        let b2 = builtin("pcdl-B2", None).unwrap();
        let r = reduce_conclusions(&b2, &b2.parse_clause(MIXED).unwrap(), None).unwrap();
        assert_eq!(r.kept, vec![0, 1]);
        assert_eq!(r.mu_set_size, 2);
    }

    #[test]
    fn reducibility() {
        let v = builtin("distributive-lattices", None).unwrap();
        let s = v.parse_identities("(x /\\ y) = (z \\/ w)").unwrap();
        assert!(check_admissibly_reducible(&v, &s, 3).unwrap().reducible);
        let b2 = builtin("pcdl-B2", None).unwrap();
        let s = b2.parse_identities("(x \\/ star(x)) = one").unwrap();
        let r = check_admissibly_reducible(&b2, &s, 3).unwrap();
        assert!(!r.reducible);
        assert_eq!(r.single_verdicts.len(), 2);
    }
}
