mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exunif::admissibility::{
    complete_set, decide, decide_certified, decide_via_complete_set, AdmissibilityVerdict,
};
use exunif::catalog::builtin;
use exunif::finalg::FiniteAlgebra;
use exunif::term::{random_identity, Clause, Substitution};
use exunif::variety::{validity, ValidityVerdict, VarietySpec};

fn gens(v: &VarietySpec) -> Vec<&FiniteAlgebra> {
    v.generators().iter().map(|g| g.as_ref()).collect()
}

fn random_clause(v: &VarietySpec, rng: &mut ChaCha8Rng) -> Clause {
    let sig = v.signature();
    let vars = ["x", "y"].map(String::from);
    let k = rng.gen_range(1..=2);
    let premises = vec![random_identity(sig, &vars[..k], 2, rng)];
    let conclusions = (0..rng.gen_range(1..=2))
        .map(|_| random_identity(sig, &vars[..k], 1, rng))
        .collect();
    Clause::new(premises, conclusions)
}

/// Whether `s` turns the clause into a counterexample, judged on the generators.
fn refutes(v: &VarietySpec, clause: &Clause, s: &Substitution, codomain: &[String]) -> bool {
    let g = gens(v);
    let holds = |id: &exunif::term::Identity| common::identity_holds(&g, &id.apply(s), codomain);
    clause.premises.iter().all(holds) && !clause.conclusions.iter().any(holds)
}

#[test]
fn valid_clauses_are_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut valid = 0;
    for name in [
        "distributive-lattices",
        "stone",
        "kleene",
        "bounded-distributive-lattices",
    ] {
        let v = builtin(name, None).unwrap();
        for _ in 0..25 {
            let c = random_clause(&v, &mut rng);
            if validity(&v, &c).unwrap() == ValidityVerdict::Valid {
                valid += 1;
                let r = decide_certified(&v, &c, None).unwrap();
                assert!(r.is_admissible(), "{name}: {}", c.to_string(v.signature()));
            }
        }
    }
    assert!(valid > 0);
}

#[test]
fn complete_set_agrees_with_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut compared = 0;
    for name in [
        "stone",
        "kleene",
        "bounded-distributive-lattices",
        "de-morgan",
    ] {
        let v = builtin(name, None).unwrap();
        for _ in 0..15 {
            let c = random_clause(&v, &mut rng);
            let searched = decide(&v, &c, None).unwrap();
            if matches!(searched, AdmissibilityVerdict::VacuouslyAdmissible) {
                continue;
            }
            let Some(set) = complete_set(&v, &c.premises, 3).unwrap() else {
                continue;
            };
            let via = decide_via_complete_set(&v, &c, &set).unwrap();
            assert_eq!(
                searched.is_admissible(),
                via.is_admissible(),
                "{name}: {}",
                c.to_string(v.signature())
            );
            compared += 1;
        }
    }
    assert!(compared >= 20, "only {compared} clauses compared");
}

#[test]
fn witnesses_refute_by_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut refuted = 0;
    for name in [
        "stone",
        "kleene",
        "bounded-distributive-lattices",
        "pcdl-B2",
    ] {
        let v = builtin(name, None).unwrap();
        for _ in 0..15 {
            let c = random_clause(&v, &mut rng);
            if let AdmissibilityVerdict::NotAdmissible { witness } =
                decide_certified(&v, &c, None).unwrap()
            {
                assert!(refutes(
                    &v,
                    &c,
                    &witness.substitution,
                    &witness.codomain_names
                ));
                refuted += 1;
            }
        }
    }
    assert!(refuted > 0);
}

/// Substitutions into terms of depth <= 2 over one fresh variable; a refuting
/// one forces NOT_ADMISSIBLE.
#[test]
fn direct_substitutions_agree() {
    let cases = [
        (
            "bounded-distributive-lattices",
            "(x \\/ y) = one => x = one | y = one",
            true,
        ),
        (
            "bounded-distributive-lattices",
            "(x \\/ y) = one => x = one",
            false,
        ),
        (
            "kleene",
            "(x \\/ neg(x)) = one => x = one | neg(x) = one",
            true,
        ),
        ("kleene", "(x \\/ neg(x)) = one => x = one", false),
        (
            "pcdl-B2",
            "(x \\/ star(x)) = one => x = one | star(x) = one",
            true,
        ),
        ("pcdl-B2", "(x \\/ star(x)) = one => star(x) = one", false),
        (
            "stone",
            "(x \\/ star(x)) = one => x = one | star(x) = one",
            false,
        ),
    ];
    let codomain = vec!["u".to_string()];
    for (name, src, admissible) in cases {
        let v = builtin(name, None).unwrap();
        let c = v.parse_clause(src).unwrap();
        let terms = common::terms_up_to(v.signature(), &codomain, 2);
        let vars = c.vars();
        let mut found = false;
        let mut idx = vec![0usize; vars.len()];
        'outer: loop {
            let s = Substitution::from_pairs(
                vars.iter()
                    .zip(&idx)
                    .map(|(x, &i)| (x.clone(), terms[i].clone())),
            );
            if refutes(&v, &c, &s, &codomain) {
                found = true;
                break;
            }
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < terms.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        let r = decide_certified(&v, &c, None).unwrap();
        assert_eq!(
            r.is_admissible(),
            admissible,
            "{name}: {src}: {}",
            r.label()
        );
        if found {
            assert!(!r.is_admissible(), "{name}: {src}");
        }
        if !admissible {
            assert!(found, "{name}: {src}: no refuting substitution of depth 2");
        }
    }
}
