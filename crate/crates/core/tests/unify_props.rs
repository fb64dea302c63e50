mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exunif::catalog::builtin;
use exunif::finalg::FiniteAlgebra;
use exunif::term::{boolean_mgu, random_term, Identity};
use exunif::unify::{
    compare_exact_order, compare_instantiation, enumerate_unifiers, extend_unifier,
    restrict_unifier, SemanticUnifier,
};
use exunif::variety::VarietySpec;

fn gens(v: &VarietySpec) -> Vec<&FiniteAlgebra> {
    v.generators().iter().map(|g| g.as_ref()).collect()
}

fn unifiers(v: &VarietySpec, src: &str, n_max: usize) -> (Vec<Identity>, Vec<SemanticUnifier>) {
    let sigma = v.parse_identities(src).unwrap();
    let vars = exunif::term::identities_vars(&sigma);
    let us = (1..=n_max)
        .flat_map(|n| enumerate_unifiers(v, &sigma, &vars, n).unwrap())
        .collect();
    (sigma, us)
}

#[test]
fn enumerated_unifiers_unify_by_evaluation() {
    for (name, src) in [
        ("bounded-distributive-lattices", "(x \\/ y) = one"),
        ("stone", "(x /\\ y) = zero"),
        ("kleene", "(x \\/ neg(x)) = one"),
        ("pcdl-B2", "(x \\/ star(x)) = one"),
    ] {
        let v = builtin(name, None).unwrap();
        let (sigma, us) = unifiers(&v, src, 2);
        assert!(!us.is_empty(), "{name}");
        for u in &us {
            u.validate(&v).unwrap();
            for id in &sigma {
                assert!(
                    common::identity_holds(
                        &gens(&v),
                        &id.apply(&u.substitution),
                        &u.codomain_names
                    ),
                    "{name}: {}",
                    u.substitution.to_string(v.signature())
                );
            }
        }
    }
}

/// u2 ≼ u1 implies ker u1 ⊆ ker u2.
#[test]
fn instantiation_refines_exact_order() {
    for (name, src) in [
        ("bounded-distributive-lattices", "(x \\/ y) = one"),
        ("kleene", "(x \\/ neg(x)) = one"),
        ("stone", "(x /\\ y) = zero"),
    ] {
        let v = builtin(name, None).unwrap();
        let (_, us) = unifiers(&v, src, 2);
        let mut instances = 0;
        for a in &us {
            for b in &us {
                if compare_instantiation(&v, a, b).unwrap().is_some() {
                    instances += 1;
                    assert!(compare_exact_order(a, b).unwrap(), "{name}");
                }
            }
        }
        assert!(instances >= us.len(), "{name}: reflexivity");
    }
}

#[test]
fn extension_and_restriction() {
    let v = builtin("bounded-distributive-lattices", None).unwrap();
    let (_, us) = unifiers(&v, "(x \\/ y) = one", 2);
    let wider: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    for u in &us {
        let e = extend_unifier(&v, u, &wider).unwrap();
        assert_eq!(e.vars, wider);
        let r = restrict_unifier(&v, &e, &u.vars).unwrap();
        assert_eq!(r.kernel, u.kernel);
    }
}

#[test]
fn boolean_mgu_unifies_satisfiable_formulas() {
    let v = builtin("boolean", None).unwrap();
    let sig = v.signature().clone();
    let vars: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let one = v.parse_term("one").unwrap();
    let b = gens(&v);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut satisfiable = 0;
    for _ in 0..200 {
        let phi = random_term(&sig, &vars, rng.gen_range(1..=3), &mut rng);
        let id = Identity::new(phi.clone(), one.clone());
        let sat = common::points(2, vars.len()).iter().any(|p| {
            let env = |w: &str| vars.iter().position(|u| u == w).map(|i| p[i]);
            b[0].eval(&phi, &env).unwrap() == b[0].eval(&one, &env).unwrap()
        });
        let mgu = boolean_mgu(&sig, &phi, &vars).unwrap();
        let unifies = common::identity_holds(&b, &id.apply(&mgu), &vars);
        assert_eq!(unifies, sat, "{}", phi.to_string(&sig));
        satisfiable += sat as usize;
    }
    assert!(satisfiable > 50);
}
