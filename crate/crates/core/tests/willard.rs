use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use exunif::catalog::builtin;
use exunif::term::random_term;
use exunif::willard::{equal_in_willard, model_check, normalize, rewrite_oracle, Ops};

#[test]
fn normal_form_is_the_unique_irreducible() {
    let v = builtin("willard", None).unwrap();
    let sig = v.signature().clone();
    let vars: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let t = random_term(&sig, &vars, 4, &mut rng);
        let nf = normalize(&sig, &t).unwrap();
        let Ok(irreducible) = rewrite_oracle(&sig, &t, 20_000) else {
            continue;
        };
        assert_eq!(irreducible.len(), 1, "{}", t.to_string(&sig));
        assert!(
            equal_in_willard(&sig, irreducible.first().unwrap(), &nf.term).unwrap(),
            "{}",
            t.to_string(&sig)
        );
    }
}

#[test]
fn steps_are_axiom_instances() {
    let v = builtin("willard", None).unwrap();
    let sig = v.signature().clone();
    let ops = Ops::find(&sig).unwrap();
    let vars: Vec<String> = ["x", "y"].map(String::from).to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let t = random_term(&sig, &vars, 4, &mut rng);
        for s in normalize(&sig, &t).unwrap().steps {
            assert!(s.is_instance(&ops), "{}", s.to_string(&sig));
        }
    }
}

#[test]
fn generating_algebra_models_the_axioms() {
    let v = builtin("willard", None).unwrap();
    for g in v.generators() {
        model_check(g, 2, 4).unwrap();
    }
}
