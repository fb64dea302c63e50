//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on failure.

mod common;

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exunif::admissibility::{
    audit, decide, decide_certified, reduce_conclusions, AdmissibilityVerdict,
};
use exunif::catalog::{builtin, builtin_fresh};
use exunif::exactness::{
    exact_type_of_algebra, is_projective, validate_embedding, validate_projectivity,
    ExactTypeReport, ExactnessVerdict,
};
use exunif::finalg::quotient;
use exunif::preorder::{check_equivalence, PreorderedSet, TypeTag};
use exunif::term::{boolean_mgu, random_identity, Identity, Term};
use exunif::unify::{
    compare_exact_order, compare_instantiation, default_schedule, enumerate_unifiers,
    exact_type_syntactic, SemanticUnifier,
};
use exunif::variety::{finitely_present, free_algebra, FinitelyPresented, VarietySpec};
use exunif::willard::{self, normalize, verify_unifier_families, Ops};
use exunif::{Error, Result};

const DL_TIME_LIMIT: Duration = Duration::from_secs(60);
const STONE_SAMPLES: usize = 20;
const STONE_MAX_ATTEMPTS: usize = 2000;
const STONE_SEED: u64 = 0x5703e;
const N_MAX: usize = 3;
const WILLARD_FAMILY: usize = 5;
const WILLARD_BOUND: usize = 6;
const WILLARD_EXACT_BOUND: usize = 3;
const BRIDGE_MIN: usize = 20;
const REDUCE_CLAUSES: usize = 10;
const PREORDER_SAMPLES: usize = 100;
const PREORDER_MAX_POINTS: usize = 6;
const EQUIVALENCE_SAMPLES: usize = 50;
const PREORDER_SEED: u64 = 0x9e3779b9;

/// Witnesses collected along the way, re-validated in the last criterion.
#[derive(Default)]
struct Audit {
    verdicts: Vec<(Arc<VarietySpec>, exunif::term::Clause, AdmissibilityVerdict)>,
    embeddings: Vec<(Arc<VarietySpec>, FinitelyPresented, ExactTypeReport)>,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn present(v: &VarietySpec, src: &str) -> Result<FinitelyPresented> {
    let sigma = v.parse_identities(src)?;
    let vars = exunif::term::identities_vars(&sigma);
    finitely_present(v, &sigma, &vars)
}

fn c1(a: &mut Audit) -> Result<Outcome> {
    let v = builtin("distributive-lattices", None)?;
    let t = Instant::now();
    let fp = present(&v, "(x /\\ y) = (z \\/ w)")?;
    let r = exact_type_of_algebra(&v, &fp, 4)?;
    let dt = t.elapsed();
    let pass = r.type_tag == TypeTag::Unitary && dt < DL_TIME_LIMIT;
    let detail = format!("{} in {:.2?} (limit {:?})", r.type_tag, dt, DL_TIME_LIMIT);
    a.embeddings.push((v, fp, r));
    outcome(pass, detail)
}

fn c2(a: &mut Audit) -> Result<Outcome> {
    let v = builtin("stone", None)?;
    let sig = v.signature().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(STONE_SEED);
    let names = ["x", "y", "z"].map(String::from);
    let (mut ok, mut bad, mut skipped_nu, mut skipped_budget) = (0, Vec::new(), 0, 0);
    let mut attempts = 0;
    while ok + bad.len() < STONE_SAMPLES && attempts < STONE_MAX_ATTEMPTS {
        attempts += 1;
        let k = rng.gen_range(1..=3);
        let id = random_identity(&sig, &names[..k], 2, &mut rng);
        let vars = exunif::term::identities_vars(std::slice::from_ref(&id));
        if vars.is_empty() {
            skipped_nu += 1;
            continue;
        }
        let fp = match finitely_present(&v, std::slice::from_ref(&id), &vars) {
            Ok(fp) => fp,
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded(_)) => {
                skipped_budget += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match exact_type_of_algebra(&v, &fp, N_MAX) {
            Ok(r) => {
                let delta_min = r.minimal.len() == 1 && r.minimal[0].theta.is_identity();
                if delta_min && r.type_tag == TypeTag::Unitary {
                    ok += 1;
                } else {
                    bad.push(format!("{} -> {}", id.to_string(&sig), r.type_tag));
                }
                a.embeddings.push((v.clone(), fp, r));
            }
            Err(Error::NotUnifiable) => skipped_nu += 1,
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded(_)) => skipped_budget += 1,
            Err(e) => return Err(e),
        }
    }
    outcome(
        ok == STONE_SAMPLES,
        format!(
            "{ok}/{STONE_SAMPLES} unitary with minimum Δ; skipped {skipped_nu} non-unifiable, {skipped_budget} over budget; failures {bad:?}"
        ),
    )
}

fn c3(a: &mut Audit) -> Result<Outcome> {
    let v = builtin("pcdl-B2", None)?;
    let mixed = v.parse_clause("(x \\/ star(x)) = one => x = one | star(x) = one")?;
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 2..=4 {
        let r = decide(&v, &mixed, Some(n))?;
        pass &= r.is_admissible();
        notes.push(format!("n_max {n}: {}", r.label()));
        a.verdicts.push((v.clone(), mixed.clone(), r));
    }
    let cert = decide_certified(&v, &mixed, None)?;
    pass &= cert.is_admissible() && cert.is_certified();
    notes.push(format!("certified: {}", cert.label()));
    for src in [
        "(x \\/ star(x)) = one => x = one",
        "(x \\/ star(x)) = one => star(x) = one",
    ] {
        let c = v.parse_clause(src)?;
        let r = decide(&v, &c, None)?;
        let valid = match &r {
            AdmissibilityVerdict::NotAdmissible { witness } => witness.validate(&v, &c).is_ok(),
            _ => false,
        };
        pass &= valid;
        notes.push(format!("single: {} (witness valid: {valid})", r.label()));
        a.verdicts.push((v.clone(), c, r));
    }
    let fp = present(&v, "(x \\/ star(x)) = one")?;
    let r = exact_type_of_algebra(&v, &fp, N_MAX)?;
    pass &= r.type_tag == TypeTag::Finitary(2);
    notes.push(format!("type {}", r.type_tag));
    a.embeddings.push((v, fp, r));
    outcome(pass, notes.join("; "))
}

/// The Boolean function with truth table `mask` on (x, y) as a disjunction of minterms.
fn boolean_function(v: &VarietySpec, mask: u8) -> Result<Term> {
    let mut minterms = Vec::new();
    for p in 0..4 {
        if mask >> p & 1 == 1 {
            let lit = |name: &str, bit: bool| {
                if bit {
                    name.to_string()
                } else {
                    format!("neg({name})")
                }
            };
            minterms.push(format!(
                "({} /\\ {})",
                lit("x", p & 2 != 0),
                lit("y", p & 1 != 0)
            ));
        }
    }
    let src = if minterms.is_empty() {
        "zero".to_string()
    } else {
        let first = minterms[0].clone();
        minterms[1..]
            .iter()
            .fold(first, |acc, m| format!("({acc} \\/ {m})"))
    };
    v.parse_term(&src)
}

fn c4() -> Result<Outcome> {
    let v = builtin("boolean", None)?;
    let sig = v.signature().clone();
    let vars = vec!["x".to_string(), "y".to_string()];
    let one = v.parse_term("one")?;
    let mut checked = 0;
    let mut failures = Vec::new();
    for mask in 0..16u8 {
        let phi = boolean_function(&v, mask)?;
        let sigma = vec![Identity::new(phi.clone(), one.clone())];
        let all: Vec<SemanticUnifier> = (1..=2)
            .map(|n| enumerate_unifiers(&v, &sigma, &vars, n))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if mask == 0 {
            if !all.is_empty() {
                failures.push("constant zero has unifiers".to_string());
            }
            continue;
        }
        let mgu = boolean_mgu(&sig, &phi, &vars)?;
        let m = SemanticUnifier::from_substitution(&v, &sigma, &vars, &mgu, &vars)?;
        for u in &all {
            if !compare_exact_order(&m, u)? {
                failures.push(format!("mask {mask}: not ⊑-maximum"));
                break;
            }
            if compare_instantiation(&v, &m, u)?.is_none() {
                failures.push(format!("mask {mask}: not ≼-greatest"));
                break;
            }
        }
        checked += all.len();
    }
    outcome(
        failures.is_empty(),
        format!("16 functions, {checked} unifiers into F(1), F(2); failures {failures:?}"),
    )
}

fn c5() -> Result<Outcome> {
    let v = builtin("willard", None)?;
    let sig = v.signature().clone();
    let mut pass = true;
    let mut notes = Vec::new();
    for (src, want) in [
        ("((x . 1) . 1)", "x 1"),
        ("(x . (y . z))", "0"),
        ("(((x . y) . z) . y)", "x y z 1"),
    ] {
        let got = normalize(&sig, &v.parse_term(src)?)?.to_string();
        pass &= got == want;
        notes.push(format!("{src} -> {got}"));
    }
    let r = verify_unifier_families(WILLARD_FAMILY, WILLARD_BOUND, WILLARD_EXACT_BOUND)?;
    pass &= r.all_pass();
    notes.push(format!(
        "σ1..σ3 unify xy=0: {:?}, ⊑-incomparable: {}; σ1..σ{WILLARD_FAMILY} ≼-incomparable at bound {WILLARD_BOUND}: {}; minimal exact: {} (up to F({}))",
        r.unify_xy_zero,
        r.exact_incomparable,
        r.instantiations.iter().all(|t| !t.2),
        r.minimal_exact,
        r.exact_bound
    ));
    outcome(pass, notes.join("; "))
}

const BRIDGE: &[(&str, &[&str])] = &[
    (
        "distributive-lattices",
        &[
            "(x /\\ y) = (z \\/ w)",
            "(x /\\ y) = x",
            "x = y",
            "(x \\/ y) = z",
            "(x /\\ y) = (x /\\ z)",
            "(x \\/ y) = (x /\\ z)",
            "(x /\\ (y \\/ z)) = x",
            "x = (y /\\ z)",
        ],
    ),
    (
        "stone",
        &[
            "(x \\/ star(x)) = one",
            "(x /\\ y) = zero",
            "star(x) = y",
            "x = star(star(x))",
            "(x /\\ star(y)) = zero",
            "star(x) = zero",
            "(x \\/ y) = one",
        ],
    ),
    (
        "kleene",
        &[
            "(x \\/ neg(x)) = one",
            "x = neg(y)",
            "(x /\\ y) = neg(x)",
            "(x \\/ y) = one",
            "(x /\\ neg(y)) = zero",
            "x = (x /\\ neg(x))",
            "(x /\\ neg(x)) = zero",
        ],
    ),
];

fn c6(a: &mut Audit) -> Result<Outcome> {
    let (mut total, mut both, mut mismatches) = (0, 0, Vec::new());
    for (name, sigmas) in BRIDGE {
        let v = builtin(name, None)?;
        for src in *sigmas {
            let sigma = v.parse_identities(src)?;
            let vars = exunif::term::identities_vars(&sigma);
            let fp = finitely_present(&v, &sigma, &vars)?;
            let alg = match exact_type_of_algebra(&v, &fp, N_MAX) {
                Ok(r) => r,
                Err(Error::NotUnifiable) => continue,
                Err(e) => return Err(e),
            };
            let syn = exact_type_syntactic(&v, &sigma, &vars, &default_schedule(&vars, N_MAX))?;
            total += 1;
            if alg.certified() && syn.certified {
                both += 1;
                if alg.type_tag != syn.type_tag {
                    mismatches.push(format!(
                        "{name} {src}: algebraic {} syntactic {}",
                        alg.type_tag, syn.type_tag
                    ));
                }
            }
            a.embeddings.push((v.clone(), fp, alg));
        }
    }
    outcome(
        total >= BRIDGE_MIN && mismatches.is_empty(),
        format!(
            "{total} presentations, {both} certified on both routes; mismatches {mismatches:?}"
        ),
    )
}

const REDUCE: &[(&str, &str)] = &[
    (
        "pcdl-B2",
        "(x \\/ star(x)) = one => x = one | star(x) = one",
    ),
    (
        "pcdl-B2",
        "(x \\/ star(x)) = one => x = one | star(x) = one | (x /\\ one) = one",
    ),
    ("distributive-lattices", "(x /\\ y) = x => (x \\/ y) = y"),
    (
        "distributive-lattices",
        "(x /\\ y) = x => (x \\/ y) = y | x = y | (x /\\ z) = (y /\\ z)",
    ),
    ("stone", "(x /\\ y) = zero => (y /\\ x) = zero | x = zero"),
    (
        "bounded-distributive-lattices",
        "(x \\/ y) = one => x = one | y = one",
    ),
    (
        "bounded-distributive-lattices",
        "(x \\/ y) = one => x = one | y = one | (x /\\ y) = one",
    ),
    ("kleene", "(x \\/ neg(x)) = one => x = one | neg(x) = one"),
    (
        "de-morgan",
        "(x \\/ neg(x)) = one => x = one | neg(x) = one",
    ),
    ("boolean", "(x /\\ y) = one => x = one"),
];

fn c7(a: &mut Audit) -> Result<Outcome> {
    let mut pass = REDUCE.len() == REDUCE_CLAUSES;
    let mut notes = Vec::new();
    for (name, src) in REDUCE {
        let v = builtin(name, None)?;
        let clause = v.parse_clause(src)?;
        match reduce_conclusions(&v, &clause, None) {
            Ok(r) => {
                let ok = r.kept.len() <= r.mu_set_size && r.verdict.is_admissible();
                pass &= ok;
                notes.push(format!(
                    "{name}: kept {:?} of {}, μ-set {}",
                    r.kept,
                    clause.conclusions.len(),
                    r.mu_set_size
                ));
                a.verdicts.push((v.clone(), r.clause, r.verdict));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name} {src}: {e}"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

fn c8() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(PREORDER_SEED);
    let mut same = 0;
    for _ in 0..PREORDER_SAMPLES {
        let n = rng.gen_range(1..=PREORDER_MAX_POINTS);
        let density = rng.gen_range(0.1..0.6);
        let p = PreorderedSet::random(&mut rng, n, density)?;
        if p.same_cardinality_property()? {
            same += 1;
        }
    }
    let mut preserved = 0;
    for _ in 0..EQUIVALENCE_SAMPLES {
        let n = rng.gen_range(1..=PREORDER_MAX_POINTS);
        let density = rng.gen_range(0.1..0.6);
        let p = PreorderedSet::random(&mut rng, n, density)?;
        let copies: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let (q, origin) = p.inflate(&copies);
        let e: Vec<usize> = (0..n)
            .map(|i| {
                origin
                    .iter()
                    .position(|&o| o == i)
                    .expect("every point is copied")
            })
            .collect();
        if check_equivalence(&p, &q, &e)
            && p.classify_type() == q.classify_type()
            && p.mu_set().len() == q.mu_set().len()
        {
            preserved += 1;
        }
    }
    outcome(
        same == PREORDER_SAMPLES && preserved == EQUIVALENCE_SAMPLES,
        format!(
            "same-cardinality {same}/{PREORDER_SAMPLES}; type preserved {preserved}/{EQUIVALENCE_SAMPLES}"
        ),
    )
}

fn c9() -> Result<Outcome> {
    let cases: &[(&str, &[(usize, usize)])] = &[
        ("distributive-lattices", &[(1, 1), (2, 4), (3, 18)]),
        ("boolean", &[(1, 4), (2, 16)]),
        ("bounded-distributive-lattices", &[(1, 3), (2, 6)]),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, sizes) in cases {
        let v = builtin(name, None)?;
        let gens: Vec<&exunif::finalg::FiniteAlgebra> =
            v.generators().iter().map(|g| g.as_ref()).collect();
        for &(n, want) in *sizes {
            let closure = free_algebra(&v, n)?.size();
            let oracle = if gens.len() == 1 {
                common::term_function_count(gens[0], n)
            } else {
                let prod = exunif::finalg::product(&gens)?;
                common::term_function_count(&prod, n)
            };
            pass &= closure == want && oracle == want;
            notes.push(format!("{name} F({n}) = {closure}/{oracle}"));
        }
        let (d1, d2) = (tempfile::tempdir()?, tempfile::tempdir()?);
        let n = sizes.last().expect("sizes").0;
        for d in [d1.path(), d2.path()] {
            let fresh = builtin_fresh(name, None)?;
            fresh.set_cache_dir(Some(d.to_path_buf()));
            free_algebra(&fresh, n)?;
        }
        let rel = Path::new(name).join(format!("{n}.alg.json"));
        let same = std::fs::read(d1.path().join(&rel))? == std::fs::read(d2.path().join(&rel))?;
        let reload = builtin_fresh(name, None)?;
        reload.set_cache_dir(Some(d1.path().to_path_buf()));
        let reloaded = free_algebra(&reload, n)?.size() == sizes.last().expect("sizes").1;
        pass &= same && reloaded;
        notes.push(format!("cache identical: {same}, reload: {reloaded}"));
    }
    outcome(pass, notes.join("; "))
}

fn c10(a: &Audit) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut not_adm = 0;
    for (v, clause, verdict) in &a.verdicts {
        if matches!(verdict, AdmissibilityVerdict::NotAdmissible { .. }) {
            not_adm += 1;
        }
        if let Err(e) = audit(v, clause, verdict) {
            failures.push(format!("witness: {e}"));
        }
    }
    let mut embeddings = 0;
    let mut projective = 0;
    for (v, fp, r) in &a.embeddings {
        for m in &r.minimal {
            if let ExactnessVerdict::Exact { n, embedding } = &m.verdict {
                let (q, _) = quotient(&fp.algebra, &m.theta)?;
                embeddings += 1;
                if let Err(e) = validate_embedding(v, &Arc::new(q), *n, embedding) {
                    failures.push(format!("embedding: {e}"));
                }
            }
        }
        if fp.vars.len() <= 2 {
            match is_projective(v.as_ref(), fp) {
                Ok(Some(w)) => {
                    projective += 1;
                    if let Err(e) = validate_projectivity(v, &fp.algebra, &w) {
                        failures.push(format!("projectivity: {e}"));
                    }
                }
                Ok(None) | Err(Error::CapExceeded(_)) | Err(Error::BudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let v = builtin("willard", None)?;
    let sig = v.signature().clone();
    let ops = Ops::find(&sig)?;
    let mut steps = 0;
    for src in [
        "((x . 1) . 1)",
        "(x . (y . z))",
        "(((x . y) . z) . y)",
        "(((x . y) . x) . (y . 1))",
        "((((x . y) . z) . x) . z)",
    ] {
        let nf = normalize(&sig, &v.parse_term(src)?)?;
        for s in &nf.steps {
            steps += 1;
            if !s.is_instance(&ops) {
                failures.push(format!("willard step {}", s.to_string(&sig)));
            }
        }
        if !willard::equal_in_willard(&sig, &v.parse_term(src)?, &nf.term)? {
            failures.push(format!("willard normal form of {src}"));
        }
    }
    outcome(
        failures.is_empty() && not_adm > 0 && embeddings > 0 && projective > 0 && steps > 0,
        format!(
            "{not_adm} NOT_ADMISSIBLE witnesses, {embeddings} embeddings, {projective} projectivity witnesses, {steps} rewrite steps; failures {failures:?}"
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags; listing mode must not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut audit = Audit::default();
    let runs: Vec<(&str, Result<Outcome>)> = vec![
        ("1 distributive lattices unitary", c1(&mut audit)),
        ("2 stone random presentations", c2(&mut audit)),
        ("3 B2' admissibility trio", c3(&mut audit)),
        ("4 boolean mgu exhaustive", c4()),
        ("5 willard example", c5()),
        ("6 syntactic-algebraic bridge", c6(&mut audit)),
        ("7 conclusion reduction", c7(&mut audit)),
        ("8 preorder laws", c8()),
        ("9 free algebra sizes and cache", c9()),
        ("10 soundness audits", c10(&audit)),
    ];
    let mut failed = 0;
    for (name, r) in runs {
        let (pass, detail) = match r {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
