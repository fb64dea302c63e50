//! Command-line front end. Exit status: 0 for a certified answer, 2 for a
//! bounded or unknown one, 1 for errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use exunif::admissibility::{self, AdmissibilityVerdict};
use exunif::catalog;
use exunif::exactness::{self, ExactnessVerdict};
use exunif::finalg::{algebra_to_json, all_congruences, export_con_dot, CongruenceOptions};
use exunif::preorder::TypeTag;
use exunif::term::{identities_vars, random_identity, Identity};
use exunif::unify;
use exunif::variety::{self, FinitelyPresented, ValidityVerdict, VarietySpec};
use exunif::{willard, Error, Result};

#[derive(Parser)]
#[command(
    name = "exunif",
    version,
    about = "Exact unification and admissibility"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for cached free algebras.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Element budget for free and finitely presented algebras.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Seed for randomized corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(clap::Args)]
struct VarietyArg {
    /// Catalog name (e.g. `stone`, `pcdl-B2`) or a variety JSON file.
    #[arg(long)]
    variety: String,
}

#[derive(clap::Args)]
struct SigmaArg {
    /// Comma-separated identities, e.g. "(x /\ y) = (z \/ w)".
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    /// Generator variables (default: those of Σ in order of occurrence).
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Free algebra F(n).
    Free {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Finitely presented algebra Fp(Σ, X).
    Fp {
        #[command(flatten)]
        v: VarietyArg,
        #[command(flatten)]
        s: SigmaArg,
    },
    /// Congruence lattice of Fp(Σ) or of F(n).
    Con {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "n")]
        sigma: Option<String>,
        #[arg(short = 'n')]
        n: Option<usize>,
    },
    /// Whether Fp(Σ) embeds into a finitely generated free algebra.
    Exact {
        #[command(flatten)]
        v: VarietyArg,
        #[command(flatten)]
        s: SigmaArg,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Exact unification type of Σ.
    ExactType {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
        /// `algebraic` (minimal exact congruences), `syntactic` (unifier kernels) or `both`.
        #[arg(long, value_enum, default_value_t = Route::Algebraic)]
        route: Route,
        /// Classify this many random presentations (<= 3 variables, depth <= 2) instead.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Unifiers of Σ into F(n), one per kernel.
    Unifiers {
        #[command(flatten)]
        v: VarietyArg,
        #[command(flatten)]
        s: SigmaArg,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Admissibility of a clause `Σ => Δ`.
    Admissible {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true)]
        clause: String,
        #[arg(long)]
        n_max: Option<usize>,
        /// Only the bounded kernel search; no upgrade through a complete set.
        #[arg(long)]
        bounded: bool,
    },
    /// Minimal conclusion subset of an admissible clause.
    Reduce {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true)]
        clause: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Whether Σ is admissibly reducible.
    Reducible {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Validity of a clause in the variety.
    Validity {
        #[command(flatten)]
        v: VarietyArg,
        #[arg(long, allow_hyphen_values = true)]
        clause: String,
    },
    /// Willard's groupoids.
    Willard {
        #[command(subcommand)]
        cmd: WillardCmd,
    },
    /// Built-in varieties.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Exact types of the catalog rows against their expected values.
    ReportTable1 {
        /// Directory for table1.csv, table1.json and table1.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Algebraic,
    Syntactic,
    Both,
}

#[derive(Subcommand)]
enum WillardCmd {
    Normalize {
        #[arg(allow_hyphen_values = true)]
        term: String,
    },
    Equal {
        t1: String,
        t2: String,
    },
    /// Checks both unifier families.
    Demo {
        #[arg(long, default_value_t = 5)]
        family: usize,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { name: String },
}

/// Answer kind, mapped to the exit status.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Certified,
    Bounded,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match exunif::with_jobs(cli.jobs, || run(&cli)) {
        Ok(Outcome::Certified) => ExitCode::from(0),
        Ok(Outcome::Bounded) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli, name: &str) -> Result<Arc<VarietySpec>> {
    let path = Path::new(name);
    let mut v = if name.ends_with(".json") || path.is_file() {
        variety::load_variety(path)?
    } else {
        catalog::builtin_fresh(name, None)?
    };
    if let Some(b) = cli.budget {
        if b == 0 {
            return Err(Error::InvalidParam("budget must be positive".into()));
        }
        v.bounds.size_budget = b;
    }
    v.set_cache_dir(cli.cache_dir.clone());
    Ok(Arc::new(v))
}

fn presentation(v: &VarietySpec, s: &SigmaArg) -> Result<(Vec<Identity>, Vec<String>)> {
    let sigma = v.parse_identities(&s.sigma)?;
    let vars = s.vars.clone().unwrap_or_else(|| default_vars(&sigma));
    Ok((sigma, vars))
}

fn default_vars(sigma: &[Identity]) -> Vec<String> {
    let mut vars = identities_vars(sigma);
    if vars.is_empty() {
        vars.push("x".into());
    }
    vars
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn unsupported(cli: &Cli, what: &str) -> Result<Outcome> {
    let f = match cli.format {
        Format::Text => "text",
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Csv => "csv",
    };
    Err(Error::InvalidParam(format!(
        "format `{f}` is not supported by `{what}`"
    )))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Free { v, n } => {
            let v = load(cli, &v.variety)?;
            let f = variety::free_algebra(&v, *n)?;
            match cli.format {
                Format::Json => println!("{}", algebra_to_json(f.algebra())),
                Format::Text => {
                    println!("F({n}) in {}: {} elements", v.name, f.size());
                    for e in 0..f.size() as u32 {
                        println!("  {e}: {}", f.witness(e).to_string(v.signature()));
                    }
                }
                _ => return unsupported(cli, "free"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Fp { v, s } => {
            let v = load(cli, &v.variety)?;
            let (sigma, vars) = presentation(&v, s)?;
            let fp = variety::finitely_present(&v, &sigma, &vars)?;
            match cli.format {
                Format::Json => println!("{}", algebra_to_json(&fp.algebra)),
                Format::Text => {
                    println!("Fp({}) : {} elements", s.sigma, fp.size());
                    for e in 0..fp.size() as u32 {
                        println!("  {e}: {}", fp.witness(e).to_string(v.signature()));
                    }
                }
                _ => return unsupported(cli, "fp"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Con { v, sigma, n } => {
            let v = load(cli, &v.variety)?;
            let a = match (sigma, n) {
                (Some(s), _) => {
                    let sigma = v.parse_identities(s)?;
                    let vars = default_vars(&sigma);
                    variety::finitely_present(&v, &sigma, &vars)?.algebra
                }
                (None, Some(n)) => variety::free_algebra(&v, *n)?.algebra().clone(),
                (None, None) => {
                    return Err(Error::InvalidParam("give --sigma or -n".into()));
                }
            };
            let cons = all_congruences(&a, CongruenceOptions::default())?;
            match cli.format {
                Format::Dot => print!("{}", export_con_dot(&cons)),
                Format::Json => print_json(&json!({ "size": a.size(), "congruences": cons })),
                Format::Text => {
                    println!("|A| = {}, |Con(A)| = {}", a.size(), cons.len());
                    for c in &cons {
                        println!("  {} blocks: {}", c.num_blocks(), c.pairs_label());
                    }
                }
                Format::Csv => return unsupported(cli, "con"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Exact { v, s, n_max } => {
            let v = load(cli, &v.variety)?;
            let (sigma, vars) = presentation(&v, s)?;
            let fp = variety::finitely_present(&v, &sigma, &vars)?;
            let n_max = n_max.unwrap_or_else(|| exactness::default_n_max(&fp.algebra));
            let verdict = exactness::is_exact(&v, &fp, n_max)?;
            if let ExactnessVerdict::Exact { n, embedding } = &verdict {
                exactness::validate_embedding(&v, &fp.algebra, *n, embedding)?;
            }
            match cli.format {
                Format::Json => print_json(&json!({ "size": fp.size(), "result": verdict })),
                Format::Text => println!("{}", verdict.summary()),
                _ => return unsupported(cli, "exact"),
            }
            Ok(if verdict.is_unknown() {
                Outcome::Bounded
            } else {
                Outcome::Certified
            })
        }
        Cmd::ExactType {
            v,
            sigma,
            n_max,
            route,
            random,
        } => {
            let v = load(cli, &v.variety)?;
            match (sigma, random) {
                (_, Some(k)) => random_types(cli, &v, *k, *n_max),
                (Some(s), None) => {
                    let sigma = v.parse_identities(s)?;
                    exact_type(cli, &v, &sigma, *n_max, *route)
                }
                (None, None) => Err(Error::InvalidParam("give --sigma or --random".into())),
            }
        }
        Cmd::Unifiers { v, s, n } => {
            let v = load(cli, &v.variety)?;
            let (sigma, vars) = presentation(&v, s)?;
            let us = unify::enumerate_unifiers(&v, &sigma, &vars, *n)?;
            let sig = v.signature();
            match cli.format {
                Format::Json => {
                    let items: Vec<_> = us
                        .iter()
                        .map(|u| {
                            json!({
                                "substitution": u.substitution.to_string(sig),
                                "kernel_blocks": u.kernel.num_blocks(),
                                "kernel": u.kernel.classes(),
                                "codomain": u.codomain_names,
                            })
                        })
                        .collect();
                    print_json(&json!({ "n": n, "unifiers": items }));
                }
                Format::Text => {
                    println!("{} unifiers into F({n}) up to kernel", us.len());
                    for u in &us {
                        println!(
                            "  {}  [{} blocks]",
                            u.substitution.to_string(sig),
                            u.kernel.num_blocks()
                        );
                    }
                }
                _ => return unsupported(cli, "unifiers"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Admissible {
            v,
            clause,
            n_max,
            bounded,
        } => {
            let v = load(cli, &v.variety)?;
            let c = v.parse_clause(clause)?;
            let verdict = if *bounded {
                admissibility::decide(&v, &c, *n_max)?
            } else {
                admissibility::decide_certified(&v, &c, *n_max)?
            };
            admissibility::audit(&v, &c, &verdict)?;
            match cli.format {
                Format::Json => print_json(&json!({ "clause": clause, "result": verdict })),
                Format::Text => {
                    println!("{}", verdict.label());
                    match &verdict {
                        AdmissibilityVerdict::NotAdmissible { witness } => {
                            println!("witness unifier into F({}):", witness.n);
                            if witness.assignment.is_empty() {
                                println!("  identity on the variables");
                            }
                            for (x, t) in &witness.assignment {
                                println!("  {x} -> {t}");
                            }
                        }
                        AdmissibilityVerdict::AdmissibleCertified { route } => {
                            println!("route: {route}")
                        }
                        AdmissibilityVerdict::AdmissibleUpTo { n, saturated } => println!(
                            "no counterexample into F(1..{n}); kernel set {}",
                            if *saturated {
                                "saturated"
                            } else {
                                "still growing"
                            }
                        ),
                        AdmissibilityVerdict::VacuouslyAdmissible => {
                            println!("premises are not unifiable")
                        }
                    }
                }
                _ => return unsupported(cli, "admissible"),
            }
            Ok(if verdict.is_certified() {
                Outcome::Certified
            } else {
                Outcome::Bounded
            })
        }
        Cmd::Reduce { v, clause, n_max } => {
            let v = load(cli, &v.variety)?;
            let c = v.parse_clause(clause)?;
            let r = admissibility::reduce_conclusions(&v, &c, *n_max)?;
            let text = r.clause.to_string(v.signature());
            match cli.format {
                Format::Json => print_json(&json!({ "reduced": text, "detail": r })),
                Format::Text => {
                    println!("{text}");
                    println!(
                        "kept {:?} of {} conclusions; μ-set size {}{}; {}",
                        r.kept,
                        c.conclusions.len(),
                        r.mu_set_size,
                        if r.mu_set_certified { "" } else { " (bounded)" },
                        r.verdict.label()
                    );
                }
                _ => return unsupported(cli, "reduce"),
            }
            Ok(if r.mu_set_certified && r.verdict.is_certified() {
                Outcome::Certified
            } else {
                Outcome::Bounded
            })
        }
        Cmd::Reducible { v, sigma, n_max } => {
            let v = load(cli, &v.variety)?;
            let sigma = v.parse_identities(sigma)?;
            let r = admissibility::check_admissibly_reducible(&v, &sigma, n_max.unwrap_or(3))?;
            match cli.format {
                Format::Json => print_json(&json!(r)),
                Format::Text => {
                    println!(
                        "{} (exact type {})",
                        if r.reducible {
                            "REDUCIBLE"
                        } else {
                            "NOT_REDUCIBLE"
                        },
                        r.type_tag
                    );
                    if let Some(d) = &r.discriminating {
                        println!("discriminating clause: {d}");
                        println!(
                            "  whole: {}; single conclusions: {}",
                            r.clause_verdict.as_deref().unwrap_or("-"),
                            r.single_verdicts.join(", ")
                        );
                    }
                }
                _ => return unsupported(cli, "reducible"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Validity { v, clause } => {
            let v = load(cli, &v.variety)?;
            let c = v.parse_clause(clause)?;
            let r = variety::validity(&v, &c)?;
            let sig = v.signature();
            match (&r, cli.format) {
                (ValidityVerdict::Valid, Format::Json) => print_json(&json!({ "valid": true })),
                (ValidityVerdict::Valid, Format::Text) => println!("VALID"),
                (ValidityVerdict::Invalid { theta, assignment }, Format::Json) => {
                    print_json(&json!({
                        "valid": false,
                        "countermodel_size": theta.num_blocks(),
                        "assignment": assignment.to_string(sig),
                    }))
                }
                (ValidityVerdict::Invalid { theta, assignment }, Format::Text) => {
                    println!("INVALID");
                    let a = if assignment.is_empty() {
                        "the canonical assignment".to_string()
                    } else {
                        assignment.to_string(sig)
                    };
                    println!(
                        "countermodel F(X)/Θ_Σ with {} elements under {a}",
                        theta.num_blocks()
                    );
                }
                _ => return unsupported(cli, "validity"),
            }
            Ok(Outcome::Certified)
        }
        Cmd::Willard { cmd } => run_willard(cli, cmd),
        Cmd::Catalog { cmd } => run_catalog(cli, cmd),
        Cmd::ReportTable1 { out, n_max } => {
            let t = exunif::report::table1_regression(*n_max)?;
            std::fs::create_dir_all(out)?;
            std::fs::write(out.join("table1.csv"), t.to_csv()?)?;
            std::fs::write(out.join("table1.json"), t.to_json()? + "\n")?;
            std::fs::write(out.join("table1.txt"), t.summary())?;
            match cli.format {
                Format::Csv => print!("{}", t.to_csv()?),
                Format::Json => println!("{}", t.to_json()?),
                _ => print!("{}", t.summary()),
            }
            let fail = t
                .rows
                .iter()
                .any(|r| r.status == exunif::report::Status::Fail);
            let bounded = t
                .rows
                .iter()
                .any(|r| r.status == exunif::report::Status::Bounded);
            if fail {
                Err(Error::Undecided(
                    "some rows disagree with the expected type".into(),
                ))
            } else if bounded {
                Ok(Outcome::Bounded)
            } else {
                Ok(Outcome::Certified)
            }
        }
    }
}

fn exact_type(
    cli: &Cli,
    v: &VarietySpec,
    sigma: &[Identity],
    n_max: Option<usize>,
    route: Route,
) -> Result<Outcome> {
    let vars = default_vars(sigma);
    let mut certified = true;
    let mut json_out = serde_json::Map::new();
    let mut lines = Vec::new();
    let mut algebraic: Option<TypeTag> = None;
    if route != Route::Syntactic {
        let fp = variety::finitely_present(v, sigma, &vars)?;
        let n = n_max.unwrap_or_else(|| exactness::default_n_max(&fp.algebra));
        let r = exactness::exact_type_of_algebra(v, &fp, n)?;
        audit_minimal(v, &fp, &r)?;
        certified &= r.certified();
        lines.push(format!(
            "{} ({})",
            r.type_tag,
            if r.certified() {
                "certified"
            } else {
                "bounded"
            }
        ));
        for m in &r.minimal {
            lines.push(format!(
                "  minimal exact congruence: {} classes, {}",
                m.quotient_size,
                m.verdict.summary()
            ));
        }
        algebraic = Some(r.type_tag);
        json_out.insert("algebraic".into(), json!(r));
    }
    if route != Route::Algebraic {
        let n = n_max.unwrap_or(vars.len().max(3));
        let schedule = unify::default_schedule(&vars, n);
        let r = unify::exact_type_syntactic(v, sigma, &vars, &schedule)?;
        if route == Route::Syntactic {
            certified &= r.certified;
            lines.push(format!(
                "{} ({})",
                r.type_tag,
                if r.certified { "certified" } else { "bounded" }
            ));
        } else {
            lines.push(format!(
                "syntactic route: {} ({})",
                r.type_tag,
                if r.certified { "certified" } else { "bounded" }
            ));
            if let Some(a) = &algebraic {
                if r.certified && a.is_certified() && *a != r.type_tag {
                    return Err(Error::Undecided(format!(
                        "routes disagree: algebraic {a}, syntactic {}",
                        r.type_tag
                    )));
                }
            }
        }
        json_out.insert("syntactic".into(), json!(r));
    }
    match cli.format {
        Format::Json => print_json(&serde_json::Value::Object(json_out)),
        Format::Text => lines.iter().for_each(|l| println!("{l}")),
        Format::Dot => {
            let fp = variety::finitely_present(v, sigma, &vars)?;
            let n = n_max.unwrap_or_else(|| exactness::default_n_max(&fp.algebra));
            let p = exactness::enumerate_coexact(v, &fp, n)?;
            print!("{}", p.to_dot("coexact"));
        }
        Format::Csv => return unsupported(cli, "exact-type"),
    }
    Ok(if certified {
        Outcome::Certified
    } else {
        Outcome::Bounded
    })
}

/// Re-checks every embedding behind a minimal exact congruence.
fn audit_minimal(
    v: &VarietySpec,
    fp: &FinitelyPresented,
    r: &exactness::ExactTypeReport,
) -> Result<()> {
    for m in &r.minimal {
        if let ExactnessVerdict::Exact { n, embedding } = &m.verdict {
            let (q, _) = exunif::finalg::quotient(&fp.algebra, &m.theta)?;
            exactness::validate_embedding(v, &Arc::new(q), *n, embedding)?;
        }
    }
    Ok(())
}

fn random_types(cli: &Cli, v: &VarietySpec, k: usize, n_max: Option<usize>) -> Result<Outcome> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
    let mut rows = Vec::new();
    let mut certified = true;
    let mut skipped = 0;
    while rows.len() < k {
        let nv = rand::Rng::gen_range(&mut rng, 1..=3);
        let vars: Vec<String> = ["x", "y", "z"][..nv]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let sigma = vec![random_identity(v.signature(), &vars, 2, &mut rng)];
        let text = sigma[0].to_string(v.signature());
        let fp = variety::finitely_present(v, &sigma, &default_vars(&sigma))?;
        let n = n_max.unwrap_or_else(|| exactness::default_n_max(&fp.algebra));
        let (tag, minimal) = match exactness::exact_type_of_algebra(v, &fp, n) {
            Ok(r) => {
                audit_minimal(v, &fp, &r)?;
                certified &= r.certified();
                (r.type_tag.to_string(), r.minimal.len())
            }
            Err(Error::NotUnifiable) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        rows.push((text, fp.size(), tag, minimal));
    }
    match cli.format {
        Format::Json => print_json(&json!(rows
            .iter()
            .map(|(s, size, t, m)| json!({ "sigma": s, "size": size, "type": t, "minimal": m }))
            .collect::<Vec<_>>())),
        Format::Text => {
            for (s, size, t, m) in &rows {
                println!("{t:<20} |A|={size:<6} minimal={m}  {s}");
            }
            println!("({skipped} non-unifiable samples skipped)");
        }
        _ => return unsupported(cli, "exact-type --random"),
    }
    Ok(if certified {
        Outcome::Certified
    } else {
        Outcome::Bounded
    })
}

fn run_willard(cli: &Cli, cmd: &WillardCmd) -> Result<Outcome> {
    let sig = catalog::willard_signature();
    let parse = |s: &str| exunif::term::parse_term(&sig, s);
    match cmd {
        WillardCmd::Normalize { term } => {
            let r = willard::normalize(&sig, &parse(term)?)?;
            match cli.format {
                Format::Json => print_json(&json!({
                    "normal_form": r.to_string(),
                    "steps": r.steps.iter().map(|s| s.to_string(&sig)).collect::<Vec<_>>(),
                })),
                Format::Text => {
                    println!("{r}");
                    for s in &r.steps {
                        println!("  {}", s.to_string(&sig));
                    }
                }
                _ => return unsupported(cli, "willard normalize"),
            }
        }
        WillardCmd::Equal { t1, t2 } => {
            let eq = willard::equal_in_willard(&sig, &parse(t1)?, &parse(t2)?)?;
            match cli.format {
                Format::Json => print_json(&json!({ "equal": eq })),
                _ => println!("{}", if eq { "EQUAL" } else { "NOT_EQUAL" }),
            }
        }
        WillardCmd::Demo {
            family,
            bound,
            n_max,
        } => {
            let r = willard::verify_unifier_families(*family, *bound, *n_max)?;
            match cli.format {
                Format::Json => print_json(&json!(r)),
                _ => {
                    println!("xy = 0 unified by σ1, σ2, σ3: {:?}", r.unify_xy_zero);
                    println!("pairwise ⊑-incomparable: {}", r.exact_incomparable);
                    println!(
                        "minimal exact congruences up to F({}): {} (match σ1..σ3: {})",
                        r.exact_bound, r.minimal_exact, r.complete_at_bound
                    );
                    println!("xy = x1 unified by σ1..σ{}: {:?}", family, r.unify_xy_x1);
                    let found: Vec<_> = r.instantiations.iter().filter(|t| t.2).collect();
                    println!(
                        "instantiations among σ1..σ{family} with image length <= {}: {}",
                        r.bound,
                        if found.is_empty() {
                            "none".to_string()
                        } else {
                            format!("{found:?}")
                        }
                    );
                    println!("{}", if r.all_pass() { "PASS" } else { "FAIL" });
                }
            }
            if !r.all_pass() {
                return Err(Error::Undecided("unifier family checks failed".into()));
            }
            // Incomparability and minimality hold up to the search bounds.
            return Ok(Outcome::Bounded);
        }
    }
    Ok(Outcome::Certified)
}

fn run_catalog(cli: &Cli, cmd: &CatalogCmd) -> Result<Outcome> {
    match cmd {
        CatalogCmd::List => {
            let entries = catalog::entries();
            match cli.format {
                Format::Json => print_json(&json!(entries
                    .iter()
                    .map(|e| json!({ "name": e.name, "description": e.description }))
                    .collect::<Vec<_>>())),
                _ => {
                    for e in entries {
                        println!("{:<32} {}", e.name, e.description);
                    }
                }
            }
        }
        CatalogCmd::Show { name } => {
            let v = load(cli, name)?;
            match cli.format {
                Format::Json => println!("{}", variety::variety_to_json(&v)?),
                _ => {
                    println!("{}", v.name);
                    println!("  operations: {}", {
                        let ops: Vec<String> = v
                            .signature()
                            .ops
                            .iter()
                            .map(|o| format!("{}/{}", o.symbol, o.arity))
                            .collect();
                        ops.join(", ")
                    });
                    for g in v.generators() {
                        println!("  generator {} ({} elements)", g.name, g.size());
                    }
                    if !v.has_engine() && v.generators().is_empty() {
                        println!("  no generators");
                    }
                    println!(
                        "  flags: all_fp_exact={} admissibility_equals_validity={}",
                        v.flags.all_fp_exact, v.flags.admissibility_equals_validity
                    );
                    for (flag, note) in &v.citations {
                        println!("    {flag}: {note}");
                    }
                }
            }
        }
    }
    Ok(Outcome::Certified)
}
