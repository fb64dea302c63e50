//! Parallel (default rayon pool) against sequential (one-thread pool) runs of
//! the closure and homomorphism searches. Build with `--no-default-features`
//! for the rayon-free code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use exunif::catalog::{builtin, builtin_fresh};
use exunif::exactness::{exact_kernels, exact_type_of_algebra};
use exunif::term::identities_vars;
use exunif::unify::enumerate_unifiers;
use exunif::variety::{finitely_present, free_algebra};
use exunif::with_jobs;

const MODES: [(&str, usize); 2] = [("parallel", 0), ("sequential", 1)];

fn free_closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("free_closure");
    g.sample_size(10);
    for (name, n) in [("distributive-lattices", 4), ("stone", 2), ("kleene", 2)] {
        for (mode, jobs) in MODES {
            g.bench_with_input(
                BenchmarkId::new(mode, format!("{name}/{n}")),
                &n,
                |b, &n| {
                    b.iter(|| {
                        // A fresh variety each time so the memo table is empty.
                        let v = builtin_fresh(name, None).unwrap();
                        with_jobs(jobs, || free_algebra(&v, n).unwrap().size())
                    })
                },
            );
        }
    }
    g.finish();
}

fn hom_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("hom_search");
    g.sample_size(10);
    for (name, src, n_max) in [
        ("pcdl-B2", "(x \\/ star(x)) = one", 2),
        ("kleene", "(x \\/ neg(x)) = one", 2),
        ("distributive-lattices", "(x /\\ y) = (z \\/ w)", 4),
    ] {
        let v = builtin(name, None).unwrap();
        let sigma = v.parse_identities(src).unwrap();
        let vars = identities_vars(&sigma);
        let fp = finitely_present(&v, &sigma, &vars).unwrap();
        for n in 1..=n_max {
            free_algebra(&v, n).unwrap();
        }
        for (mode, jobs) in MODES {
            g.bench_function(BenchmarkId::new(mode, format!("kernels/{name}")), |b| {
                b.iter(|| {
                    with_jobs(jobs, || {
                        exact_kernels(&v, &fp, n_max).unwrap().kernels.len()
                    })
                })
            });
            g.bench_function(BenchmarkId::new(mode, format!("type/{name}")), |b| {
                b.iter(|| {
                    with_jobs(jobs, || {
                        exact_type_of_algebra(&v, &fp, n_max).unwrap().minimal.len()
                    })
                })
            });
            g.bench_function(BenchmarkId::new(mode, format!("unifiers/{name}")), |b| {
                b.iter(|| {
                    with_jobs(jobs, || {
                        enumerate_unifiers(&v, &sigma, &vars, 2).unwrap().len()
                    })
                })
            });
        }
    }
    g.finish();
}

criterion_group!(benches, free_closure, hom_search);
criterion_main!(benches);
