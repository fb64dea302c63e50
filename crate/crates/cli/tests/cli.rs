use std::process::{Command, Output};

fn exunif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exunif"))
        .args(args)
        .output()
        .expect("run exunif")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn dl_exact_type_is_unitary() {
    let o = exunif(&[
        "exact-type",
        "--variety",
        "distributive-lattices",
        "--sigma",
        "(x /\\ y) = (z \\/ w)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("UNITARY (certified)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn single_conclusion_not_admissible() {
    let o = exunif(&[
        "admissible",
        "--variety",
        "pcdl-B2",
        "--clause",
        "(x \\/ star(x)) = one => x = one",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("NOT_ADMISSIBLE"));
    assert!(out.contains("witness unifier"));
}

#[test]
fn bounded_verdict_exits_two() {
    let o = exunif(&[
        "admissible",
        "--bounded",
        "--variety",
        "pcdl-B2",
        "--clause",
        "(x \\/ star(x)) = one => x = one | star(x) = one",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("ADMISSIBLE_UP_TO("));
}

#[test]
fn admissible_json_has_witness() {
    let o = exunif(&[
        "admissible",
        "--format",
        "json",
        "--variety",
        "pcdl-B2",
        "--clause",
        "(x \\/ star(x)) = one => star(x) = one",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "NOT_ADMISSIBLE");
    assert!(v["result"]["witness"]["assignment"].is_array());
}

#[test]
fn boolean_free_algebra_dump() {
    let o = exunif(&[
        "free",
        "--variety",
        "boolean",
        "-n",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["size"], 16);
}

#[test]
fn errors_exit_one() {
    let o = exunif(&["free", "--variety", "no-such-variety", "-n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = exunif(&["exact-type", "--variety", "boolean", "--sigma", "(x /\\ y"]);
    assert_eq!(o.status.code(), Some(1));
    let o = exunif(&["free", "--variety", "boolean", "-n", "1", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dot_exports() {
    let o = exunif(&[
        "con",
        "--variety",
        "distributive-lattices",
        "-n",
        "2",
        "--format",
        "dot",
    ]);
    let out = stdout(&o);
    assert!(out.starts_with("digraph"));
    let o = exunif(&[
        "exact-type",
        "--variety",
        "pcdl-B2",
        "--sigma",
        "(x \\/ star(x)) = one",
        "--format",
        "dot",
    ]);
    let out = stdout(&o);
    assert_eq!(out.matches("label").count(), 2, "{out}");
    assert_eq!(out.matches("->").count(), 0);
    // No unifiers, so no coexact preorder to draw.
    let o = exunif(&[
        "exact-type",
        "--variety",
        "bounded-distributive-lattices",
        "--sigma",
        "one = zero",
        "--format",
        "dot",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not unifiable"));
}

#[test]
fn table1_is_reproducible() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let o = exunif(&["report-table1", "--out", d.path().to_str().unwrap()]);
        assert_ne!(
            o.status.code(),
            Some(1),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    for f in ["table1.csv", "table1.json", "table1.txt"] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
    let csv = std::fs::read_to_string(d1.path().join("table1.csv")).unwrap();
    assert!(csv.lines().count() > 5);
    assert!(!csv.contains(",FAIL,"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d1.path().join("table1.json")).unwrap()).unwrap();
    assert_eq!(
        json["rows"].as_array().unwrap().len(),
        csv.lines().count() - 1
    );
}

#[test]
fn cache_and_jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "free",
        "--variety",
        "distributive-lattices",
        "-n",
        "3",
        "--format",
        "json",
    ];
    let plain = exunif(&args);
    let mut with_cache = args.to_vec();
    with_cache.extend(["--cache-dir", cache]);
    let first = exunif(&with_cache);
    let file = dir.path().join("distributive-lattices").join("3.alg.json");
    let bytes = std::fs::read(&file).unwrap();
    let second = exunif(&with_cache);
    assert_eq!(std::fs::read(&file).unwrap(), bytes);
    let mut seq = args.to_vec();
    seq.extend(["--jobs", "1"]);
    let seq = exunif(&seq);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(plain.stdout, second.stdout);
    assert_eq!(plain.stdout, seq.stdout);
}

#[test]
fn willard_commands() {
    let o = exunif(&["willard", "normalize", "(((x . y) . z) . y)"]);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("x y z 1"));
    assert!(out.lines().count() > 1);
    let o = exunif(&["willard", "equal", "(x . (y . z))", "0"]);
    assert_eq!(stdout(&o).trim(), "EQUAL");
}
