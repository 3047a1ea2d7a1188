//! End-to-end runs of the binary: representative invocations, exit
//! codes, determinism of the text rendering, and the structured
//! round-trip at the process boundary.

use liepow_cli::report::{self, Body, Report};
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liepow"))
}

fn data_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn factors_generic_exterior_square() {
    let out = run(&["factors", "--type", "G", "--rank", "2", "--weight", "1,0", "--power", "a2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("factor l2"));
    assert!(text.contains("dim 14  x1"));
    assert!(text.contains("dim 7  x1"));
    assert!(text.contains("multiplicity free: yes"));
}

#[test]
fn factors_weight_shorthand_and_modular_prime() {
    let out = run(&["factors", "--type", "G", "--rank", "2", "--weight", "l1", "--prime-mode", "p=3", "--power", "a2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("regime: p = 3"));
    assert!(text.contains("dim 7  x2"));
    assert!(text.contains("multiplicity free: no"));
}

#[test]
fn reports_are_byte_identical_for_identical_config() {
    let args = ["factors", "--type", "F", "--rank", "4", "--weight", "l4", "--power", "a2", "--seed", "99"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn structured_output_round_trips_via_the_binary() {
    let out = run(&[
        "factors", "--type", "G", "--rank", "2", "--weight", "l1", "--power", "l3", "--format", "structured",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let parsed: Report = report::parse(&text).expect("valid structured report");
    assert_eq!(report::emit(&parsed), text);
    match &parsed.body {
        Body::Factors { target_dim, .. } => assert_eq!(*target_dim, 112),
        _ => panic!("wrong body kind"),
    }
}

#[test]
fn module_lattice_tasks() {
    let gens = data_file("data/generators/g2_p5.txt");
    let out = run(&["module", "--gens", gens.to_str().unwrap(), "--task", "lattice"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("multiplicity-free"));
    assert!(text.contains("node dims: 0, 14, 7, 21"));

    let gens = data_file("data/generators/g2_p3.txt");
    let out = run(&["module", "--gens", gens.to_str().unwrap(), "--task", "lattice"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("uniserial"));
    assert!(text.contains("node dims: 0, 7, 14, 21"));
}

#[test]
fn module_forms_task() {
    let gens = data_file("data/generators/g2_p7.txt");
    let out = run(&["module", "--gens", gens.to_str().unwrap(), "--task", "forms"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("symmetric, non-degenerate"));
    assert!(text.contains("form space dimension: 1"));
}

#[test]
fn pgroup_quotient_via_subspace_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    // One central direction of the d = 3 class-2 group.
    std::fs::write(&path, "# wedge coordinate (0,1)\n3 5 1\n1 0 0\n").unwrap();
    let out = run(&["pgroup", "--d", "3", "--p", "5", "--build", "gamma2", "--subspace", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("order = 5^5"));
    assert!(text.contains("derived dim = 2"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn pgroup_optimal_normalizer() {
    let out = run(&["pgroup", "--d", "7", "--p", "5", "--build", "optimal-g2-normalizer"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("order = 5^14"));
    assert!(text.contains("exponent = 5"));
    assert!(text.contains("nilpotency class = 2"));
    assert!(text.contains("module generators induce automorphisms (sampled): pass"));
}

#[test]
fn usage_errors_exit_two() {
    // Missing modular rows for this prime.
    let out = run(&["factors", "--type", "E", "--rank", "7", "--weight", "l7", "--prime-mode", "p=5", "--power", "l3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("p in [3, 7, 11, 19]"));

    // Class-3 group needs p > 3.
    let out = run(&["pgroup", "--d", "3", "--p", "3", "--build", "gamma3"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed prime mode.
    let out = run(&["factors", "--type", "G", "--rank", "2", "--weight", "l1", "--prime-mode", "sometimes", "--power", "a2"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown flag values are clap usage errors.
    let out = run(&["factors", "--type", "G", "--rank", "2", "--weight", "l1", "--power", "a5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cache_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["factors", "--type", "G", "--rank", "2", "--weight", "l2", "--power", "a2", "--cache-dir", cache];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}
