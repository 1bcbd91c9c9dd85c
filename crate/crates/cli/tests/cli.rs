use std::path::Path;
use std::process::{Command, Output};

use kappa_core::constructions::{reference_fixture, FixtureId};
use kappa_core::{evaluate_bound, read_document, ScenarioDocument};

fn kappa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa"))
        .args(args)
        .env("KAPPA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reference_cases_single_and_all() {
    let one = kappa(&["verify-appendix", "--case", "d3n3"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(stdout(&one).contains("d3n3  0.996407"), "{}", stdout(&one));

    let all = kappa(&["verify-appendix"]);
    assert_eq!(all.status.code(), Some(0));
    let text = stdout(&all);
    assert_eq!(text.lines().filter(|l| l.ends_with("ok")).count(), 3, "{text}");
}

#[test]
fn written_fixture_evaluates_to_the_in_process_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d4n4.json");
    assert_eq!(kappa(&["verify-appendix", "--case", "d4n4", "-o", path(&file)]).status.code(), Some(0));
    let doc: ScenarioDocument = read_document(&std::fs::read(&file).unwrap()).unwrap();
    let direct = evaluate_bound(&reference_fixture(FixtureId::D4N4).scenario).unwrap();
    let parsed = evaluate_bound(&doc.to_scenario().unwrap()).unwrap();
    assert!((parsed.kappa_bound - direct.kappa_bound).abs() <= 1e-12);
    assert_eq!(doc.report.unwrap().kappa_bound, direct.kappa_bound);

    let out = dir.path().join("again.json");
    let eval = kappa(&["evaluate", "--scenario", path(&file), "-o", path(&out)]);
    assert_eq!(eval.status.code(), Some(0));
    assert!(stdout(&eval).contains("kappa_0 bound     0.905420"), "{}", stdout(&eval));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&file).unwrap());
}

#[test]
fn construct_validates_parameters() {
    assert_eq!(kappa(&["construct", "--family", "mub", "--d", "6"]).status.code(), Some(1));
    assert_eq!(kappa(&["construct", "--family", "lemma2", "--d", "4"]).status.code(), Some(1));
    assert_eq!(kappa(&["construct", "--family", "hadamard", "--d", "3", "--n", "5"]).status.code(), Some(1));

    let mub = kappa(&["construct", "--family", "mub", "--d", "4"]);
    assert_eq!(mub.status.code(), Some(0));
    assert!(stdout(&mub).contains("equal-overlap bound      0.466506"), "{}", stdout(&mub));
}

#[test]
fn outputs_are_deterministic_given_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let file = dir.path().join(name);
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--seed", "5", "-o", path(&file)]);
        assert_eq!(kappa(&full).status.code(), Some(0), "{args:?}");
        std::fs::read(file).unwrap()
    };
    let a = run("a.json", &["construct", "--family", "lemma2", "--d", "4", "--n", "8"]);
    let b = run("b.json", &["construct", "--family", "lemma2", "--d", "4", "--n", "8"]);
    assert_eq!(a, b);

    std::fs::write(dir.path().join("states.json"), &a).unwrap();
    let states = dir.path().join("states.json");
    let args = ["solve-measurements", "--states", path(&states), "--restarts", "2"];
    assert_eq!(run("s1.json", &args), run("s2.json", &args));

    let args = ["search", "--d", "3", "--n", "3", "--restarts", "2"];
    assert_eq!(run("q1.json", &args), run("q2.json", &args));
}

#[test]
fn search_reports_a_nontrivial_bound() {
    let out = kappa(&["search", "--d", "3", "--n", "4", "--restarts", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("kappa_0 bound")).expect("bound line");
    let bound: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!(bound <= 0.9411, "{text}");
}

#[test]
fn fuzz_and_ks_exit_codes() {
    let fuzz = kappa(&["fuzz-lemma1", "--trials", "2000", "--L", "8", "--n", "3"]);
    assert_eq!(fuzz.status.code(), Some(0));
    assert!(stdout(&fuzz).contains("violations          0"));
    assert_eq!(kappa(&["fuzz-lemma1", "--n", "1"]).status.code(), Some(1));

    let ks = kappa(&["ks-check", "--angle", "90", "--samples", "1000000", "--tolerance", "0.01"]);
    assert_eq!(ks.status.code(), Some(0), "{}", stdout(&ks));
    assert_eq!(kappa(&["ks-check", "--angle", "180"]).status.code(), Some(1));
    // An impossible tolerance trips the check.
    assert_eq!(
        kappa(&["ks-check", "--angle", "60", "--samples", "10000", "--tolerance", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn unreadable_or_invalid_documents_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(kappa(&["evaluate", "--scenario", path(&missing)]).status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format_version\": \"1\", \"ensemble\": 7}").unwrap();
    let out = kappa(&["evaluate", "--scenario", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ensemble"));
}
