use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use kappa_core::bounds::{line_packing_bound, line_packing_noise_threshold, BoundReport};
use kappa_core::compatibility::{certify_ensemble, OVERLAP_EQUALITY_TOL};
use kappa_core::constructions::{
    hadamard_states, line_packing_states, mub_states, reference_fixture, FixtureId,
};
use kappa_core::ontology::qubit_at_bloch_angle;
use kappa_core::{
    equal_overlap_bound, evaluate_bound, fuzz_overlap_inequality, joint_search, ks_qubit_kappa, omega_q,
    read_document, solve_measurements, write_document, BoundScenario, Document, EnsembleDocument,
    ScenarioDocument, SearchConfig, StateEnsemble,
};
use serde::Serialize;

use crate::table;
use crate::{Common, Family};

/// Allowed distance between a rebuilt fixture bound and the published one.
pub const BOUND_TOLERANCE: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A reproduction check or a theorem check failed (exit status 2).
    Mismatch,
}

/// Anything that should end the run with exit status 1.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Core(kappa_core::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<kappa_core::Error> for Failure {
    fn from(e: kappa_core::Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<Status, Failure>;

fn read<D: Document>(path: &Path) -> Result<D, Failure> {
    let bytes =
        fs::read(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    read_document(&bytes).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn emit<D: Serialize>(doc: &D, common: &Common) -> Result<(), Failure> {
    if let Some(path) = &common.output {
        let bytes = write_document(doc)?;
        fs::write(path, bytes)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn metadata(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Rounds to one significant figure.
pub fn one_significant_figure(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.0e}").parse().expect("formatted float parses")
}

fn noise_matches(computed: f64, published: f64) -> bool {
    (one_significant_figure(computed) - published).abs() <= 1e-9 * published.abs()
}

fn print_pair_terms(report: &BoundReport) {
    let rows: Vec<Vec<String>> = report
        .per_pair_terms
        .iter()
        .map(|t| {
            let [p0, p1, p2] = t.probabilities;
            vec![
                format!("({}, {})", t.pair.0, t.pair.1),
                format!("{p0:.6e}"),
                format!("{p1:.6e}"),
                format!("{p2:.6e}"),
                format!("{:.6e}", t.total()),
            ]
        })
        .collect();
    print!("{}", table::render(&["pair", "P(m0|psi0)", "P(m1|psi_j1)", "P(m2|psi_j2)", "sum"], &rows));
}

fn print_summary(report: &BoundReport) {
    println!("d = {}, n = {}", report.dimension, report.n);
    println!("sum of omega_Q    {:.10}", report.omega_q_sum);
    println!("sum of errors     {:.6e}", report.error_sum);
    println!("kappa_0 bound     {:.6}", report.kappa_bound);
    println!("noise threshold   {:.3e}", report.noise_threshold);
    println!("nontrivial        {}", if report.nontrivial { "yes" } else { "no" });
}

pub fn verify_reference(ids: &[FixtureId], common: &Common) -> Outcome {
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    let mut failed = Vec::new();
    for &id in ids {
        let case = reference_fixture(id);
        let report = evaluate_bound(&case.scenario)?;
        let diff = (report.kappa_bound - case.expected_bound).abs();
        let ok = diff <= BOUND_TOLERANCE && noise_matches(report.noise_threshold, case.expected_noise);
        rows.push(vec![
            id.to_string(),
            format!("{:.6}", report.kappa_bound),
            format!("{:.4}", case.expected_bound),
            format!("{diff:.1e}"),
            format!("{:.3e}", report.noise_threshold),
            format!("{:.0e}", case.expected_noise),
            if ok { "ok" } else { "MISMATCH" }.to_string(),
        ]);
        if !ok {
            failed.push(report.clone());
        }
        let meta = metadata(&[("fixture", id.to_string())]);
        docs.push(ScenarioDocument::from_scenario(&case.scenario, meta, Some(report)));
    }
    print!(
        "{}",
        table::render(&["case", "bound", "published", "|diff|", "noise", "published", "status"], &rows)
    );
    for report in &failed {
        println!("\nper-pair terms for d = {}, n = {}:", report.dimension, report.n);
        print_pair_terms(report);
    }
    if docs.len() == 1 {
        emit(&docs[0], common)?;
    } else {
        emit(&docs, common)?;
    }
    Ok(if failed.is_empty() { Status::Success } else { Status::Mismatch })
}

fn print_certification(e: &StateEnsemble) -> bool {
    let cert = certify_ensemble(e, OVERLAP_EQUALITY_TOL);
    println!("PP-incompatible triples  {} / {}", cert.triples_pp_incompatible, cert.triples_total);
    println!("equal overlaps           {}", if cert.overlaps_equal { "yes" } else { "no" });
    if !cert.near_boundary_triples.is_empty() {
        println!("triples on the boundary  {}", cert.near_boundary_triples.len());
    }
    cert.supports_equal_overlap_bound()
}

pub fn construct(family: Family, d: usize, n: Option<usize>, common: &Common) -> Outcome {
    let (ensemble, mut meta) = match family {
        Family::Lemma2 => {
            let n = n.ok_or_else(|| Failure::Invalid("--family lemma2 needs --n".into()))?;
            let (ensemble, packing) = line_packing_states(d, n, common.seed)?;
            println!(
                "line packing in C^{}: max |<phi_i|phi_j>|^2 = {:.6} (target {:.6}, {})",
                packing.dimension,
                packing.achieved_max_overlap_sq,
                packing.target_overlap_sq,
                if packing.met_target { "met" } else { "NOT met" }
            );
            (ensemble, metadata(&[("family", "lemma2".into()), ("seed", common.seed.to_string())]))
        }
        Family::Mub => (mub_states(d)?, metadata(&[("family", "mub".into())])),
        Family::Hadamard => (hadamard_states(d)?, metadata(&[("family", "hadamard".into())])),
    };
    if let (Some(n), Family::Mub | Family::Hadamard) = (n, family) {
        if n != ensemble.n() {
            return Err(Failure::Invalid(format!(
                "this family has n = {} satellites in d = {d}, not {n}",
                ensemble.n()
            )));
        }
    }
    meta.insert("d".into(), d.to_string());
    meta.insert("n".into(), ensemble.n().to_string());
    println!("d = {d}, n = {}", ensemble.n());
    let certified = print_certification(&ensemble);
    if certified {
        println!("equal-overlap bound      {:.6}", equal_overlap_bound(&ensemble)?);
    } else {
        println!("equal-overlap bound      n/a (ensemble not certified)");
    }
    if family == Family::Lemma2 {
        let b = line_packing_bound(d, ensemble.n())?;
        println!("line-packing bound       exact {:.6}, loose {:.6}", b.exact, b.loose);
        if d >= 4 {
            println!("noise estimate           {:.3e}", line_packing_noise_threshold(d, ensemble.n())?);
        }
    }
    emit(&EnsembleDocument::from_ensemble(&ensemble, meta), common)?;
    Ok(Status::Success)
}

fn report_scenario(scenario: &BoundScenario, meta: BTreeMap<String, String>, common: &Common) -> Outcome {
    let report = evaluate_bound(scenario)?;
    print_pair_terms(&report);
    print_summary(&report);
    emit(&ScenarioDocument::from_scenario(scenario, meta, Some(report)), common)?;
    Ok(Status::Success)
}

pub fn solve(states: &Path, restarts: usize, common: &Common) -> Outcome {
    let doc: EnsembleDocument = read(states)?;
    let ensemble = doc.to_ensemble()?;
    let cfg = SearchConfig { restarts, seed: common.seed, ..SearchConfig::new(ensemble.dim(), ensemble.n()) };
    cfg.validate()?;
    let scenario = solve_measurements(&ensemble, &cfg)?;
    let mut meta = doc.metadata.clone();
    meta.insert("measurements".into(), format!("solved, restarts {restarts}, seed {}", common.seed));
    report_scenario(&scenario, meta, common)
}

pub fn evaluate(path: &Path, common: &Common) -> Outcome {
    let doc: ScenarioDocument = read(path)?;
    let scenario = doc.to_scenario()?;
    report_scenario(&scenario, doc.ensemble.metadata.clone(), common)
}

pub fn search(
    d: usize,
    n: usize,
    restarts: usize,
    max_iterations: usize,
    complex: bool,
    common: &Common,
) -> Outcome {
    let mut cfg = SearchConfig::new(d, n);
    cfg.restarts = restarts;
    cfg.seed = common.seed;
    cfg.max_iterations = max_iterations;
    if complex {
        cfg.real_only = false;
    }
    let result = joint_search(&cfg)?;
    println!(
        "best restart {} of {}; kappa_0 bound {:.6}",
        result.best_restart, restarts, result.report.kappa_bound
    );
    let meta = metadata(&[
        ("family", "search".into()),
        ("seed", result.seed_used.to_string()),
        ("restarts", restarts.to_string()),
        ("best_restart", result.best_restart.to_string()),
        ("real_only", cfg.real_only.to_string()),
    ]);
    report_scenario(&result.scenario, meta, common)
}

pub fn fuzz(trials: usize, ontic: usize, n: usize, common: &Common) -> Outcome {
    let report = fuzz_overlap_inequality(trials, common.seed, ontic, n)?;
    println!("trials              {}", report.trials);
    println!("violations          {}", report.violations);
    println!("worst margin        {:.3e} (trial {})", report.worst_margin, report.worst_trial);
    println!("worst tight margin  {:.3e}", report.worst_tight_margin);
    emit(&report, common)?;
    Ok(if report.violations == 0 { Status::Success } else { Status::Mismatch })
}

#[derive(Debug, Serialize)]
struct KsReport {
    angle_degrees: f64,
    samples: usize,
    seed: u64,
    omega_q: f64,
    kappa: f64,
}

pub fn ks_check(angle: f64, samples: usize, tolerance: Option<f64>, common: &Common) -> Outcome {
    if !angle.is_finite() {
        return Err(Failure::Invalid(format!("angle must be finite (got {angle})")));
    }
    let a = qubit_at_bloch_angle(0.0);
    let b = qubit_at_bloch_angle(angle.to_radians());
    let kappa = ks_qubit_kappa(&a, &b, samples, common.seed)?;
    let wq = omega_q(&a, &b)?;
    println!("Bloch angle  {angle} deg");
    println!("omega_Q      {wq:.6}");
    println!("kappa        {kappa:.6}");
    println!("|kappa - 1|  {:.2e}", (kappa - 1.0).abs());
    emit(&KsReport { angle_degrees: angle, samples, seed: common.seed, omega_q: wq, kappa }, common)?;
    Ok(match tolerance {
        Some(t) if !((kappa - 1.0).abs() <= t) => Status::Mismatch,
        _ => Status::Success,
    })
}
