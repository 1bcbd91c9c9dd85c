use kappa_core::bounds::pair_terms;
use kappa_core::compatibility::{is_pp_incompatible, triple_overlaps};
use kappa_core::constructions::{mub_states, reference_fixture, FixtureId};
use kappa_core::optimizer::relabel_satellites;
use kappa_core::quantum::gram_deviation;
use kappa_core::{evaluate_bound, joint_search, solve_measurements, SearchConfig};

fn config_for(e: &kappa_core::StateEnsemble) -> SearchConfig {
    SearchConfig::new(e.dim(), e.n()).with_restarts(16).with_seed(3)
}

#[test]
fn solver_matches_or_beats_fixture_measurements() {
    for id in FixtureId::ALL {
        let case = reference_fixture(id);
        let ens = case.scenario.ensemble();
        let fixture = evaluate_bound(&case.scenario).unwrap();
        let solved = solve_measurements(ens, &config_for(ens)).unwrap();
        let report = evaluate_bound(&solved).unwrap();
        assert!(
            report.error_sum <= fixture.error_sum + 1e-6,
            "{id}: solver {} vs fixture {}",
            report.error_sum,
            fixture.error_sum
        );
        for m in solved.measurements() {
            assert!(gram_deviation(m.basis.vectors()) < 1e-10);
        }
    }
}

#[test]
fn pp_incompatible_triples_reach_zero_error() {
    let ens = mub_states(4).unwrap();
    let solved = solve_measurements(&ens, &config_for(&ens)).unwrap();
    let mut checked = 0;
    for m in solved.measurements() {
        let [_, a, b] = m.state_indices();
        let t = triple_overlaps(ens.psi0(), ens.state(a).unwrap(), ens.state(b).unwrap()).unwrap();
        assert!(is_pp_incompatible(&t));
        let total = pair_terms(&ens, m).unwrap().total();
        assert!(total <= 1e-8, "{:?}: {total}", m.pair);
        checked += 1;
    }
    assert_eq!(checked, 120);
}

#[test]
fn bound_is_invariant_under_satellite_relabelling() {
    let case = reference_fixture(FixtureId::D3N4);
    let base = evaluate_bound(&case.scenario).unwrap().kappa_bound;
    for perm in [[2, 1, 3, 4], [4, 3, 2, 1], [3, 1, 4, 2]] {
        let relabelled = relabel_satellites(&case.scenario, &perm).unwrap();
        let k = evaluate_bound(&relabelled).unwrap().kappa_bound;
        assert!((k - base).abs() < 1e-12, "{perm:?}: {k} vs {base}");
    }
    assert!(relabel_satellites(&case.scenario, &[1, 1, 2, 3]).is_err());
}

#[test]
fn d3n3_search_is_nontrivial_and_reproducible() {
    let cfg = SearchConfig::new(3, 3).with_restarts(16).with_seed(7);
    let a = joint_search(&cfg).unwrap();
    assert!(a.report.nontrivial && a.report.kappa_bound < 1.0);
    assert!((a.report.kappa_bound - 0.9964).abs() < 5e-4, "{}", a.report.kappa_bound);
    let recomputed = evaluate_bound(&a.scenario).unwrap();
    assert!((recomputed.kappa_bound - a.report.kappa_bound).abs() < 1e-12);
    let b = joint_search(&cfg).unwrap();
    assert!((a.report.kappa_bound - b.report.kappa_bound).abs() < 1e-12);
    assert_eq!(a.seed_used, 7);
}
