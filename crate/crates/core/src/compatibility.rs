//! Pairwise-overlap triples and the PP-incompatibility criterion.
//!
//! A triple `(ψ₀, ψ_a, ψ_b)` with squared overlaps `x₁ = |⟨ψ₀|ψ_a⟩|²`,
//! `x₂ = |⟨ψ₀|ψ_b⟩|²`, `x₃ = |⟨ψ_a|ψ_b⟩|²` is PP-incompatible iff
//! `x₁ + x₂ + x₃ < 1` and `(1 − x₁ − x₂ − x₃)² ≥ 4 x₁ x₂ x₃`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::{overlap_sq, PureState, StateEnsemble};

/// Symmetric floating-point guard applied to both criterion conditions.
pub const PP_TOLERANCE: f64 = 1e-10;
/// Default tolerance for deciding that all `ω_Q(ψ₀, ψ_j)` coincide.
pub const OVERLAP_EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleOverlaps {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl TripleOverlaps {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn sum(&self) -> f64 {
        self.x1 + self.x2 + self.x3
    }

    /// Signed slack of the two conditions: `(1 − Σx, (1 − Σx)² − 4x₁x₂x₃)`.
    pub fn margins(&self) -> (f64, f64) {
        let rest = 1.0 - self.sum();
        (rest, rest * rest - 4.0 * self.x1 * self.x2 * self.x3)
    }

    /// True when either condition lies within [`PP_TOLERANCE`] of its boundary.
    pub fn near_boundary(&self) -> bool {
        let (sum_margin, square_margin) = self.margins();
        sum_margin.abs() <= PP_TOLERANCE || square_margin.abs() <= PP_TOLERANCE
    }
}

/// Squared moduli of the three pairwise inner products of a triple.
pub fn triple_overlaps(psi0: &PureState, a: &PureState, b: &PureState) -> Result<TripleOverlaps> {
    Ok(TripleOverlaps { x1: overlap_sq(psi0, a)?, x2: overlap_sq(psi0, b)?, x3: overlap_sq(a, b)? })
}

/// The strict sum condition must clear the guard; the non-strict square
/// condition may fall short of it by at most the guard.
pub fn is_pp_incompatible(t: &TripleOverlaps) -> bool {
    let (sum_margin, square_margin) = t.margins();
    sum_margin > PP_TOLERANCE && square_margin >= -PP_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub triples_total: usize,
    pub triples_pp_incompatible: usize,
    /// Pairs `(j₁, j₂)` whose triple with `ψ₀` is not PP-incompatible.
    pub failing_triples: Vec<(usize, usize)>,
    /// Pairs whose criterion margins sit within [`PP_TOLERANCE`] of a boundary.
    pub near_boundary_triples: Vec<(usize, usize)>,
    pub overlaps_equal: bool,
    pub overlap_tolerance: f64,
}

impl CertificationReport {
    pub fn all_pp_incompatible(&self) -> bool {
        self.triples_pp_incompatible == self.triples_total
    }

    /// Preconditions for the equal-overlap bound `1 / (n ω_Q)`.
    pub fn supports_equal_overlap_bound(&self) -> bool {
        self.all_pp_incompatible() && self.overlaps_equal
    }
}

/// Checks every triple `(ψ₀, ψ_{j₁}, ψ_{j₂})` and the equality of all `ω_Q(ψ₀, ψ_j)`.
pub fn certify_ensemble(e: &StateEnsemble, tol: f64) -> CertificationReport {
    let pairs = e.pairs();
    let verdicts: Vec<(bool, bool)> = pairs
        .par_iter()
        .map(|&(j1, j2)| {
            let t = triple_overlaps(e.psi0(), &e.satellites()[j1 - 1], &e.satellites()[j2 - 1])
                .expect("ensemble dimensions are uniform");
            (is_pp_incompatible(&t), t.near_boundary())
        })
        .collect();

    let mut failing = Vec::new();
    let mut near = Vec::new();
    for (&pair, &(ok, boundary)) in pairs.iter().zip(&verdicts) {
        if !ok {
            failing.push(pair);
        }
        if boundary {
            near.push(pair);
        }
    }

    let omegas = e.omega_q_values();
    let reference = omegas[0];
    let overlaps_equal = omegas.iter().all(|w| (w - reference).abs() <= tol);

    CertificationReport {
        triples_total: pairs.len(),
        triples_pp_incompatible: pairs.len() - failing.len(),
        failing_triples: failing,
        near_boundary_triples: near,
        overlaps_equal,
        overlap_tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn criterion_examples() {
        assert!(is_pp_incompatible(&TripleOverlaps::new(0.0, 0.0, 0.0)));
        assert!(is_pp_incompatible(&TripleOverlaps::new(0.25, 0.25, 0.25)));
        assert!(TripleOverlaps::new(0.25, 0.25, 0.25).near_boundary());
        assert!(!is_pp_incompatible(&TripleOverlaps::new(0.9, 0.9, 0.9)));
        // Sum condition is strict.
        assert!(!is_pp_incompatible(&TripleOverlaps::new(1.0, 0.0, 0.0)));
        assert!(!is_pp_incompatible(&TripleOverlaps::new(0.5, 0.5, 0.0)));
        // Equal unbiased overlaps in d = 3 sit exactly on the sum boundary.
        let third = 1.0 / 3.0;
        assert!(!is_pp_incompatible(&TripleOverlaps::new(third, third, third)));
        // Square condition violated although the sum is below one.
        assert!(!is_pp_incompatible(&TripleOverlaps::new(0.3, 0.3, 0.3)));
    }

    #[test]
    fn triple_overlaps_of_simple_states() {
        let e: Vec<_> = (0..3).map(|k| PureState::basis_vector(3, k).unwrap()).collect();
        assert_eq!(triple_overlaps(&e[0], &e[1], &e[2]).unwrap(), TripleOverlaps::new(0.0, 0.0, 0.0));
        assert_eq!(triple_overlaps(&e[0], &e[0], &e[2]).unwrap().x1, 1.0);
    }

    #[test]
    fn repeated_psi0_is_reported() {
        let e: Vec<_> = (0..3).map(|k| PureState::basis_vector(3, k).unwrap()).collect();
        let ens = StateEnsemble::new(e[0].clone(), vec![e[1].clone(), e[0].clone(), e[2].clone()]).unwrap();
        let report = certify_ensemble(&ens, OVERLAP_EQUALITY_TOL);
        assert_eq!(report.triples_total, 3);
        assert_eq!(report.failing_triples, vec![(1, 2), (2, 3)]);
        assert_eq!(report.triples_pp_incompatible, 1);
        assert!(!report.overlaps_equal);
    }

    proptest! {
        #[test]
        fn lowering_overlaps_keeps_strict_instances(
            x1 in 0.0f64..0.5, x2 in 0.0f64..0.5, x3 in 0.0f64..0.5,
            d1 in 0.0f64..0.1, d2 in 0.0f64..0.1, d3 in 0.0f64..0.1,
        ) {
            let t = TripleOverlaps::new(x1, x2, x3);
            let (s, q) = t.margins();
            prop_assume!(s > PP_TOLERANCE && q > PP_TOLERANCE);
            let lowered = TripleOverlaps::new((x1 - d1).max(0.0), (x2 - d2).max(0.0), (x3 - d3).max(0.0));
            prop_assert!(is_pp_incompatible(&lowered));
        }

        #[test]
        fn criterion_is_symmetric_in_its_arguments(
            x1 in 0.0f64..1.0, x2 in 0.0f64..1.0, x3 in 0.0f64..1.0,
        ) {
            let a = is_pp_incompatible(&TripleOverlaps::new(x1, x2, x3));
            prop_assert_eq!(a, is_pp_incompatible(&TripleOverlaps::new(x3, x1, x2)));
            prop_assert_eq!(a, is_pp_incompatible(&TripleOverlaps::new(x2, x3, x1)));
        }
    }
}
