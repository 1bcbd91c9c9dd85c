//! State families and reference scenarios.

mod families;
mod fixtures;
mod packing;

use nalgebra::DVector;
use num_complex::Complex64;

pub use families::{hadamard_states, mub_bases, mub_states, MAX_HADAMARD_DIM};
pub use fixtures::{reference_fixture, FixtureCase, FixtureId};
pub use packing::{
    grassmannian_packing, grassmannian_packing_with, max_overlap_sq, packing_target, welch_bound,
    PackingOptions, PackingResult,
};

use crate::bounds::packing_overlap_sq;
use crate::error::{Error, Result};
use crate::quantum::{PureState, StateEnsemble};

/// Ensemble with arbitrarily small `κ` bounds as `n` grows (for `d ≥ 4`).
///
/// `ψ₀ = |0⟩`; satellite `j` is `√χ |0⟩ + √(1−χ) |φ_j⟩` with `χ = n^{−1/(d−2)}/4`
/// and `φ_j` a packing of `n` lines in the `(d−1)`-dimensional complement.
/// When the packing reaches its target every triple is PP-incompatible.
pub fn line_packing_states(d: usize, n: usize, seed: u64) -> Result<(StateEnsemble, PackingResult)> {
    line_packing_states_with(d, n, seed, &PackingOptions::default())
}

pub fn line_packing_states_with(
    d: usize,
    n: usize,
    seed: u64,
    opts: &PackingOptions,
) -> Result<(StateEnsemble, PackingResult)> {
    if d < 3 || n < 2 {
        return Err(Error::Unsupported(format!(
            "line-packing states need d >= 3 and n >= 2 (got d = {d}, n = {n})"
        )));
    }
    let packing = grassmannian_packing_with(d - 1, n, seed, opts)?;
    let chi = packing_overlap_sq(d, n);
    let (a, b) = (chi.sqrt(), (1.0 - chi).sqrt());
    let satellites = packing.lines.iter().map(|phi| embed(phi, a, b)).collect::<Result<Vec<_>>>()?;
    let ensemble = StateEnsemble::new(PureState::basis_vector(d, 0)?, satellites)?;
    Ok((ensemble, packing))
}

fn embed(phi: &DVector<Complex64>, along_psi0: f64, along_phi: f64) -> Result<PureState> {
    let mut amps = Vec::with_capacity(phi.len() + 1);
    amps.push(Complex64::new(along_psi0, 0.0));
    amps.extend(phi.iter().map(|z| z * along_phi));
    PureState::new(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{equal_overlap_bound, line_packing_bound};
    use crate::compatibility::{certify_ensemble, triple_overlaps, OVERLAP_EQUALITY_TOL};
    use crate::quantum::{omega_q, overlap_sq};

    #[test]
    fn d4_n16_overlaps_are_one_sixteenth() {
        let (ens, packing) = line_packing_states(4, 16, 1).unwrap();
        assert!(packing.met_target);
        for s in ens.satellites() {
            assert!((overlap_sq(ens.psi0(), s).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        }
        let report = certify_ensemble(&ens, OVERLAP_EQUALITY_TOL);
        assert_eq!(report.triples_total, 120);
        assert!(report.supports_equal_overlap_bound());
    }

    #[test]
    fn d3_n2_uses_orthogonal_lines() {
        let (ens, packing) = line_packing_states(3, 2, 0).unwrap();
        assert_eq!(packing.achieved_max_overlap_sq, 0.0);
        let chi = 0.125;
        let t = triple_overlaps(ens.psi0(), &ens.satellites()[0], &ens.satellites()[1]).unwrap();
        assert!((t.x1 - chi).abs() < 1e-12 && (t.x2 - chi).abs() < 1e-12);
        assert!((t.x3 - chi * chi).abs() < 1e-12);
        assert!(t.x3 <= (1.0 - 2.0 * chi).powi(2));
    }

    #[test]
    fn omega_q_matches_closed_form_and_exceeds_linear_estimate() {
        for (d, n) in [(4, 8), (5, 16)] {
            let (ens, _) = line_packing_states(d, n, 3).unwrap();
            let chi = packing_overlap_sq(d, n);
            let closed = 1.0 - (1.0 - chi).sqrt();
            let w = omega_q(ens.psi0(), &ens.satellites()[0]).unwrap();
            assert!((w - closed).abs() < 1e-12);
            assert!(w > chi / 2.0);
            let bound = equal_overlap_bound(&ens).unwrap();
            assert!((bound - line_packing_bound(d, n).unwrap().exact).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_small_dimensions() {
        assert!(line_packing_states(2, 4, 0).is_err());
        assert!(line_packing_states(4, 1, 0).is_err());
    }
}
