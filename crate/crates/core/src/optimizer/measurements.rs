//! Per-pair search for the 3-outcome measurement minimizing
//! `P(m₀|ψ₀) + P(m₁|ψ_{j₁}) + P(m₂|ψ_{j₂})`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::param::UnitaryParam;
use super::SearchConfig;
use crate::bounds::{BoundScenario, PairMeasurement};
use crate::error::Result;
use crate::quantum::{orthonormalize, MeasurementBasis, PureState, StateEnsemble};

/// Cheapest way to turn per-column probabilities `probs[c][i] = |⟨u_c|ψ_{j_i}⟩|²`
/// into a 3-outcome measurement.
///
/// Every injective choice of columns for `(m₀, m₁, m₂)` is tried; each
/// remaining column joins whichever outcome it costs least. Returns the
/// error and the column chosen for each outcome.
pub fn best_assignment(probs: &[[f64; 3]]) -> (f64, [usize; 3]) {
    let d = probs.len();
    let mut base = 0.0;
    for p in probs {
        base += p[0].min(p[1]).min(p[2]);
    }
    let excess = |c: usize, i: usize| {
        let p = &probs[c];
        p[i] - p[0].min(p[1]).min(p[2])
    };
    let mut best = (f64::INFINITY, [0, 1, 2]);
    for c0 in 0..d {
        let e0 = excess(c0, 0);
        for c1 in (0..d).filter(|&c| c != c0) {
            let e01 = e0 + excess(c1, 1);
            for c2 in (0..d).filter(|&c| c != c0 && c != c1) {
                let total = e01 + excess(c2, 2);
                if total < best.0 {
                    best = (total, [c0, c1, c2]);
                }
            }
        }
    }
    (base + best.0, best.1)
}

/// Outcome label of every column under an assignment: assigned columns take
/// their outcome index, the rest the outcome on which they cost least.
pub fn column_labels(probs: &[[f64; 3]], assigned: [usize; 3]) -> Vec<usize> {
    probs
        .iter()
        .enumerate()
        .map(|(c, p)| match assigned.iter().position(|&a| a == c) {
            Some(i) => i,
            None => (0..3).min_by(|&a, &b| p[a].total_cmp(&p[b])).expect("three outcomes"),
        })
        .collect()
}

/// Reusable buffers for evaluating a triple's error under a parameterized basis.
#[derive(Debug, Clone)]
pub(crate) struct TripleWorkspace {
    work: Vec<Complex64>,
    probs: Vec<[f64; 3]>,
}

impl TripleWorkspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self { work: vec![Complex64::new(0.0, 0.0); dim], probs: vec![[0.0; 3]; dim] }
    }

    pub(crate) fn probabilities(
        &mut self,
        unitary: &UnitaryParam,
        params: &[f64],
        triple: [&[Complex64]; 3],
    ) -> &[[f64; 3]] {
        for (i, state) in triple.iter().enumerate() {
            self.work.copy_from_slice(state);
            unitary.apply_adjoint(params, &mut self.work);
            for (p, z) in self.probs.iter_mut().zip(&self.work) {
                p[i] = z.norm_sqr();
            }
        }
        &self.probs
    }

    pub(crate) fn error(&mut self, unitary: &UnitaryParam, params: &[f64], triple: [&[Complex64]; 3]) -> f64 {
        best_assignment(self.probabilities(unitary, params, triple)).0
    }
}

/// Best parameters found for one triple and their error.
pub(crate) fn solve_triple(
    unitary: &UnitaryParam,
    triple: [&[Complex64]; 3],
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
    warm_start: Option<&[f64]>,
) -> (Vec<f64>, f64) {
    let mut ws = TripleWorkspace::new(unitary.dim());
    let opts = NelderMeadOptions {
        max_iterations: cfg.max_iterations,
        f_tolerance: cfg.tolerance,
        x_tolerance: 1e-11,
        initial_step: 0.5,
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in 0..cfg.restarts {
        let x0: Vec<f64> = match (start, warm_start) {
            (0, Some(w)) => w.to_vec(),
            _ => (0..unitary.len()).map(|_| rng.gen_range(-PI..PI)).collect(),
        };
        let mut m = nelder_mead(|x| ws.error(unitary, x, triple), &x0, &opts);
        // A second pass from a fresh simplex escapes premature collapse.
        let refine = NelderMeadOptions { initial_step: 0.05, ..opts };
        let m2 = nelder_mead(|x| ws.error(unitary, x, triple), &m.x, &refine);
        if m2.value < m.value {
            m = m2;
        }
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value));
        }
        if best.as_ref().is_some_and(|b| b.1 < 1e-18) {
            break;
        }
    }
    best.expect("at least one start")
}

/// Builds the measurement for a triple from solved parameters.
pub(crate) fn build_measurement(
    unitary: &UnitaryParam,
    params: &[f64],
    pair: (usize, usize),
    triple: [&[Complex64]; 3],
) -> Result<PairMeasurement> {
    let vectors: DMatrix<Complex64> = orthonormalize(&unitary.matrix(params));
    let probs: Vec<[f64; 3]> = (0..vectors.ncols())
        .map(|c| {
            let col = vectors.column(c);
            let mut p = [0.0; 3];
            for (i, state) in triple.iter().enumerate() {
                p[i] = col.iter().zip(state.iter()).map(|(u, s)| u.conj() * s).sum::<Complex64>().norm_sqr();
            }
            p
        })
        .collect();
    let (_, assigned) = best_assignment(&probs);
    let labels = column_labels(&probs, assigned);
    Ok(PairMeasurement { pair, basis: MeasurementBasis::new(vectors, labels)?, assignment: [0, 1, 2] })
}

fn amplitudes(s: &PureState) -> Vec<Complex64> {
    s.amplitudes().iter().copied().collect()
}

/// Finds, independently for every pair, a measurement minimizing the pair's
/// three error probabilities.
///
/// Only `restarts`, `seed`, `max_iterations`, `tolerance` and `real_only`
/// are read from `cfg`. Complex bases are searched whenever `real_only` is
/// off or the ensemble has a complex amplitude.
pub fn solve_measurements(e: &StateEnsemble, cfg: &SearchConfig) -> Result<BoundScenario> {
    let real = cfg.real_only && e.is_real();
    let unitary = UnitaryParam::new(e.dim(), real);
    let states: Vec<Vec<Complex64>> =
        (0..=e.n()).map(|j| amplitudes(e.state(j).expect("index in range"))).collect();
    let pairs = e.pairs();
    let measurements = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(j1, j2))| {
            let triple = [states[0].as_slice(), states[j1].as_slice(), states[j2].as_slice()];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let (params, _) = solve_triple(&unitary, triple, cfg, &mut rng, None);
            build_measurement(&unitary, &params, (j1, j2), triple)
        })
        .collect::<Result<Vec<_>>>()?;
    BoundScenario::new(e.clone(), measurements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::evaluate_bound;

    #[test]
    fn assignment_brute_force() {
        let probs = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];
        assert_eq!(best_assignment(&probs), (0.0, [0, 1, 2]));
        let probs = [[0.3, 0.0, 0.9], [0.0, 0.4, 0.4], [0.9, 0.9, 0.1]];
        assert_eq!(best_assignment(&probs).1, [1, 0, 2]);
        assert!((best_assignment(&probs).0 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn spare_columns_merge_into_cheapest_outcome() {
        let probs = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0], [0.2, 0.1, 0.3]];
        let (err, assigned) = best_assignment(&probs);
        assert!((err - 0.1).abs() < 1e-15);
        assert_eq!(column_labels(&probs, assigned), vec![0, 1, 2, 1]);
    }

    #[test]
    fn orthogonal_triple_is_solved_exactly() {
        let e: Vec<_> = (0..3).map(|k| PureState::basis_vector(3, k).unwrap()).collect();
        let ens = StateEnsemble::new(e[0].clone(), vec![e[1].clone(), e[2].clone()]).unwrap();
        let s = solve_measurements(&ens, &SearchConfig::new(3, 2)).unwrap();
        let m = &s.measurements()[0];
        let terms = crate::bounds::pair_terms(&ens, m).unwrap();
        assert!(terms.total() < 1e-12, "{:?}", terms);
        // m_i sits on a column orthogonal to ψ_{j_i}.
        for (i, &j) in m.state_indices().iter().enumerate() {
            let p = crate::quantum::born_probability(&m.basis, i, ens.state(j).unwrap()).unwrap();
            assert!(p < 1e-12);
        }
        assert!(crate::quantum::gram_deviation(m.basis.vectors()) < 1e-12);
        // Degenerate: all overlaps vanish.
        assert!(evaluate_bound(&s).is_err());
    }
}
