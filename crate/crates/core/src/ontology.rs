//! Finite ontological models, randomized checks of the overlap inequality,
//! and a Monte Carlo estimate of `κ` in the Kochen–Specker qubit model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{omega_q, pairs, MeasurementBasis, PureState};

/// Tolerance on normalization of distributions and response columns.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Margins below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-10;

/// Response table of one measurement: `table[m][λ] = ξ(m|λ)`.
pub type ResponseTable = Vec<Vec<f64>>;

/// Ontological model over a finite ontic space `{0, …, L−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOntologicalModel {
    ontic_count: usize,
    epistemic_states: Vec<Vec<f64>>,
    response_functions: Vec<ResponseTable>,
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidModel(format!("{what} has entry {x}")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidModel(format!("{what} sums to {sum}")));
    }
    Ok(())
}

impl DiscreteOntologicalModel {
    pub fn new(
        ontic_count: usize,
        epistemic_states: Vec<Vec<f64>>,
        response_functions: Vec<ResponseTable>,
    ) -> Result<Self> {
        if ontic_count == 0 {
            return Err(Error::InvalidModel("ontic space is empty".into()));
        }
        for (k, mu) in epistemic_states.iter().enumerate() {
            if mu.len() != ontic_count {
                return Err(Error::DimensionMismatch { expected: ontic_count, found: mu.len() });
            }
            check_distribution(mu, &format!("epistemic state {k}"))?;
        }
        for (k, table) in response_functions.iter().enumerate() {
            if table.is_empty() {
                return Err(Error::InvalidModel(format!("response function {k} has no outcomes")));
            }
            if let Some(row) = table.iter().find(|row| row.len() != ontic_count) {
                return Err(Error::DimensionMismatch { expected: ontic_count, found: row.len() });
            }
            for lambda in 0..ontic_count {
                let column: Vec<f64> = table.iter().map(|row| row[lambda]).collect();
                check_distribution(&column, &format!("response function {k} at ontic state {lambda}"))?;
            }
        }
        Ok(Self { ontic_count, epistemic_states, response_functions })
    }

    pub fn ontic_count(&self) -> usize {
        self.ontic_count
    }

    pub fn epistemic_states(&self) -> &[Vec<f64>] {
        &self.epistemic_states
    }

    pub fn response_functions(&self) -> &[ResponseTable] {
        &self.response_functions
    }
}

/// `ω_C = Σ_λ min(μ_a(λ), μ_b(λ))`.
pub fn classical_overlap(mu_a: &[f64], mu_b: &[f64]) -> Result<f64> {
    if mu_a.len() != mu_b.len() {
        return Err(Error::DimensionMismatch { expected: mu_a.len(), found: mu_b.len() });
    }
    Ok(mu_a.iter().zip(mu_b).map(|(a, b)| a.min(*b)).sum())
}

/// `P(outcome|state) = Σ_λ ξ(outcome|λ) μ(λ)`.
pub fn model_probability(
    m: &DiscreteOntologicalModel,
    measurement: usize,
    outcome: usize,
    state_index: usize,
) -> Result<f64> {
    let table = m
        .response_functions
        .get(measurement)
        .ok_or_else(|| Error::IndexOutOfRange(format!("measurement {measurement}")))?;
    let row = table
        .get(outcome)
        .ok_or_else(|| Error::IndexOutOfRange(format!("outcome {outcome} of measurement {measurement}")))?;
    let mu = m
        .epistemic_states
        .get(state_index)
        .ok_or_else(|| Error::IndexOutOfRange(format!("state {state_index}")))?;
    Ok(row.iter().zip(mu).map(|(x, p)| x * p).sum())
}

/// Both sides of `Σ_j ω_C(μ₀, μ_j) ≤ 1 + Σ_{j₁<j₂} Σ_i P(m_i|ψ_{j_i})` for a
/// model with `n + 1` states and one 3-outcome measurement per pair, in
/// lexicographic pair order. Returns `RHS − LHS`.
pub fn overlap_inequality_margin(m: &DiscreteOntologicalModel) -> Result<f64> {
    let n = m
        .epistemic_states
        .len()
        .checked_sub(1)
        .filter(|&n| n >= 2)
        .ok_or_else(|| Error::InvalidModel("need psi_0 and at least two satellites".into()))?;
    let pairs = pairs(n);
    if m.response_functions.len() != pairs.len() {
        return Err(Error::InvalidModel(format!(
            "expected {} response functions, found {}",
            pairs.len(),
            m.response_functions.len()
        )));
    }
    let mu = &m.epistemic_states;
    let mut lhs = 0.0;
    for j in 1..=n {
        lhs += classical_overlap(&mu[0], &mu[j])?;
    }
    let mut rhs = 1.0;
    for (k, &(j1, j2)) in pairs.iter().enumerate() {
        if m.response_functions[k].len() < 3 {
            return Err(Error::InvalidModel(format!("response function {k} has fewer than 3 outcomes")));
        }
        for (i, j) in [0, j1, j2].into_iter().enumerate() {
            rhs += model_probability(m, k, i, j)?;
        }
    }
    Ok(rhs - lhs)
}

/// Margin with every response function chosen to minimize the right-hand
/// side: `1 + Σ_pairs Σ_λ min(μ₀, μ_{j₁}, μ_{j₂})(λ) − Σ_j ω_C(μ₀, μ_j)`.
pub fn tight_margin(mus: &[Vec<f64>]) -> Result<f64> {
    let n = mus.len().saturating_sub(1);
    if n < 2 {
        return Err(Error::InvalidModel("need psi_0 and at least two satellites".into()));
    }
    let mut margin = 1.0;
    for j in 1..=n {
        margin -= classical_overlap(&mus[0], &mus[j])?;
    }
    for (j1, j2) in pairs(n) {
        margin += mus[0].iter().zip(&mus[j1]).zip(&mus[j2]).map(|((a, b), c)| a.min(*b).min(*c)).sum::<f64>();
    }
    Ok(margin)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub trials: usize,
    pub violations: usize,
    /// Smallest `RHS − LHS` over all trials.
    pub worst_margin: f64,
    pub worst_trial: usize,
    /// Smallest margin with response functions chosen adversarially.
    pub worst_tight_margin: f64,
}

fn uniform_simplex(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= sum);
    v
}

/// Random model with `n + 1` states over `ontic_count` ontic states and one
/// 3-outcome measurement per pair, all uniform on their simplices.
pub fn random_model(rng: &mut ChaCha8Rng, ontic_count: usize, n: usize) -> DiscreteOntologicalModel {
    let epistemic_states = (0..=n).map(|_| uniform_simplex(rng, ontic_count)).collect();
    let response_functions = (0..n * (n - 1) / 2)
        .map(|_| {
            let columns: Vec<Vec<f64>> = (0..ontic_count).map(|_| uniform_simplex(rng, 3)).collect();
            (0..3).map(|m| columns.iter().map(|c| c[m]).collect()).collect()
        })
        .collect();
    DiscreteOntologicalModel { ontic_count, epistemic_states, response_functions }
}

/// Checks the overlap inequality on `trials` random models. Trial `t` draws
/// from stream `t` of `seed`.
pub fn fuzz_overlap_inequality(trials: usize, seed: u64, ontic_count: usize, n: usize) -> Result<FuzzReport> {
    if trials == 0 || ontic_count == 0 || n < 2 {
        return Err(Error::Unsupported(format!(
            "need trials >= 1, L >= 1, n >= 2 (got {trials}, {ontic_count}, {n})"
        )));
    }
    let margins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let model = random_model(&mut rng, ontic_count, n);
            Ok((overlap_inequality_margin(&model)?, tight_margin(&model.epistemic_states)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_trial, worst_margin) = margins
        .iter()
        .map(|m| m.0)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("trials >= 1");
    Ok(FuzzReport {
        trials,
        violations: margins.iter().filter(|m| m.0 < -VIOLATION_TOL).count(),
        worst_margin,
        worst_trial,
        worst_tight_margin: margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min),
    })
}

/// ψ-ontic model reproducing the Born statistics of `basis` on `states`:
/// state `s` lives on its own block of `d` ontic states, weighted by the
/// Born probabilities of the basis columns, and each ontic state answers
/// with its column's label.
pub fn psi_ontic_model(states: &[PureState], basis: &MeasurementBasis) -> Result<DiscreteOntologicalModel> {
    let d = basis.dim();
    let total = states.len() * d;
    let mut epistemic_states = Vec::with_capacity(states.len());
    for (s, psi) in states.iter().enumerate() {
        let mut mu = vec![0.0; total];
        for c in 0..d {
            mu[s * d + c] = basis.column_probability(c, psi)?;
        }
        // Absorb rounding so the distribution passes validation.
        let sum: f64 = mu.iter().sum();
        mu.iter_mut().for_each(|x| *x /= sum);
        epistemic_states.push(mu);
    }
    let outcomes = basis.labels().iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; total]; outcomes];
    for s in 0..states.len() {
        for (c, &label) in basis.labels().iter().enumerate() {
            table[label][s * d + c] = 1.0;
        }
    }
    DiscreteOntologicalModel::new(total, epistemic_states, vec![table])
}

/// Bloch vector of a qubit state.
pub fn bloch_vector(psi: &PureState) -> Result<[f64; 3]> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: psi.dim() });
    }
    let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
    let c = a.conj() * b;
    Ok([2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr()])
}

/// Minimum Monte Carlo sample count accepted by [`ks_qubit_kappa`].
pub const KS_MIN_SAMPLES: usize = 10_000;
const KS_CHUNK: usize = 1 << 16;

/// Monte Carlo estimate of `κ(a, b)` in the Kochen–Specker qubit model,
/// where `μ_ψ(λ) = max(ψ⃗·λ, 0)/π` on the unit sphere.
///
/// Points are drawn uniformly on the sphere. The estimate is the ratio of
/// the sample means of `min(μ_a, μ_b)` and `μ_a`; the denominator has known
/// expectation `1/4π` and cancels most of the sampling noise.
pub fn ks_qubit_kappa(a: &PureState, b: &PureState, samples: usize, seed: u64) -> Result<f64> {
    let (ra, rb) = (bloch_vector(a)?, bloch_vector(b)?);
    if samples < KS_MIN_SAMPLES {
        return Err(Error::Unsupported(format!("need at least {KS_MIN_SAMPLES} samples (got {samples})")));
    }
    let wq = omega_q(a, b)?;
    if wq <= 0.0 {
        return Err(Error::Undefined("states are orthogonal, so omega_Q = 0".into()));
    }
    let chunks = samples.div_ceil(KS_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = KS_CHUNK.min(samples - k * KS_CHUNK);
            let (mut overlap, mut norm) = (0.0, 0.0);
            for _ in 0..count {
                let l: [f64; 3] = UnitSphere.sample(&mut rng);
                let da = (ra[0] * l[0] + ra[1] * l[1] + ra[2] * l[2]).max(0.0);
                let db = (rb[0] * l[0] + rb[1] * l[1] + rb[2] * l[2]).max(0.0);
                overlap += da.min(db);
                norm += da;
            }
            (overlap, norm)
        })
        .collect();
    let (overlap, norm) = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    Ok(overlap / norm / wq)
}

/// Qubit state at polar angle `theta` on the Bloch sphere, azimuth 0.
pub fn qubit_at_bloch_angle(theta: f64) -> PureState {
    PureState::from_real(&[(theta / 2.0).cos(), (theta / 2.0).sin()]).expect("unit qubit")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn classical_overlap_examples() {
        assert_eq!(classical_overlap(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 1.0);
        assert_eq!(classical_overlap(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(classical_overlap(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]).unwrap(), 0.5);
        assert!(classical_overlap(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(DiscreteOntologicalModel::new(2, vec![vec![0.5, 0.6]], vec![]).is_err());
        assert!(DiscreteOntologicalModel::new(2, vec![vec![1.5, -0.5]], vec![]).is_err());
        assert!(DiscreteOntologicalModel::new(2, vec![vec![0.5, 0.5]], vec![vec![vec![1.0, 0.3]]]).is_err());
        assert!(DiscreteOntologicalModel::new(2, vec![vec![0.5]], vec![]).is_err());
        assert!(DiscreteOntologicalModel::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn model_probability_examples() {
        let point = DiscreteOntologicalModel::new(
            3,
            vec![vec![0.0, 1.0, 0.0]],
            vec![vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]]],
        )
        .unwrap();
        assert_eq!(model_probability(&point, 0, 0, 0).unwrap(), 1.0);
        assert!(model_probability(&point, 1, 0, 0).is_err());
        assert!(model_probability(&point, 0, 2, 0).is_err());
        assert!(model_probability(&point, 0, 0, 1).is_err());

        let k = 4;
        let uniform =
            DiscreteOntologicalModel::new(5, vec![vec![0.2; 5]], vec![vec![vec![0.25; 5]; k]]).unwrap();
        assert!((model_probability(&uniform, 0, 3, 0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn model_probability_matches_dense_product() {
        let m = random_model(&mut rng(9), 7, 4);
        for (k, table) in m.response_functions().iter().enumerate() {
            for (s, mu) in m.epistemic_states().iter().enumerate() {
                for (o, row) in table.iter().enumerate() {
                    let mut direct = 0.0;
                    for l in 0..7 {
                        direct += row[l] * mu[l];
                    }
                    assert!((model_probability(&m, k, o, s).unwrap() - direct).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn identical_states_keep_nonnegative_margin() {
        let mu = uniform_simplex(&mut rng(1), 5);
        for n in 2..6 {
            let mus = vec![mu.clone(); n + 1];
            let tight = tight_margin(&mus).unwrap();
            // LHS = n, RHS = 1 + n(n−1)/2.
            assert!((tight - (1.0 + (n * (n - 1)) as f64 / 2.0 - n as f64)).abs() < 1e-12);
            assert!(tight >= 0.0);
        }
    }

    #[test]
    fn adversarial_probe_is_tight() {
        let mus = vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 0.5, 0.5]];
        assert_eq!(tight_margin(&mus).unwrap(), 0.0);
        // Each ontic state answers with the outcome whose state misses it.
        let xi = vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]];
        let m = DiscreteOntologicalModel::new(3, mus, vec![xi]).unwrap();
        assert_eq!(overlap_inequality_margin(&m).unwrap(), 0.0);
    }

    #[test]
    fn tight_margin_bounds_random_margin() {
        let mut r = rng(4);
        for _ in 0..200 {
            let m = random_model(&mut r, 6, 3);
            let tight = tight_margin(m.epistemic_states()).unwrap();
            assert!(tight <= overlap_inequality_margin(&m).unwrap() + 1e-12);
            assert!(tight >= -VIOLATION_TOL);
        }
    }

    #[test]
    fn fuzz_finds_no_violations() {
        for n in [2, 3, 5] {
            let report = fuzz_overlap_inequality(500, 17, 8, n).unwrap();
            assert_eq!(report.violations, 0);
            assert!(report.worst_margin >= -VIOLATION_TOL);
            assert!(report.worst_tight_margin >= -VIOLATION_TOL);
            assert_eq!(report, fuzz_overlap_inequality(500, 17, 8, n).unwrap());
        }
        assert!(fuzz_overlap_inequality(0, 1, 8, 3).is_err());
        assert!(fuzz_overlap_inequality(10, 1, 8, 1).is_err());
    }

    #[test]
    fn psi_ontic_witness_reproduces_born_rule_with_zero_overlap() {
        let basis = MeasurementBasis::identity(3).unwrap();
        let psi = PureState::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let phi = PureState::from_real(&[0.0, 0.6, 0.8]).unwrap();
        let model = psi_ontic_model(&[psi.clone(), phi.clone()], &basis).unwrap();
        for (s, state) in [&psi, &phi].into_iter().enumerate() {
            for c in 0..3 {
                let born = crate::quantum::born_probability(&basis, c, state).unwrap();
                assert!((model_probability(&model, 0, c, s).unwrap() - born).abs() < 1e-15);
            }
        }
        let wc = classical_overlap(&model.epistemic_states()[0], &model.epistemic_states()[1]).unwrap();
        assert_eq!(wc, 0.0);
        assert!(wc <= omega_q(&psi, &phi).unwrap());
    }

    #[test]
    fn bloch_vectors() {
        assert_eq!(bloch_vector(&qubit_at_bloch_angle(0.0)).unwrap(), [0.0, 0.0, 1.0]);
        let r = bloch_vector(&qubit_at_bloch_angle(std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15 && r[2].abs() < 1e-15);
        assert!(bloch_vector(&PureState::basis_vector(3, 0).unwrap()).is_err());
    }

    #[test]
    fn ks_identical_states_give_exactly_one() {
        let a = qubit_at_bloch_angle(0.7);
        assert_eq!(ks_qubit_kappa(&a, &a, KS_MIN_SAMPLES, 3).unwrap(), 1.0);
    }

    #[test]
    fn ks_rejects_orthogonal_and_small_inputs() {
        let (a, b) = (qubit_at_bloch_angle(0.0), qubit_at_bloch_angle(std::f64::consts::PI));
        assert!(matches!(ks_qubit_kappa(&a, &b, 100_000, 0), Err(Error::Undefined(_))));
        assert!(ks_qubit_kappa(&a, &a, 100, 0).is_err());
    }

    #[test]
    fn ks_estimate_is_close_to_one() {
        let a = qubit_at_bloch_angle(0.0);
        let b = qubit_at_bloch_angle(1.0);
        let k = ks_qubit_kappa(&a, &b, 200_000, 5).unwrap();
        assert!((k - 1.0).abs() < 0.02, "{k}");
    }
}
