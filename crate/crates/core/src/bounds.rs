//! Upper bounds on `κ₀`, the minimal classical-to-quantum overlap ratio.
//!
//! The central quantity is the scenario bound
//!
//! ```text
//! κ₀ ≤ (1 + Σ_{j₁<j₂} Σ_{i=0..2} P_{M_{j₁j₂}}(m_i | ψ_{j_i})) / Σ_j ω_Q(ψ₀, ψ_j)
//! ```
//!
//! with `j₀ = 0`, together with the closed forms it reduces to for
//! PP-incompatible ensembles with equal overlaps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compatibility::{certify_ensemble, OVERLAP_EQUALITY_TOL};
use crate::error::{Error, Result};
use crate::quantum::{
    born_probability, omega_q, omega_q_from_overlap_sq, MeasurementBasis, OutcomeLabel, StateEnsemble,
};

/// Measurement attached to one pair `(j₁, j₂)`.
///
/// `assignment[i]` is the outcome label playing `m_i`; `m_i` is scored on
/// `ψ₀`, `ψ_{j₁}`, `ψ_{j₂}` for `i = 0, 1, 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMeasurement {
    pub pair: (usize, usize),
    pub basis: MeasurementBasis,
    pub assignment: [OutcomeLabel; 3],
}

impl PairMeasurement {
    /// Ensemble indices `(0, j₁, j₂)` scored by `m₀, m₁, m₂`.
    pub fn state_indices(&self) -> [usize; 3] {
        [0, self.pair.0, self.pair.1]
    }
}

/// States plus one 3-outcome measurement per pair `1 ≤ j₁ < j₂ ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundScenario {
    ensemble: StateEnsemble,
    measurements: Vec<PairMeasurement>,
}

impl BoundScenario {
    /// Validates and stores the measurements in lexicographic pair order.
    pub fn new(ensemble: StateEnsemble, mut measurements: Vec<PairMeasurement>) -> Result<Self> {
        let n = ensemble.n();
        let d = ensemble.dim();
        let expected = n * (n - 1) / 2;
        if measurements.len() != expected {
            return Err(Error::InvalidScenario(format!(
                "{} measurements for n = {n}, expected {expected}",
                measurements.len()
            )));
        }
        measurements.sort_by_key(|m| m.pair);
        for (m, want) in measurements.iter().zip(ensemble.pairs()) {
            let (j1, j2) = m.pair;
            if m.pair != want {
                return Err(Error::InvalidScenario(format!(
                    "pair ({j1},{j2}) is duplicated, out of range or unordered"
                )));
            }
            if m.basis.dim() != d {
                return Err(Error::InvalidScenario(format!(
                    "pair ({j1},{j2}): basis dimension {} != {d}",
                    m.basis.dim()
                )));
            }
            let [a, b, c] = m.assignment;
            if a == b || a == c || b == c {
                return Err(Error::InvalidScenario(format!(
                    "pair ({j1},{j2}): outcome assignment is not injective"
                )));
            }
            if let Some(&missing) = m.assignment.iter().find(|&&l| !m.basis.has_outcome(l)) {
                return Err(Error::InvalidScenario(format!(
                    "pair ({j1},{j2}): assigned outcome {missing} is not a label of the basis"
                )));
            }
            if let Some(&stray) = m.basis.labels().iter().find(|l| !m.assignment.contains(l)) {
                return Err(Error::InvalidScenario(format!(
                    "pair ({j1},{j2}): outcome {stray} is not one of m0, m1, m2"
                )));
            }
        }
        Ok(Self { ensemble, measurements })
    }

    pub fn ensemble(&self) -> &StateEnsemble {
        &self.ensemble
    }

    pub fn measurements(&self) -> &[PairMeasurement] {
        &self.measurements
    }

    pub fn measurement(&self, pair: (usize, usize)) -> Option<&PairMeasurement> {
        self.measurements.binary_search_by_key(&pair, |m| m.pair).ok().map(|i| &self.measurements[i])
    }
}

/// The three error probabilities `P(m_i | ψ_{j_i})` of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTerms {
    pub pair: (usize, usize),
    pub probabilities: [f64; 3],
}

impl PairTerms {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dimension: usize,
    pub n: usize,
    pub kappa_bound: f64,
    /// Sum of the `3·n(n−1)/2` error probabilities.
    pub error_sum: f64,
    pub omega_q_sum: f64,
    /// Largest uniform per-probability estimation error `ε` keeping the bound below 1.
    /// Negative when the noiseless bound is already trivial.
    pub noise_threshold: f64,
    /// `kappa_bound < 1`.
    pub nontrivial: bool,
    pub per_pair_terms: Vec<PairTerms>,
}

/// `(Σω_Q − 1 − Σ error) / (3/2 · n(n−1))`.
pub fn noise_threshold(omega_q_sum: f64, error_sum: f64, n: usize) -> f64 {
    let terms = 1.5 * (n * (n - 1)) as f64;
    (omega_q_sum - 1.0 - error_sum) / terms
}

/// Error probabilities for a single pair measurement.
pub fn pair_terms(ensemble: &StateEnsemble, m: &PairMeasurement) -> Result<PairTerms> {
    let mut probabilities = [0.0; 3];
    for (i, (&label, &j)) in m.assignment.iter().zip(&m.state_indices()).enumerate() {
        let state = ensemble.state(j).ok_or_else(|| Error::IndexOutOfRange(format!("state {j}")))?;
        probabilities[i] = born_probability(&m.basis, label, state)?;
    }
    Ok(PairTerms { pair: m.pair, probabilities })
}

/// Evaluates the scenario bound, its ingredients and the noise threshold.
///
/// Per-pair terms may be computed in parallel; all totals are accumulated
/// sequentially in pair order so the result is bit-stable.
pub fn evaluate_bound(s: &BoundScenario) -> Result<BoundReport> {
    let e = s.ensemble();
    let per_pair_terms = s.measurements().par_iter().map(|m| pair_terms(e, m)).collect::<Result<Vec<_>>>()?;

    let mut error_sum = 0.0;
    for t in &per_pair_terms {
        for p in t.probabilities {
            error_sum += p;
        }
    }
    let mut omega_q_sum = 0.0;
    for w in e.omega_q_values() {
        omega_q_sum += w;
    }
    if omega_q_sum == 0.0 {
        return Err(Error::DegenerateScenario);
    }
    let kappa_bound = (1.0 + error_sum) / omega_q_sum;
    Ok(BoundReport {
        dimension: e.dim(),
        n: e.n(),
        kappa_bound,
        error_sum,
        omega_q_sum,
        noise_threshold: noise_threshold(omega_q_sum, error_sum, e.n()),
        nontrivial: kappa_bound < 1.0,
        per_pair_terms,
    })
}

/// `1 / (n ω_Q(ψ₀, ψ₁))`, valid when every triple is PP-incompatible and all
/// overlaps with `ψ₀` are equal. Bounds the average of `κ(ψ₀, ψ_j)`.
pub fn equal_overlap_bound(e: &StateEnsemble) -> Result<f64> {
    let report = certify_ensemble(e, OVERLAP_EQUALITY_TOL);
    if !report.supports_equal_overlap_bound() {
        return Err(Error::NotCertified(Box::new(report)));
    }
    let w = omega_q(e.psi0(), &e.satellites()[0])?;
    Ok(1.0 / (e.n() as f64 * w))
}

/// Squared overlap `χ = n^{−1/(d−2)} / 4` of the line-packing construction.
pub fn packing_overlap_sq(d: usize, n: usize) -> f64 {
    0.25 * (n as f64).powf(-1.0 / (d as f64 - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingBound {
    /// `1 / (n (1 − √(1 − χ)))`.
    pub exact: f64,
    /// `8 / n^{(d−3)/(d−2)}`.
    pub loose: f64,
}

/// Average-`κ` bound achieved by the line-packing ensemble in dimension `d`
/// with `n` satellites.
pub fn line_packing_bound(d: usize, n: usize) -> Result<PackingBound> {
    if d < 3 || n < 2 {
        return Err(Error::Unsupported(format!(
            "line-packing bound needs d >= 3 and n >= 2 (got d = {d}, n = {n})"
        )));
    }
    let chi = packing_overlap_sq(d, n);
    let exact = 1.0 / (n as f64 * omega_q_from_overlap_sq(chi));
    let loose = 8.0 / (n as f64).powf((d as f64 - 3.0) / (d as f64 - 2.0));
    Ok(PackingBound { exact, loose })
}

/// Noise level `1 / (12 n^{(d−1)/(d−2)})` tolerated by the line-packing ensemble.
pub fn line_packing_noise_threshold(d: usize, n: usize) -> Result<f64> {
    if d < 4 || n < 1 {
        return Err(Error::Unsupported(format!(
            "noise estimate needs d >= 4 and n >= 1 (got d = {d}, n = {n})"
        )));
    }
    let exponent = (d as f64 - 1.0) / (d as f64 - 2.0);
    Ok(1.0 / (12.0 * (n as f64).powf(exponent)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    /// `|⟨ψ₀|ψ_j⟩| = √χ`.
    pub inner_product: f64,
    pub loose_bound: f64,
    /// `(4^d / 8) |⟨ψ|φ⟩|^{2(d−3)}`.
    pub power_law: f64,
    /// `power_law` matches `loose_bound` to 1e-9 relative.
    pub consistent: bool,
    /// `loose_bound ≥ 1`.
    pub trivial: bool,
}

/// How the line-packing bound scales with the inner product as `n` grows.
pub fn kappa_scaling_report(d: usize, n_list: &[usize]) -> Result<Vec<ScalingRow>> {
    if d < 4 {
        return Err(Error::Unsupported(format!("scaling report needs d >= 4 (got {d})")));
    }
    n_list
        .iter()
        .map(|&n| {
            let bound = line_packing_bound(d, n)?;
            let inner_product = packing_overlap_sq(d, n).sqrt();
            let power_law = 4f64.powi(d as i32) / 8.0 * inner_product.powi(2 * (d as i32 - 3));
            let consistent = (power_law - bound.loose).abs() <= 1e-9 * bound.loose.abs().max(power_law.abs());
            Ok(ScalingRow {
                n,
                inner_product,
                loose_bound: bound.loose,
                power_law,
                consistent,
                trivial: bound.loose >= 1.0,
            })
        })
        .collect()
}
