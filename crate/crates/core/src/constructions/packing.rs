//! Grassmannian packing of `n` complex lines in `C^D`.
//!
//! Each restart minimizes a log-sum-exp smoothing of `max_{i<j} |⟨φ_i|φ_j⟩|²`
//! by Riemannian gradient descent on the product of unit spheres, with the
//! smoothing sharpened in stages. The best restart wins.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingOptions {
    pub restarts: usize,
    /// Gradient steps per smoothing stage.
    pub max_iterations: usize,
    /// Restrict the search to real lines.
    pub real_only: bool,
}

impl Default for PackingOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iterations: 400, real_only: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub dimension: usize,
    pub lines: Vec<DVector<Complex64>>,
    /// `max_{i≠j} |⟨φ_i|φ_j⟩|²` of `lines`.
    pub achieved_max_overlap_sq: f64,
    /// `1 − n^{−1/(D−1)}`.
    pub target_overlap_sq: f64,
    pub met_target: bool,
}

/// Overlap level the line-packing construction needs: `1 − n^{−1/(D−1)}`.
pub fn packing_target(dimension: usize, n: usize) -> f64 {
    1.0 - (n as f64).powf(-1.0 / (dimension as f64 - 1.0))
}

/// Lower bound `(n − D) / (D (n − 1))` on the best achievable max overlap.
pub fn welch_bound(dimension: usize, n: usize) -> f64 {
    if n <= dimension {
        return 0.0;
    }
    (n - dimension) as f64 / (dimension as f64 * (n - 1) as f64)
}

/// Largest pairwise squared overlap.
pub fn max_overlap_sq(lines: &[DVector<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            worst = worst.max(lines[i].dotc(&lines[j]).norm_sqr());
        }
    }
    worst.min(1.0)
}

pub fn grassmannian_packing(dimension: usize, n: usize, seed: u64) -> Result<PackingResult> {
    grassmannian_packing_with(dimension, n, seed, &PackingOptions::default())
}

pub fn grassmannian_packing_with(
    dimension: usize,
    n: usize,
    seed: u64,
    opts: &PackingOptions,
) -> Result<PackingResult> {
    if dimension < 2 || n < 2 {
        return Err(Error::Unsupported(format!(
            "packing needs D >= 2 and n >= 2 (got D = {dimension}, n = {n})"
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::Unsupported("packing needs at least one restart".into()));
    }
    let target = packing_target(dimension, n);

    if n <= dimension {
        let lines = (0..n)
            .map(|k| DVector::from_fn(dimension, |i, _| Complex64::new(f64::from(u8::from(i == k)), 0.0)))
            .collect();
        return Ok(PackingResult {
            dimension,
            lines,
            achieved_max_overlap_sq: 0.0,
            target_overlap_sq: target,
            met_target: true,
        });
    }

    let runs: Vec<(f64, Vec<DVector<Complex64>>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(restart as u64);
            let lines = descend(random_lines(dimension, n, opts.real_only, &mut rng), opts);
            (max_overlap_sq(&lines), lines)
        })
        .collect();

    let (achieved, lines) = runs
        .into_iter()
        .reduce(|best, cand| if cand.0 < best.0 { cand } else { best })
        .expect("at least one restart");

    Ok(PackingResult {
        dimension,
        lines,
        achieved_max_overlap_sq: achieved,
        target_overlap_sq: target,
        met_target: achieved <= target,
    })
}

fn random_lines(
    dimension: usize,
    n: usize,
    real_only: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<DVector<Complex64>> {
    (0..n)
        .map(|_| {
            let v = DVector::from_fn(dimension, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = if real_only { 0.0 } else { StandardNormal.sample(rng) };
                Complex64::new(re, im)
            });
            let norm = v.norm();
            v.unscale(norm)
        })
        .collect()
}

/// Smoothed maximum and the per-pair softmax weights.
fn smoothed_max(lines: &[DVector<Complex64>], beta: f64, weights: &mut Vec<f64>) -> f64 {
    let n = lines.len();
    weights.clear();
    let mut peak = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let g = lines[i].dotc(&lines[j]).norm_sqr();
            peak = peak.max(g);
            weights.push(g);
        }
    }
    let mut z = 0.0;
    for w in weights.iter_mut() {
        *w = (beta * (*w - peak)).exp();
        z += *w;
    }
    for w in weights.iter_mut() {
        *w /= z;
    }
    peak + z.ln() / beta
}

fn smoothed_value(lines: &[DVector<Complex64>], beta: f64) -> f64 {
    let mut scratch = Vec::new();
    smoothed_max(lines, beta, &mut scratch)
}

fn descend(mut lines: Vec<DVector<Complex64>>, opts: &PackingOptions) -> Vec<DVector<Complex64>> {
    let n = lines.len();
    let mut weights = Vec::with_capacity(n * (n - 1) / 2);
    for beta in [10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0] {
        let mut step = 0.1;
        for _ in 0..opts.max_iterations {
            let value = smoothed_max(&lines, beta, &mut weights);

            // Wirtinger gradient with respect to conj(φ_i): Σ_j w_ij φ_j ⟨φ_j|φ_i⟩,
            // projected onto the tangent space of the unit sphere at φ_i.
            let mut grads: Vec<DVector<Complex64>> = vec![DVector::zeros(lines[0].len()); n];
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let w = weights[k];
                    k += 1;
                    if w < 1e-300 {
                        continue;
                    }
                    let ji = lines[j].dotc(&lines[i]);
                    grads[i].axpy(Complex64::new(w, 0.0) * ji, &lines[j], Complex64::new(1.0, 0.0));
                    grads[j].axpy(Complex64::new(w, 0.0) * ji.conj(), &lines[i], Complex64::new(1.0, 0.0));
                }
            }
            for (g, phi) in grads.iter_mut().zip(&lines) {
                let radial = phi.dotc(g);
                g.axpy(-radial, phi, Complex64::new(1.0, 0.0));
            }
            let grad_norm_sq: f64 = grads.iter().map(|g| g.norm_squared()).sum();
            if grad_norm_sq < 1e-28 {
                break;
            }

            let mut accepted = false;
            while step > 1e-12 {
                let trial: Vec<_> = lines
                    .iter()
                    .zip(&grads)
                    .map(|(phi, g)| {
                        let moved = phi - g * Complex64::new(step, 0.0);
                        let norm = moved.norm();
                        moved.unscale(norm)
                    })
                    .collect();
                if smoothed_value(&trial, beta) < value {
                    lines = trial;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
    lines
}
