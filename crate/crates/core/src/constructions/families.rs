//! Closed-form state families: mutually unbiased bases and Hadamard states.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{PureState, StateEnsemble};

/// Largest dimension accepted by [`hadamard_states`] (`2^{d−1}` satellites).
pub const MAX_HADAMARD_DIM: usize = 12;

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// Unit-modulus entries of the four non-computational MUBs in `d = 4`,
/// encoded as powers of `i`. Row `r` of block `b` is vector `r` of basis `b`,
/// scaled by 1/2.
const MUB4_PHASES: [[[u8; 4]; 4]; 4] = [
    [[0, 0, 0, 0], [0, 2, 0, 2], [0, 0, 2, 2], [0, 2, 2, 0]],
    [[0, 1, 1, 2], [0, 3, 1, 0], [0, 1, 3, 0], [0, 3, 3, 2]],
    [[0, 1, 0, 3], [0, 3, 0, 1], [0, 1, 2, 1], [0, 3, 2, 3]],
    [[0, 0, 1, 3], [0, 2, 1, 1], [0, 0, 3, 1], [0, 2, 3, 3]],
];

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// The `d` bases unbiased to the computational basis and to each other,
/// each returned as a matrix whose columns are the basis vectors.
///
/// Supported: `d = 2`, `d = 4` and odd primes.
pub fn mub_bases(d: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let norm = 1.0 / (d as f64).sqrt();
    match d {
        2 => {
            let x = [[1.0, 1.0], [1.0, -1.0]];
            let bx = DMatrix::from_fn(2, 2, |row, col| Complex64::new(x[col][row] * norm, 0.0));
            let by = DMatrix::from_fn(2, 2, |row, col| {
                let z = if row == 0 {
                    Complex64::new(1.0, 0.0)
                } else if col == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
                z * norm
            });
            Ok(vec![bx, by])
        }
        4 => Ok(MUB4_PHASES
            .iter()
            .map(|block| DMatrix::from_fn(4, 4, |row, col| i_pow(block[col][row]) * 0.5))
            .collect()),
        p if p > 2 && is_prime(p) => Ok((0..p)
            .map(|k| {
                DMatrix::from_fn(p, p, |x, m| {
                    let exponent = (k * x * x + m * x) % p;
                    Complex64::from_polar(norm, 2.0 * PI * exponent as f64 / p as f64)
                })
            })
            .collect()),
        _ => Err(Error::Unsupported(format!(
            "no complete set of mutually unbiased bases is built in for d = {d} \
             (supported: 2, 4 and odd primes)"
        ))),
    }
}

/// `ψ₀ = |0⟩` from the computational basis and the `d²` vectors of the
/// remaining `d` mutually unbiased bases as satellites.
pub fn mub_states(d: usize) -> Result<StateEnsemble> {
    let bases = mub_bases(d)?;
    let satellites = bases
        .iter()
        .flat_map(|b| b.column_iter().map(|c| c.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
        .map(PureState::new)
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::new(PureState::basis_vector(d, 0)?, satellites)
}

/// `ψ₀ = |0⟩` and the `2^{d−1}` states `(1, ±1, …, ±1)/√d`.
///
/// Satellite `k` carries a minus sign on component `i ≥ 1` iff bit `i − 1`
/// of `k` is set.
pub fn hadamard_states(d: usize) -> Result<StateEnsemble> {
    if d < 3 {
        return Err(Error::Unsupported(format!("Hadamard family needs d >= 3 (got {d})")));
    }
    if d > MAX_HADAMARD_DIM {
        return Err(Error::Unsupported(format!(
            "Hadamard family with d = {d} has 2^{} states, above the cap d <= {MAX_HADAMARD_DIM}",
            d - 1
        )));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let satellites = (0..1usize << (d - 1))
        .map(|mask| {
            let amps: Vec<f64> =
                (0..d).map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -norm } else { norm }).collect();
            PureState::from_real(&amps)
        })
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::new(PureState::basis_vector(d, 0)?, satellites)
}
