//! Unconstrained angle parameterizations of bases and states.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `U = G₁ G₂ ⋯ G_K`, one Givens rotation per coordinate pair `p < q` in
/// lexicographic order.
///
/// Real rotations take one angle each and cover `SO(d)`. Complex rotations
/// `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]` take two and cover
/// `U(d)` up to column phases, which no Born probability can see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryParam {
    dim: usize,
    real: bool,
    planes: Vec<(usize, usize)>,
}

impl UnitaryParam {
    pub fn new(dim: usize, real: bool) -> Self {
        let planes = (0..dim).flat_map(|p| (p + 1..dim).map(move |q| (p, q))).collect();
        Self { dim, real, planes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Number of parameters.
    pub fn len(&self) -> usize {
        self.planes.len() * if self.real { 1 } else { 2 }
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    fn rotation(&self, params: &[f64], k: usize) -> (f64, f64, Complex64) {
        let (theta, phase) = if self.real {
            (params[k], Complex64::new(1.0, 0.0))
        } else {
            (params[2 * k], Complex64::from_polar(1.0, params[2 * k + 1]))
        };
        let (s, c) = theta.sin_cos();
        (c, s, phase)
    }

    /// `v ← U† v`, so that `v[c] = ⟨u_c|v⟩` for the columns `u_c` of `U`.
    pub fn apply_adjoint(&self, params: &[f64], v: &mut [Complex64]) {
        for (k, &(p, q)) in self.planes.iter().enumerate() {
            let (c, s, e) = self.rotation(params, k);
            let (vp, vq) = (v[p], v[q]);
            v[p] = vp * c + e.conj() * vq * s;
            v[q] = vq * c - e * vp * s;
        }
    }

    /// The unitary itself; its columns are the basis vectors.
    pub fn matrix(&self, params: &[f64]) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::identity(self.dim, self.dim);
        for (k, &(p, q)) in self.planes.iter().enumerate() {
            let (c, s, e) = self.rotation(params, k);
            for row in 0..self.dim {
                let (mp, mq) = (m[(row, p)], m[(row, q)]);
                m[(row, p)] = mp * c + e * mq * s;
                m[(row, q)] = mq * c - e.conj() * mp * s;
            }
        }
        m
    }
}

/// Unit vectors with a real first amplitude:
/// hyperspherical angles for the moduli and, in the complex case, one phase
/// per remaining component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateParam {
    dim: usize,
    real: bool,
}

impl StateParam {
    pub fn new(dim: usize, real: bool) -> Self {
        Self { dim, real }
    }

    pub fn len(&self) -> usize {
        (self.dim - 1) * if self.real { 1 } else { 2 }
    }

    pub fn is_empty(&self) -> bool {
        self.dim < 2
    }

    pub fn amplitudes(&self, params: &[f64], out: &mut [Complex64]) {
        let d = self.dim;
        let mut radius = 1.0;
        for k in 0..d - 1 {
            let (s, c) = params[k].sin_cos();
            out[k] = Complex64::new(radius * c, 0.0);
            radius *= s;
        }
        out[d - 1] = Complex64::new(radius, 0.0);
        if !self.real {
            for k in 1..d {
                out[k] *= Complex64::from_polar(1.0, params[d - 1 + k - 1]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gram_deviation;
    use proptest::prelude::*;

    fn params(len: usize, seed: u64) -> Vec<f64> {
        (0..len).map(|i| ((i as u64 * 7919 + seed * 104_729) % 1000) as f64 / 157.0 - 3.0).collect()
    }

    #[test]
    fn counts() {
        assert_eq!(UnitaryParam::new(3, true).len(), 3);
        assert_eq!(UnitaryParam::new(4, true).len(), 6);
        assert_eq!(UnitaryParam::new(4, false).len(), 12);
        assert_eq!(StateParam::new(4, true).len(), 3);
        assert_eq!(StateParam::new(4, false).len(), 6);
    }

    #[test]
    fn zero_angles_give_identity() {
        let u = UnitaryParam::new(4, false);
        assert_eq!(u.matrix(&vec![0.0; u.len()]), DMatrix::identity(4, 4));
    }

    proptest! {
        #[test]
        fn matrix_is_unitary_and_adjoint_matches(seed in 0u64..1000, real in any::<bool>(), d in 2usize..6) {
            let u = UnitaryParam::new(d, real);
            let p = params(u.len(), seed);
            let m = u.matrix(&p);
            prop_assert!(gram_deviation(&m) < 1e-13);

            let v: Vec<Complex64> = (0..d).map(|i| Complex64::new(i as f64 + 1.0, 0.5 - i as f64)).collect();
            let mut w = v.clone();
            u.apply_adjoint(&p, &mut w);
            let direct = m.adjoint() * nalgebra::DVector::from_vec(v);
            for (a, b) in w.iter().zip(direct.iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn states_are_unit_vectors(seed in 0u64..1000, real in any::<bool>(), d in 2usize..7) {
            let sp = StateParam::new(d, real);
            let mut out = vec![Complex64::new(0.0, 0.0); d];
            sp.amplitudes(&params(sp.len(), seed), &mut out);
            let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-14);
            prop_assert_eq!(out[0].im, 0.0);
        }
    }
}
