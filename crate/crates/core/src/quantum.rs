//! Pure states, projective measurements with merged outcomes, Born-rule
//! probabilities and the quantum overlap `ω_Q`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitude-norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Gram-matrix tolerance for [`MeasurementBasis::new`].
pub const UNITARY_TOL: f64 = 1e-12;
/// Soft cap on the Hilbert-space dimension handled with dense algebra.
pub const MAX_DIM: usize = 64;

/// Label of a measurement outcome. Several basis columns may share a label.
pub type OutcomeLabel = usize;

/// A normalized pure state `|ψ⟩` in dimension `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    ///
    /// Vectors whose computed norm is already 1 to within a few ulps are kept
    /// bit-for-bit, so serialized states round-trip exactly.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 {
            return Err(Error::InvalidState(format!("dimension {dim} < 2")));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidState(format!("dimension {dim} exceeds the dense cap {MAX_DIM}")));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let mut v = DVector::from_vec(amplitudes);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
            v.unscale_mut(norm);
        }
        Ok(Self { amplitudes: v })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis_vector(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidState(format!("basis index {k} >= dimension {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn is_real(&self) -> bool {
        self.amplitudes.iter().all(|z| z.im == 0.0)
    }

    /// The same ray with every amplitude multiplied by `e^{iφ}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phase);
        Self { amplitudes: self.amplitudes.map(|z| z * factor) }
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn dot_conj<'a>(a: impl Iterator<Item = &'a Complex64>, b: impl Iterator<Item = &'a Complex64>) -> Complex64 {
    a.zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨a|b⟩ = Σ_k conj(a_k) b_k`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot_conj(a.amplitudes.iter(), b.amplitudes.iter()))
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn overlap_sq(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().min(1.0))
}

/// Quantum overlap `ω_Q = 1 − √(1 − |⟨a|b⟩|²)`.
pub fn omega_q(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(omega_q_from_overlap_sq(overlap_sq(a, b)?))
}

/// `ω_Q` expressed through the squared inner product.
pub fn omega_q_from_overlap_sq(overlap_sq: f64) -> f64 {
    1.0 - (1.0 - overlap_sq.clamp(0.0, 1.0)).sqrt()
}

/// An orthonormal basis whose columns carry outcome labels.
///
/// Columns sharing a label form one coarse-grained projective outcome, which
/// is how a `d`-column basis realizes a 3-outcome measurement for `d > 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: DMatrix<Complex64>,
    labels: Vec<OutcomeLabel>,
}

impl MeasurementBasis {
    pub fn new(vectors: DMatrix<Complex64>, labels: Vec<OutcomeLabel>) -> Result<Self> {
        Self::with_tolerance(vectors, labels, UNITARY_TOL)
    }

    /// Like [`MeasurementBasis::new`] with an explicit Gram-matrix tolerance.
    pub fn with_tolerance(vectors: DMatrix<Complex64>, labels: Vec<OutcomeLabel>, tol: f64) -> Result<Self> {
        let (rows, cols) = vectors.shape();
        if rows != cols {
            return Err(Error::InvalidBasis(format!("matrix is {rows}x{cols}, not square")));
        }
        if rows < 2 {
            return Err(Error::InvalidBasis(format!("dimension {rows} < 2")));
        }
        if labels.len() != cols {
            return Err(Error::InvalidBasis(format!("{} outcome labels for {cols} columns", labels.len())));
        }
        let deviation = gram_deviation(&vectors);
        if !(deviation <= tol) {
            return Err(Error::InvalidBasis(format!(
                "Gram matrix deviates from identity by {deviation:.3e} (tolerance {tol:.1e})"
            )));
        }
        Ok(Self { vectors, labels })
    }

    /// Basis whose every column is its own outcome, labelled by column index.
    pub fn unmerged(vectors: DMatrix<Complex64>) -> Result<Self> {
        let labels = (0..vectors.ncols()).collect();
        Self::new(vectors, labels)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::unmerged(DMatrix::identity(dim, dim))
    }

    /// Real basis given row by row, columns being the basis vectors.
    pub fn from_real_rows(rows: &[Vec<f64>], labels: Vec<OutcomeLabel>) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidBasis("ragged matrix".into()));
        }
        let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(m, labels)
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn labels(&self) -> &[OutcomeLabel] {
        &self.labels
    }

    /// Distinct outcome labels in increasing order.
    pub fn outcomes(&self) -> Vec<OutcomeLabel> {
        let mut out = self.labels.clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn has_outcome(&self, outcome: OutcomeLabel) -> bool {
        self.labels.contains(&outcome)
    }

    /// `|⟨m_col|ψ⟩|²` for a single column.
    pub fn column_probability(&self, col: usize, psi: &PureState) -> Result<f64> {
        check_dims(self.dim(), psi.dim())?;
        if col >= self.dim() {
            return Err(Error::IndexOutOfRange(format!("column {col}")));
        }
        Ok(dot_conj(self.vectors.column(col).iter(), psi.amplitudes().iter()).norm_sqr())
    }
}

/// Largest entry of `|V†V − I|`.
pub fn gram_deviation(vectors: &DMatrix<Complex64>) -> f64 {
    let gram = vectors.adjoint() * vectors;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (gram[(i, j)] - Complex64::new(target, 0.0)).norm();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

/// Re-orthonormalizes the columns by two passes of modified Gram–Schmidt.
pub fn orthonormalize(vectors: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut q = vectors.clone();
    for _ in 0..2 {
        for j in 0..q.ncols() {
            for k in 0..j {
                let proj = dot_conj(q.column(k).iter(), q.column(j).iter());
                let qk = q.column(k).into_owned();
                let mut cj = q.column_mut(j);
                cj.axpy(-proj, &qk, Complex64::new(1.0, 0.0));
            }
            let norm = q.column(j).norm();
            q.column_mut(j).unscale_mut(norm);
        }
    }
    q
}

/// Born probability of an outcome, summed over all columns carrying its label.
pub fn born_probability(basis: &MeasurementBasis, outcome: OutcomeLabel, psi: &PureState) -> Result<f64> {
    check_dims(basis.dim(), psi.dim())?;
    if !basis.has_outcome(outcome) {
        return Err(Error::UnknownOutcome(outcome));
    }
    let mut total = 0.0;
    for (col, &label) in basis.labels.iter().enumerate() {
        if label == outcome {
            total += basis.column_probability(col, psi)?;
        }
    }
    Ok(total)
}

/// The distinguished state `ψ₀` together with `n ≥ 2` satellite states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    psi0: PureState,
    satellites: Vec<PureState>,
}

impl StateEnsemble {
    pub fn new(psi0: PureState, satellites: Vec<PureState>) -> Result<Self> {
        if satellites.len() < 2 {
            return Err(Error::InvalidEnsemble(format!(
                "need at least 2 satellite states, got {}",
                satellites.len()
            )));
        }
        let d = psi0.dim();
        if let Some(bad) = satellites.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
        }
        Ok(Self { psi0, satellites })
    }

    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }

    pub fn satellites(&self) -> &[PureState] {
        &self.satellites
    }

    /// Number of satellite states `n`.
    pub fn n(&self) -> usize {
        self.satellites.len()
    }

    pub fn dim(&self) -> usize {
        self.psi0.dim()
    }

    /// State by ensemble index: `0` is `ψ₀`, `1..=n` are the satellites.
    pub fn state(&self, index: usize) -> Option<&PureState> {
        match index {
            0 => Some(&self.psi0),
            j => self.satellites.get(j - 1),
        }
    }

    pub fn is_real(&self) -> bool {
        self.psi0.is_real() && self.satellites.iter().all(PureState::is_real)
    }

    /// All pairs `(j₁, j₂)` with `1 ≤ j₁ < j₂ ≤ n`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.n())
    }

    /// `ω_Q(ψ₀, ψ_j)` for every satellite, in order.
    pub fn omega_q_values(&self) -> Vec<f64> {
        self.satellites
            .iter()
            .map(|s| omega_q(&self.psi0, s).expect("ensemble dimensions are uniform"))
            .collect()
    }
}

/// Lexicographically ordered pairs `1 ≤ j₁ < j₂ ≤ n`.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|j1| (j1 + 1..=n).map(move |j2| (j1, j2))).collect()
}
