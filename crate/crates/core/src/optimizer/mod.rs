//! Numerical search for low-error measurements and for ensembles with small
//! `κ₀` bounds.

mod measurements;
mod nelder_mead;
mod param;
mod search;

pub use measurements::{best_assignment, column_labels, solve_measurements};
pub use nelder_mead::{golden_polish, golden_section, nelder_mead, Minimum, NelderMeadOptions};
pub use param::{StateParam, UnitaryParam};
pub use search::{joint_search, relabel_satellites};

use crate::bounds::{BoundReport, BoundScenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dimension: usize,
    /// Number of satellite states.
    pub n: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap of each simplex run.
    pub max_iterations: usize,
    /// Simplex runs stop once their value spread falls below this.
    pub tolerance: f64,
    /// Restrict states and bases to real amplitudes.
    pub real_only: bool,
}

impl SearchConfig {
    /// Default budget: 64 restarts of 5000 iterations, real amplitudes for
    /// `d ≤ 4`.
    pub fn new(dimension: usize, n: usize) -> Self {
        Self {
            dimension,
            n,
            restarts: 64,
            seed: 0,
            max_iterations: 5000,
            tolerance: 1e-12,
            real_only: dimension <= 4,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Unsupported("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Unsupported(format!("tolerance must be positive (got {})", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Unsupported("max_iterations must be at least 1".into()));
        }
        if self.dimension < 3 || self.dimension > crate::quantum::MAX_DIM {
            return Err(Error::Unsupported(format!(
                "three-outcome measurements need 3 <= d <= {} (got {})",
                crate::quantum::MAX_DIM,
                self.dimension
            )));
        }
        if self.n < 2 {
            return Err(Error::Unsupported(format!("need at least two satellites (got {})", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub scenario: BoundScenario,
    pub report: BoundReport,
    /// Final objective of every restart, in restart order.
    pub objective_history: Vec<f64>,
    pub seed_used: u64,
    pub best_restart: usize,
}
