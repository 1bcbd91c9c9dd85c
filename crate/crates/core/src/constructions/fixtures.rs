//! Published reference scenarios for `(d, n) ∈ {(3,3), (3,4), (4,4)}`.
//!
//! States and bases are real and coded as trigonometric expressions of the
//! published angles, so no decimal matrix entries are transcribed. Each
//! basis matrix lists basis vectors as columns; column `i` is outcome `m_i`.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{BoundScenario, PairMeasurement};
use crate::error::{Error, Result};
use crate::quantum::{MeasurementBasis, PureState, StateEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixtureId {
    D3N3,
    D3N4,
    D4N4,
}

impl FixtureId {
    pub const ALL: [FixtureId; 3] = [FixtureId::D3N3, FixtureId::D3N4, FixtureId::D4N4];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureId::D3N3 => "d3n3",
            FixtureId::D3N4 => "d3n4",
            FixtureId::D4N4 => "d4n4",
        }
    }

    /// Published bound on `κ₀`.
    pub fn expected_bound(self) -> f64 {
        match self {
            FixtureId::D3N3 => 0.9964,
            FixtureId::D3N4 => 0.9361,
            FixtureId::D4N4 => 0.9054,
        }
    }

    /// Published noise threshold, one significant figure.
    pub fn expected_noise(self) -> f64 {
        match self {
            FixtureId::D3N3 => 6e-4,
            FixtureId::D3N4 => 5e-3,
            FixtureId::D4N4 => 7e-3,
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown fixture '{s}' (expected d3n3, d3n4 or d4n4)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureCase {
    pub id: FixtureId,
    pub scenario: BoundScenario,
    pub expected_bound: f64,
    pub expected_noise: f64,
    /// Named angles the fixture is built from.
    pub angles: Vec<(&'static str, f64)>,
}

pub fn reference_fixture(id: FixtureId) -> FixtureCase {
    let (scenario, angles) = match id {
        FixtureId::D3N3 => d3n3(),
        FixtureId::D3N4 => d3n4(),
        FixtureId::D4N4 => d4n4(),
    };
    FixtureCase {
        id,
        scenario: scenario.expect("reference fixture is well formed"),
        expected_bound: id.expected_bound(),
        expected_noise: id.expected_noise(),
        angles,
    }
}

type Built = (Result<BoundScenario>, Vec<(&'static str, f64)>);

fn states(psi0: &[f64], satellites: &[Vec<f64>]) -> Result<StateEnsemble> {
    let sats = satellites.iter().map(|s| PureState::from_real(s)).collect::<Result<Vec<_>>>()?;
    StateEnsemble::new(PureState::from_real(psi0)?, sats)
}

fn three_outcome(pair: (usize, usize), rows: Vec<Vec<f64>>) -> Result<PairMeasurement> {
    // For d = 4 the last column is orthogonal to the triple and joins m₀.
    let labels = match rows.len() {
        3 => vec![0, 1, 2],
        _ => vec![0, 1, 2, 0],
    };
    Ok(PairMeasurement {
        pair,
        basis: MeasurementBasis::from_real_rows(&rows, labels)?,
        assignment: [0, 1, 2],
    })
}

fn d3n3() -> Built {
    let th = [1.1945, 0.2839, 1.8423, 1.6276, 2.2192, 0.3100, 1.4269];
    let c = |k: usize| f64::cos(th[k - 1]);
    let s = |k: usize| f64::sin(th[k - 1]);
    let r2 = 2f64.sqrt();
    let angles = vec![
        ("theta1", th[0]),
        ("theta2", th[1]),
        ("theta3", th[2]),
        ("theta4", th[3]),
        ("theta5", th[4]),
        ("theta6", th[5]),
        ("theta7", th[6]),
    ];
    let scenario = (|| {
        let ens = states(
            &[1.0, 0.0, 0.0],
            &[
                vec![c(1), s(1), 0.0],
                vec![c(2), s(2) * c(3), s(2) * s(3)],
                vec![c(2), s(2) * c(3), -s(2) * s(3)],
            ],
        )?;
        let m12 = vec![
            vec![c(4), s(4) * c(6), s(4) * s(6)],
            vec![s(4) * c(5), -c(4) * c(5) * c(6) - s(5) * s(6), -c(4) * c(5) * s(6) + s(5) * c(6)],
            vec![-s(4) * s(5), c(4) * s(5) * c(6) - c(5) * s(6), c(4) * s(5) * s(6) + c(5) * c(6)],
        ];
        let m13 = vec![
            vec![c(4), s(4) * c(6), s(4) * s(6)],
            vec![s(4) * c(5), -c(4) * c(5) * c(6) - s(5) * s(6), -c(4) * c(5) * s(6) + s(5) * c(6)],
            vec![s(4) * s(5), -c(4) * s(5) * c(6) + c(5) * s(6), -c(4) * s(5) * s(6) - c(5) * c(6)],
        ];
        let m23 = vec![
            vec![c(7), s(7) / r2, s(7) / r2],
            vec![-s(7), c(7) / r2, c(7) / r2],
            vec![0.0, -1.0 / r2, 1.0 / r2],
        ];
        BoundScenario::new(
            ens,
            vec![three_outcome((1, 2), m12)?, three_outcome((1, 3), m13)?, three_outcome((2, 3), m23)?],
        )
    })();
    (scenario, angles)
}

fn d3n4() -> Built {
    let theta: f64 = 0.7152;
    let phi: f64 = 1.4436;
    let (ct, st) = (theta.cos(), theta.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let r2 = 2f64.sqrt();
    let scenario = (|| {
        let ens = states(
            &[1.0, 0.0, 0.0],
            &[vec![ct, st, 0.0], vec![ct, 0.0, st], vec![ct, -st, 0.0], vec![ct, 0.0, -st]],
        )?;
        let (p, m) = ((1.0 + cp) / 2.0, (1.0 - cp) / 2.0);
        let q = sp / r2;
        let h = 1.0 / r2;
        let ms = vec![
            three_outcome((1, 2), vec![vec![cp, q, q], vec![q, -p, m], vec![q, m, -p]])?,
            three_outcome((1, 3), vec![vec![0.0, h, h], vec![0.0, -h, h], vec![1.0, 0.0, 0.0]])?,
            three_outcome((1, 4), vec![vec![cp, q, q], vec![q, -p, m], vec![-q, -m, p]])?,
            three_outcome((2, 3), vec![vec![cp, q, q], vec![-q, -m, p], vec![q, -p, m]])?,
            three_outcome((2, 4), vec![vec![0.0, h, h], vec![1.0, 0.0, 0.0], vec![0.0, -h, h]])?,
            three_outcome((3, 4), vec![vec![cp, q, q], vec![-q, p, -m], vec![-q, -m, p]])?,
        ];
        BoundScenario::new(ens, ms)
    })();
    (scenario, vec![("theta", theta), ("phi", phi)])
}

fn d4n4() -> Built {
    let theta: f64 = 0.7274;
    let phi: f64 = 1.4946;
    let (ct, st) = (theta.cos(), theta.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    let scenario = (|| {
        let a = st / r3;
        let ens = states(
            &[1.0, 0.0, 0.0, 0.0],
            &[vec![ct, a, a, a], vec![ct, a, -a, -a], vec![ct, -a, a, -a], vec![ct, -a, -a, a]],
        )?;
        // Recurring rows of the published matrices.
        let top = vec![cp, sp / r2, sp / r2, 0.0];
        let plus = vec![sp, -cp / r2, -cp / r2, 0.0];
        let minus = vec![-sp, cp / r2, cp / r2, 0.0];
        let up = vec![0.0, -0.5, 0.5, 1.0 / r2];
        let down = vec![0.0, -0.5, 0.5, -1.0 / r2];
        let flip = vec![0.0, 0.5, -0.5, 1.0 / r2];
        let ms = vec![
            three_outcome((1, 2), vec![top.clone(), plus.clone(), up.clone(), down.clone()])?,
            three_outcome((1, 3), vec![top.clone(), up.clone(), plus.clone(), down.clone()])?,
            three_outcome((1, 4), vec![top.clone(), up.clone(), down.clone(), plus.clone()])?,
            three_outcome((2, 3), vec![top.clone(), up.clone(), flip.clone(), minus.clone()])?,
            three_outcome((2, 4), vec![top.clone(), up.clone(), minus.clone(), flip.clone()])?,
            three_outcome((3, 4), vec![top, minus, up, flip])?,
        ];
        BoundScenario::new(ens, ms)
    })();
    (scenario, vec![("theta", theta), ("phi", phi)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::evaluate_bound;
    use crate::quantum::{gram_deviation, omega_q};

    #[test]
    fn fixtures_reproduce_published_bounds() {
        for id in FixtureId::ALL {
            let case = reference_fixture(id);
            let report = evaluate_bound(&case.scenario).unwrap();
            assert!((report.kappa_bound - case.expected_bound).abs() < 5e-4, "{id}: {}", report.kappa_bound);
            assert!(report.nontrivial);
        }
    }

    #[test]
    fn fixture_bases_are_orthogonal() {
        for id in FixtureId::ALL {
            for m in reference_fixture(id).scenario.measurements() {
                assert!(gram_deviation(m.basis.vectors()) < 1e-12, "{id} {:?}", m.pair);
            }
        }
    }

    #[test]
    fn d4_spare_column_is_orthogonal_to_the_triple() {
        let case = reference_fixture(FixtureId::D4N4);
        let ens = case.scenario.ensemble();
        for m in case.scenario.measurements() {
            assert_eq!(m.basis.labels(), &[0, 1, 2, 0]);
            for j in m.state_indices() {
                let p = m.basis.column_probability(3, ens.state(j).unwrap()).unwrap();
                assert!(p.sqrt() < 1e-9, "{:?} state {j}: {p}", m.pair);
            }
        }
    }

    #[test]
    fn equal_overlap_fixtures() {
        for id in [FixtureId::D3N4, FixtureId::D4N4] {
            let ens = reference_fixture(id).scenario.ensemble().clone();
            let w = omega_q(ens.psi0(), &ens.satellites()[0]).unwrap();
            for s in ens.satellites() {
                assert!((omega_q(ens.psi0(), s).unwrap() - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fixture_ids_parse() {
        for id in FixtureId::ALL {
            assert_eq!(id.as_str().parse::<FixtureId>().unwrap(), id);
        }
        assert!("d5n5".parse::<FixtureId>().is_err());
    }
}
