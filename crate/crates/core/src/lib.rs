//! Bounds on the classical-to-quantum overlap ratio `κ(ψ, φ) = ω_C / ω_Q`
//! that any ψ-epistemic ontological model reproducing quantum statistics
//! must satisfy.
//!
//! The crate covers the full pipeline: quantum primitives ([`quantum`]),
//! the PP-incompatibility test ([`compatibility`]), bound evaluation
//! ([`bounds`]), state families and reference fixtures ([`constructions`]),
//! numerical search for measurements and states ([`optimizer`]), finite
//! ontological-model simulation ([`ontology`]) and the document formats
//! ([`io`]).

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod compatibility;
pub mod constructions;
pub mod error;
pub mod io;
pub mod ontology;
pub mod optimizer;
pub mod quantum;

pub use bounds::{
    equal_overlap_bound, evaluate_bound, kappa_scaling_report, line_packing_bound,
    line_packing_noise_threshold, BoundReport, BoundScenario, PackingBound, PairMeasurement, PairTerms,
};
pub use compatibility::{
    certify_ensemble, is_pp_incompatible, triple_overlaps, CertificationReport, TripleOverlaps,
};
pub use error::{Error, Result};
pub use io::{read_document, write_document, Document, EnsembleDocument, ScenarioDocument};
pub use ontology::{
    classical_overlap, fuzz_overlap_inequality, ks_qubit_kappa, model_probability, DiscreteOntologicalModel,
    FuzzReport,
};
pub use optimizer::{joint_search, solve_measurements, SearchConfig, SearchResult};
pub use quantum::{
    born_probability, inner_product, omega_q, MeasurementBasis, OutcomeLabel, PureState, StateEnsemble,
};
