//! Multiparameter quantum metrology of weakly perturbed Hamiltonians
//! `H = H0 + sum_mu lambda_mu H_mu`.
//!
//! The static scheme encodes the couplings in a perturbed eigenstate, the
//! dynamical scheme in the state evolved from a fixed probe. Both report the
//! quantum Fisher information matrix, the Uhlmann curvature, the bound
//! `B = Tr Q^-1` and the quantumness `R`. The [`oracle`] module supplies exact
//! reference values with no perturbation theory involved.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod perturbation;
pub mod statics;

pub use dynamics::{dynamic_report, k_operators, scan_time, KOperator, TimeScan};
pub use error::{Error, Result};
pub use linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, SpectralDecomposition, StateVector, C64};
pub use models::{build, ModelKind, ModelSpec};
pub use perturbation::{first_order_correction, perturbed_state, FirstOrderCorrection, PerturbationProblem};
pub use statics::{analyze_static, EstimationReport, QfiMatrix, StaticAnalysis, UhlmannMatrix};
