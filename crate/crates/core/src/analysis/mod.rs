//! Verdict layer: CHSH values, the exact certificate for the instruction-set
//! bound, agreement with the singlet statistics, no-signaling, the
//! measurement-independence audit and the opposite-spin curve.
//!
//! Exact checks use an absolute tolerance of [`EXACT_TOL`]; Monte Carlo
//! checks use five binomial standard deviations. Reports carry metrics and
//! thresholds only.

mod audit;
mod certify;
mod chsh;
mod curve;
mod report;

use thiserror::Error;

use crate::engine::EngineError;
use crate::hvmodels::ModelError;

pub use audit::{
    agreement_bound, measurement_independence_audit, no_signaling_check, quantum_agreement,
    CheckMode,
};
pub use certify::{certify_mermin_bound, CertificateRow, MerminCertificate};
pub use chsh::{
    chsh_value, mermin_chsh, mermin_chsh_extremes, mermin_correlation, ChshSettings,
    LabelChshSettings,
};
pub use curve::{opposite_spin_curve, write_curve_csv, CurveRow, CURVE_HEADER, MERMIN_FLOOR};
pub use report::{AuditReport, Check, Provenance};

pub const EXACT_TOL: f64 = 1e-12;

/// Width of Monte Carlo acceptance bands, in binomial standard deviations.
pub const SIGMA_BAND: f64 = 5.0;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at least one setting pair is required")]
    NoPairs,
    #[error("no-signaling needs two pairs sharing a theta and two sharing a phi")]
    InsufficientPairs,
}
