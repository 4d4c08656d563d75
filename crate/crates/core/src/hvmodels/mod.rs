//! Hidden-variable models behind a single [`Model`] contract.
//!
//! A model splits a trial into `prepare`, which consumes randomness and
//! returns a [`HiddenState`], and `measure`, which is deterministic given
//! that state and the chosen [`SettingPair`]. Measuring the same prepared
//! state twice at the same pair always returns the same outcome.
//!
//! Three implementations are provided:
//!
//! * [`MerminModel`]: each particle carries a pre-assigned spin for every
//!   labelled setting (an instruction set); the outcome for particle 1 only
//!   reads its own setting and likewise for particle 2.
//! * [`GrandmaModel`]: the source pre-assigns one joint spin state per
//!   setting pair, sampled with the singlet pair probabilities.
//! * [`QuantumModel`]: the singlet oracle wrapped to fit the contract. It
//!   draws an outcome on first query of a pair and memoizes it; no realism
//!   claim is attached.

mod grandma;
mod mermin;
mod quantum_model;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    total_variation, DomainError, JointDistribution, JointOutcome, LabelBinding, SettingPair,
};
use crate::stream::Stream;

pub use grandma::{
    grandma_prepare, grandma_sample_state, AssignmentTable, GrandmaMode, GrandmaModel,
    LabeledTable, LazyTable,
};
pub use mermin::{
    mermin_enumerate, mermin_measure, mermin_opposite_fraction, mermin_prepare, InstructionSet,
    MerminModel, MerminWeights, INSTRUCTION_SET_COUNT,
};
pub use quantum_model::{QuantumModel, QuantumState};

/// A pre-existing joint spin state `|s₁,θ⟩|s₂,φ⟩`; same four values, same
/// canonical order as [`JointOutcome`].
pub type SystemSpinState = JointOutcome;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("setting pair {pair} is outside the {model} model's domain")]
    OutsideDomain { model: ModelKind, pair: SettingPair },
    #[error("hidden state belongs to the {found} model, not {expected}")]
    WrongState {
        expected: ModelKind,
        found: ModelKind,
    },
    #[error("invalid instruction-set weights: {0}")]
    InvalidWeights(DomainError),
    #[error("instruction-set weights need {expected} entries, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("instruction set violates anti-correlation at label {0}")]
    NotAntiCorrelated(crate::domain::SettingLabel),
    #[error("assignment table entry {pair} = {state} is not admissible")]
    InadmissibleEntry {
        pair: SettingPair,
        state: SystemSpinState,
    },
    #[error("cannot compare lambda distributions over different hidden spaces")]
    LambdaMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Quantum,
    Mermin,
    Grandma,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Quantum => "quantum",
            ModelKind::Mermin => "mermin",
            ModelKind::Grandma => "grandma",
        })
    }
}

/// Which setting pairs a model accepts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Any pair of angles.
    Continuous,
    /// Only pairs whose angles are both bound to a label.
    Labeled(LabelBinding),
}

impl Domain {
    pub fn contains(&self, pair: SettingPair) -> bool {
        match self {
            Domain::Continuous => true,
            Domain::Labeled(b) => b.labels_of(pair).is_some(),
        }
    }
}

/// Per-trial hidden variable, tagged by owning model.
#[derive(Debug, Clone)]
pub enum HiddenState {
    Mermin(InstructionSet),
    Grandma(AssignmentTable),
    Quantum(Box<QuantumState>),
}

impl HiddenState {
    pub fn kind(&self) -> ModelKind {
        match self {
            HiddenState::Mermin(_) => ModelKind::Mermin,
            HiddenState::Grandma(_) => ModelKind::Grandma,
            HiddenState::Quantum(_) => ModelKind::Quantum,
        }
    }
}

/// Exact law of the hidden component a model consults at a setting pair.
///
/// For the instruction-set model this is the source's weight vector over
/// the eight sets, which is defined without reference to any setting. For
/// the pair-assignment model it is the law of the pre-assigned joint state
/// for that pair. The quantum pseudo-model reports its own outcome law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "space", content = "p", rename_all = "snake_case")]
pub enum LambdaDistribution {
    InstructionSets([f64; INSTRUCTION_SET_COUNT]),
    SystemStates(JointDistribution),
}

impl LambdaDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            LambdaDistribution::InstructionSets(w) => w.to_vec(),
            LambdaDistribution::SystemStates(d) => d.probabilities().to_vec(),
        }
    }

    pub fn total_variation(&self, other: &LambdaDistribution) -> Result<f64, ModelError> {
        match (self, other) {
            (LambdaDistribution::InstructionSets(p), LambdaDistribution::InstructionSets(q)) => {
                Ok(total_variation(p, q))
            }
            (LambdaDistribution::SystemStates(p), LambdaDistribution::SystemStates(q)) => {
                Ok(p.total_variation(q))
            }
            _ => Err(ModelError::LambdaMismatch),
        }
    }
}

pub trait Model: Send + Sync + fmt::Debug {
    fn kind(&self) -> ModelKind;

    fn domain(&self) -> Domain;

    fn supports(&self, pair: SettingPair) -> bool {
        self.domain().contains(pair)
    }

    /// Draw the trial's hidden state. All randomness of a trial is consumed
    /// here or captured in the returned state.
    fn prepare(&self, rng: &mut Stream) -> HiddenState;

    /// Reveal the outcome at `pair`.
    fn measure(
        &self,
        state: &mut HiddenState,
        pair: SettingPair,
    ) -> Result<JointOutcome, ModelError>;

    fn exact_distribution(&self, pair: SettingPair) -> Result<JointDistribution, ModelError>;

    fn lambda_distribution(&self, pair: SettingPair) -> Result<LambdaDistribution, ModelError>;

    /// Compact description of the hidden data used at `pair`, if any.
    fn hidden_summary(&self, state: &HiddenState, pair: SettingPair) -> Option<String>;

    fn check_domain(&self, pair: SettingPair) -> Result<(), ModelError> {
        if self.supports(pair) {
            Ok(())
        } else {
            Err(ModelError::OutsideDomain {
                model: self.kind(),
                pair,
            })
        }
    }
}

pub fn model_exact_distribution(
    model: &dyn Model,
    pair: SettingPair,
) -> Result<JointDistribution, ModelError> {
    model.exact_distribution(pair)
}

pub fn model_lambda_distribution(
    model: &dyn Model,
    pair: SettingPair,
) -> Result<LambdaDistribution, ModelError> {
    model.lambda_distribution(pair)
}
