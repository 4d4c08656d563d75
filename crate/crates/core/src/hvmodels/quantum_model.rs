use std::collections::HashMap;

use super::{Domain, HiddenState, LambdaDistribution, Model, ModelError, ModelKind};
use crate::domain::{JointDistribution, JointOutcome, SettingPair};
use crate::quantum::{quantum_distribution, singlet_probabilities};
use crate::stream::{inverse_cdf, Stream};

/// Outcomes drawn so far in one trial, plus the stream for further draws.
#[derive(Debug, Clone)]
pub struct QuantumState {
    drawn: HashMap<SettingPair, JointOutcome>,
    rng: Stream,
}

/// The singlet oracle behind the model contract.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuantumModel;

impl Model for QuantumModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Quantum
    }

    fn domain(&self) -> Domain {
        Domain::Continuous
    }

    fn prepare(&self, rng: &mut Stream) -> HiddenState {
        HiddenState::Quantum(Box::new(QuantumState {
            drawn: HashMap::new(),
            rng: rng.fork(),
        }))
    }

    fn measure(
        &self,
        state: &mut HiddenState,
        pair: SettingPair,
    ) -> Result<JointOutcome, ModelError> {
        match state {
            HiddenState::Quantum(q) => {
                let QuantumState { drawn, rng } = q.as_mut();
                Ok(*drawn.entry(pair).or_insert_with(|| {
                    JointOutcome::ALL[inverse_cdf(&singlet_probabilities(pair), rng.next_f64())]
                }))
            }
            other => Err(ModelError::WrongState {
                expected: ModelKind::Quantum,
                found: other.kind(),
            }),
        }
    }

    fn exact_distribution(&self, pair: SettingPair) -> Result<JointDistribution, ModelError> {
        Ok(quantum_distribution(pair))
    }

    fn lambda_distribution(&self, pair: SettingPair) -> Result<LambdaDistribution, ModelError> {
        Ok(LambdaDistribution::SystemStates(quantum_distribution(pair)))
    }

    fn hidden_summary(&self, _state: &HiddenState, _pair: SettingPair) -> Option<String> {
        None
    }
}
