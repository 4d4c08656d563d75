use std::fmt;

use num_rational::Ratio;

use super::{Domain, HiddenState, LambdaDistribution, Model, ModelError, ModelKind};
use crate::domain::{
    check_probability_vector, JointDistribution, JointOutcome, LabelBinding, Outcome, SettingLabel,
    SettingPair,
};
use crate::stream::{inverse_cdf, Stream};

pub const INSTRUCTION_SET_COUNT: usize = 8;

/// Pre-assigned spins for both particles at each of the three labels.
///
/// Canonical index: the particle-1 spins at a, b, c read as a 3-bit number
/// with a as the most significant bit and Up = 0. Index 0 is `(+,+,+)`,
/// index 1 is `(+,+,−)`, index 7 is `(−,−,−)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstructionSet {
    spin1: [Outcome; 3],
    spin2: [Outcome; 3],
}

impl InstructionSet {
    pub fn new(spin1: [Outcome; 3], spin2: [Outcome; 3]) -> Result<Self, ModelError> {
        for l in SettingLabel::ALL {
            if spin2[l.index()] != spin1[l.index()].flip() {
                return Err(ModelError::NotAntiCorrelated(l));
            }
        }
        Ok(InstructionSet { spin1, spin2 })
    }

    /// Particle 2 is forced to the opposite of particle 1 at every label.
    pub fn from_spin1(spin1: [Outcome; 3]) -> Self {
        InstructionSet {
            spin1,
            spin2: spin1.map(Outcome::flip),
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= INSTRUCTION_SET_COUNT {
            return None;
        }
        let bit = |shift: usize| {
            if (index >> shift) & 1 == 0 {
                Outcome::Up
            } else {
                Outcome::Down
            }
        };
        Some(Self::from_spin1([bit(2), bit(1), bit(0)]))
    }

    pub fn index(&self) -> usize {
        self.spin1
            .iter()
            .fold(0, |acc, s| (acc << 1) | usize::from(*s == Outcome::Down))
    }

    pub fn spin1(&self, label: SettingLabel) -> Outcome {
        self.spin1[label.index()]
    }

    pub fn spin2(&self, label: SettingLabel) -> Outcome {
        self.spin2[label.index()]
    }
}

impl fmt::Display for InstructionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.spin1;
        let [x, y, z] = self.spin2;
        write!(f, "({a},{b},{c})/({x},{y},{z})")
    }
}

/// All eight instruction sets in canonical order.
pub fn mermin_enumerate() -> Vec<InstructionSet> {
    (0..INSTRUCTION_SET_COUNT)
        .map(|i| InstructionSet::from_index(i).expect("index below 8"))
        .collect()
}

/// Particle 1 reads its own setting, particle 2 reads its own.
pub fn mermin_measure(
    set: &InstructionSet,
    theta: SettingLabel,
    phi: SettingLabel,
) -> JointOutcome {
    JointOutcome::new(set.spin1(theta), set.spin2(phi))
}

/// Fraction of the six unequal label pairs at which `set` yields opposite
/// spins.
pub fn mermin_opposite_fraction(set: &InstructionSet) -> Ratio<u32> {
    let opposite = LabelBinding::label_pairs()
        .filter(|(t, p)| t != p)
        .filter(|&(t, p)| mermin_measure(set, t, p).is_opposite())
        .count() as u32;
    Ratio::new(opposite, 6)
}

/// Source distribution over the eight instruction sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminWeights([f64; INSTRUCTION_SET_COUNT]);

impl MerminWeights {
    pub fn uniform() -> Self {
        MerminWeights([1.0 / INSTRUCTION_SET_COUNT as f64; INSTRUCTION_SET_COUNT])
    }

    pub fn new(weights: &[f64]) -> Result<Self, ModelError> {
        let arr: [f64; INSTRUCTION_SET_COUNT] =
            weights.try_into().map_err(|_| ModelError::WeightCount {
                expected: INSTRUCTION_SET_COUNT,
                found: weights.len(),
            })?;
        check_probability_vector(&arr).map_err(ModelError::InvalidWeights)?;
        Ok(MerminWeights(arr))
    }

    pub fn point_mass(index: usize) -> Self {
        let mut w = [0.0; INSTRUCTION_SET_COUNT];
        w[index] = 1.0;
        MerminWeights(w)
    }

    pub fn as_array(&self) -> [f64; INSTRUCTION_SET_COUNT] {
        self.0
    }
}

/// Draw an instruction set by inverse CDF over the canonical order.
pub fn mermin_prepare(weights: &MerminWeights, rng: &mut Stream) -> HiddenState {
    let index = inverse_cdf(&weights.0, rng.next_f64());
    HiddenState::Mermin(InstructionSet::from_index(index).expect("index below 8"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MerminModel {
    binding: LabelBinding,
    weights: MerminWeights,
}

impl MerminModel {
    pub fn new(binding: LabelBinding, weights: MerminWeights) -> Self {
        MerminModel { binding, weights }
    }

    pub fn uniform(binding: LabelBinding) -> Self {
        Self::new(binding, MerminWeights::uniform())
    }

    pub fn binding(&self) -> LabelBinding {
        self.binding
    }

    pub fn weights(&self) -> MerminWeights {
        self.weights
    }

    fn labels(&self, pair: SettingPair) -> Result<(SettingLabel, SettingLabel), ModelError> {
        self.binding
            .labels_of(pair)
            .ok_or(ModelError::OutsideDomain {
                model: ModelKind::Mermin,
                pair,
            })
    }
}

impl Model for MerminModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Mermin
    }

    fn domain(&self) -> Domain {
        Domain::Labeled(self.binding)
    }

    fn prepare(&self, rng: &mut Stream) -> HiddenState {
        mermin_prepare(&self.weights, rng)
    }

    fn measure(
        &self,
        state: &mut HiddenState,
        pair: SettingPair,
    ) -> Result<JointOutcome, ModelError> {
        let (t, p) = self.labels(pair)?;
        match state {
            HiddenState::Mermin(set) => Ok(mermin_measure(set, t, p)),
            other => Err(ModelError::WrongState {
                expected: ModelKind::Mermin,
                found: other.kind(),
            }),
        }
    }

    /// Weighted average of the deterministic per-set outcomes.
    fn exact_distribution(&self, pair: SettingPair) -> Result<JointDistribution, ModelError> {
        let (t, p) = self.labels(pair)?;
        let mut dist = [0.0; 4];
        for (set, w) in mermin_enumerate().iter().zip(self.weights.0) {
            dist[mermin_measure(set, t, p).index()] += w;
        }
        Ok(JointDistribution::new(dist).expect("weights are validated"))
    }

    fn lambda_distribution(&self, pair: SettingPair) -> Result<LambdaDistribution, ModelError> {
        self.labels(pair)?;
        Ok(LambdaDistribution::InstructionSets(self.weights.0))
    }

    fn hidden_summary(&self, state: &HiddenState, _pair: SettingPair) -> Option<String> {
        match state {
            HiddenState::Mermin(set) => Some(set.index().to_string()),
            _ => None,
        }
    }
}
