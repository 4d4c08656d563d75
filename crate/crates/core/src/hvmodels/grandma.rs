//! Pair-assignment model: before any setting is chosen, the source fixes one
//! joint spin state for every possible setting pair. Each pair's state is
//! drawn with probabilities `(½sin²δ, ½sin²δ, ½cos²δ, ½cos²δ)` over
//! `(++, −−, +−, −+)`, independently of every other pair. Measurement reads
//! the entry for the chosen pair.
//!
//! With three labelled settings the table has nine entries and is filled
//! eagerly. With free angles the table is a memo filled on first query from
//! a random stream owned by the trial's hidden state.

use std::collections::HashMap;

use super::{
    Domain, HiddenState, LambdaDistribution, Model, ModelError, ModelKind, SystemSpinState,
};
use crate::domain::{JointDistribution, JointOutcome, LabelBinding, SettingLabel, SettingPair};
use crate::quantum::{quantum_distribution, singlet_probabilities};
use crate::stream::{inverse_cdf, Stream};

/// Draw the pre-existing joint state for one pair.
pub fn grandma_sample_state(pair: SettingPair, rng: &mut Stream) -> SystemSpinState {
    let p = singlet_probabilities(pair);
    JointOutcome::ALL[inverse_cdf(&p, rng.next_f64())]
}

/// True if `state` has non-zero probability at `pair`. Only the equal and
/// opposed-angle cases exclude anything.
fn admissible(pair: SettingPair, state: SystemSpinState) -> bool {
    if pair.is_equal_setting() {
        state.is_opposite()
    } else if pair.is_opposed() {
        !state.is_opposite()
    } else {
        true
    }
}

/// Nine entries indexed by (theta-label, phi-label).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTable {
    binding: LabelBinding,
    entries: [[SystemSpinState; 3]; 3],
}

impl LabeledTable {
    /// Build a fixed table, rejecting entries the model gives probability
    /// zero.
    pub fn new(
        binding: LabelBinding,
        entries: [[SystemSpinState; 3]; 3],
    ) -> Result<Self, ModelError> {
        for (t, p) in LabelBinding::label_pairs() {
            let pair = binding.pair(t, p);
            let state = entries[t.index()][p.index()];
            if !admissible(pair, state) {
                return Err(ModelError::InadmissibleEntry { pair, state });
            }
        }
        Ok(LabeledTable { binding, entries })
    }

    pub fn binding(&self) -> LabelBinding {
        self.binding
    }

    pub fn entry(&self, theta: SettingLabel, phi: SettingLabel) -> SystemSpinState {
        self.entries[theta.index()][phi.index()]
    }

    pub fn lookup(&self, pair: SettingPair) -> Option<SystemSpinState> {
        let (t, p) = self.binding.labels_of(pair)?;
        Some(self.entry(t, p))
    }

    pub fn len(&self) -> usize {
        9
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Lazily populated assignment for free angles. Measuring mutates the memo,
/// so one table must stay with one task.
#[derive(Debug, Clone)]
pub struct LazyTable {
    memo: HashMap<SettingPair, SystemSpinState>,
    rng: Stream,
}

impl LazyTable {
    pub fn new(rng: Stream) -> Self {
        LazyTable {
            memo: HashMap::new(),
            rng,
        }
    }

    pub fn get_or_sample(&mut self, pair: SettingPair) -> SystemSpinState {
        let rng = &mut self.rng;
        *self
            .memo
            .entry(pair)
            .or_insert_with(|| grandma_sample_state(pair, rng))
    }

    pub fn get(&self, pair: SettingPair) -> Option<SystemSpinState> {
        self.memo.get(&pair).copied()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum AssignmentTable {
    Labeled(LabeledTable),
    Lazy(Box<LazyTable>),
}

impl AssignmentTable {
    /// Entry for `pair` if it is already assigned.
    pub fn get(&self, pair: SettingPair) -> Option<SystemSpinState> {
        match self {
            AssignmentTable::Labeled(t) => t.lookup(pair),
            AssignmentTable::Lazy(t) => t.get(pair),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrandmaMode {
    Labeled(LabelBinding),
    Continuous,
}

/// Labelled mode samples all nine entries in row-major label order;
/// continuous mode forks a trial-local stream for the memo.
pub fn grandma_prepare(mode: GrandmaMode, rng: &mut Stream) -> HiddenState {
    let table = match mode {
        GrandmaMode::Labeled(binding) => {
            let mut entries = [[JointOutcome::UP_UP; 3]; 3];
            for (t, p) in LabelBinding::label_pairs() {
                entries[t.index()][p.index()] = grandma_sample_state(binding.pair(t, p), rng);
            }
            AssignmentTable::Labeled(LabeledTable { binding, entries })
        }
        GrandmaMode::Continuous => AssignmentTable::Lazy(Box::new(LazyTable::new(rng.fork()))),
    };
    HiddenState::Grandma(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrandmaModel {
    mode: GrandmaMode,
}

impl GrandmaModel {
    pub fn new(mode: GrandmaMode) -> Self {
        GrandmaModel { mode }
    }

    pub fn labeled(binding: LabelBinding) -> Self {
        Self::new(GrandmaMode::Labeled(binding))
    }

    pub fn continuous() -> Self {
        Self::new(GrandmaMode::Continuous)
    }

    pub fn mode(&self) -> GrandmaMode {
        self.mode
    }
}

impl Model for GrandmaModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Grandma
    }

    fn domain(&self) -> Domain {
        match self.mode {
            GrandmaMode::Labeled(b) => Domain::Labeled(b),
            GrandmaMode::Continuous => Domain::Continuous,
        }
    }

    fn prepare(&self, rng: &mut Stream) -> HiddenState {
        grandma_prepare(self.mode, rng)
    }

    fn measure(
        &self,
        state: &mut HiddenState,
        pair: SettingPair,
    ) -> Result<JointOutcome, ModelError> {
        let outside = ModelError::OutsideDomain {
            model: ModelKind::Grandma,
            pair,
        };
        match state {
            HiddenState::Grandma(AssignmentTable::Labeled(t)) => t.lookup(pair).ok_or(outside),
            HiddenState::Grandma(AssignmentTable::Lazy(t)) => Ok(t.get_or_sample(pair)),
            other => Err(ModelError::WrongState {
                expected: ModelKind::Grandma,
                found: other.kind(),
            }),
        }
    }

    fn exact_distribution(&self, pair: SettingPair) -> Result<JointDistribution, ModelError> {
        self.check_domain(pair)?;
        Ok(quantum_distribution(pair))
    }

    fn lambda_distribution(&self, pair: SettingPair) -> Result<LambdaDistribution, ModelError> {
        self.check_domain(pair)?;
        Ok(LambdaDistribution::SystemStates(quantum_distribution(pair)))
    }

    fn hidden_summary(&self, state: &HiddenState, pair: SettingPair) -> Option<String> {
        match state {
            HiddenState::Grandma(table) => table.get(pair).map(|s| s.to_string()),
            _ => None,
        }
    }
}
