//! Seeded Monte Carlo runner.
//!
//! Each trial draws its settings and hidden state from
//! [`derive_substream`]`(seed, trial_index)`, in that order, so a run is a
//! pure function of the model, the policy, `n_trials` and the seed. Trials
//! are generated in parallel and collected in trial order.

mod estimate;
mod records;

use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{Angle, LabelBinding, SettingLabel, SettingPair};
use crate::hvmodels::{Model, ModelError, ModelKind};
use crate::stream::{derive_substream, Stream};

pub use crate::domain::JointOutcome;
pub use estimate::{estimate, wilson_interval, EmpiricalDistribution, WILSON_Z95};
pub use records::{
    read_records_jsonl, write_records_jsonl, write_summary_csv, RecordLine, SUMMARY_HEADER,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("delta scan needs at least one angle difference")]
    EmptyScan,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no records left after filtering")]
    NoData,
    #[error("malformed record on line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Who chooses the magnet angles, trial by trial.
#[derive(Debug, Clone, PartialEq)]
pub enum SettingPolicy {
    FixedPair(SettingPair),
    /// One of the nine label pairs, uniformly, from a single draw.
    UniformLabelPairs(LabelBinding),
    /// Each side draws its own label with its own draw (theta first).
    IndependentUniformLabels(LabelBinding),
    /// `theta = deltas[i % len]`, `phi = 0`. Consumes no randomness.
    DeltaScan(Vec<Angle>),
}

impl SettingPolicy {
    pub fn delta_scan(deltas: &[f64]) -> Result<Self, EngineError> {
        if deltas.is_empty() {
            return Err(EngineError::EmptyScan);
        }
        let angles = deltas
            .iter()
            .map(|&d| Angle::new(d))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| EngineError::EmptyScan)?;
        Ok(SettingPolicy::DeltaScan(angles))
    }

    /// Every pair this policy can emit.
    pub fn candidate_pairs(&self) -> Vec<SettingPair> {
        match self {
            SettingPolicy::FixedPair(p) => vec![*p],
            SettingPolicy::UniformLabelPairs(b) | SettingPolicy::IndependentUniformLabels(b) => {
                LabelBinding::label_pairs()
                    .map(|(t, p)| b.pair(t, p))
                    .collect()
            }
            SettingPolicy::DeltaScan(deltas) => deltas
                .iter()
                .map(|&d| SettingPair::new(d, Angle::ZERO))
                .collect(),
        }
    }

    pub fn draw(&self, trial_index: u64, rng: &mut Stream) -> SettingPair {
        match self {
            SettingPolicy::FixedPair(p) => *p,
            SettingPolicy::UniformLabelPairs(b) => {
                let k = rng.next_index(9);
                b.pair(SettingLabel::ALL[k / 3], SettingLabel::ALL[k % 3])
            }
            SettingPolicy::IndependentUniformLabels(b) => {
                let t = SettingLabel::ALL[rng.next_index(3)];
                let p = SettingLabel::ALL[rng.next_index(3)];
                b.pair(t, p)
            }
            SettingPolicy::DeltaScan(deltas) => {
                let d = deltas[(trial_index % deltas.len() as u64) as usize];
                SettingPair::new(d, Angle::ZERO)
            }
        }
    }
}

/// One run of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub trial_index: u64,
    pub theta: Angle,
    pub phi: Angle,
    pub outcome: JointOutcome,
    pub model_id: ModelKind,
    pub hidden_summary: Option<String>,
}

impl RunRecord {
    pub fn pair(&self) -> SettingPair {
        SettingPair::new(self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub record_hidden: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            record_hidden: true,
        }
    }
}

/// Rejects policies that can emit a pair outside the model's domain.
pub fn validate(model: &dyn Model, policy: &SettingPolicy) -> Result<(), EngineError> {
    for pair in policy.candidate_pairs() {
        model.check_domain(pair)?;
    }
    Ok(())
}

/// Execute trial `trial_index` in isolation.
pub fn run_trial(
    model: &dyn Model,
    policy: &SettingPolicy,
    seed: u64,
    trial_index: u64,
    options: RunOptions,
) -> Result<RunRecord, EngineError> {
    let mut rng = derive_substream(seed, trial_index);
    let pair = policy.draw(trial_index, &mut rng);
    let mut state = model.prepare(&mut rng);
    let outcome = model.measure(&mut state, pair)?;
    let hidden_summary = if options.record_hidden {
        model.hidden_summary(&state, pair)
    } else {
        None
    };
    Ok(RunRecord {
        trial_index,
        theta: pair.theta,
        phi: pair.phi,
        outcome,
        model_id: model.kind(),
        hidden_summary,
    })
}

pub fn run_experiment(
    model: &dyn Model,
    policy: &SettingPolicy,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<RunRecord>, EngineError> {
    run_experiment_with(model, policy, n_trials, seed, RunOptions::default())
}

pub fn run_experiment_with(
    model: &dyn Model,
    policy: &SettingPolicy,
    n_trials: u64,
    seed: u64,
    options: RunOptions,
) -> Result<Vec<RunRecord>, EngineError> {
    validate(model, policy)?;
    (0..n_trials)
        .into_par_iter()
        .map(|i| run_trial(model, policy, seed, i, options))
        .collect()
}

/// Outcome counts at a fixed pair without materializing records.
pub fn tally(
    model: &dyn Model,
    pair: SettingPair,
    n_trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution, EngineError> {
    let policy = SettingPolicy::FixedPair(pair);
    validate(model, &policy)?;
    let options = RunOptions {
        record_hidden: false,
    };
    let counts = (0..n_trials)
        .into_par_iter()
        .map(|i| run_trial(model, &policy, seed, i, options).map(|r| r.outcome.index()))
        .try_fold(
            || [0u64; 4],
            |mut acc, k| {
                acc[k?] += 1;
                Ok::<_, EngineError>(acc)
            },
        )
        .try_reduce(
            || [0u64; 4],
            |mut a, b| {
                for k in 0..4 {
                    a[k] += b[k];
                }
                Ok(a)
            },
        )?;
    EmpiricalDistribution::from_counts(counts)
}
