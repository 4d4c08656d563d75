//! Run configuration: one JSON document, optionally overridden by flags.
//!
//! Every key is optional and unknown keys are rejected. Absent keys are not
//! written back out, so serializing a parsed config reproduces the key set
//! of the input.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::domain::{LabelBinding, SettingPair};
use crate::engine::{validate, SettingPolicy};
use crate::hvmodels::{GrandmaModel, MerminModel, MerminWeights, Model, QuantumModel};

pub const DEFAULT_N_TRIALS: u64 = 10_000;
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<BindingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Quantum {},
    Mermin {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Grandma {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<GrandmaModeConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrandmaModeConfig {
    Labeled,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Fixed { theta: f64, phi: f64 },
    UniformLabelPairs {},
    IndependentLabels {},
    DeltaScan { deltas: Vec<f64> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// Two `[theta, phi]` pairs for the measurement-independence audit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence_pairs: Option<[[f64; 2]; 2]>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse `a=0,b=120,c=240`. Labels may come in any order; all three are required.
pub fn parse_binding(text: &str) -> Result<BindingConfig, CliError> {
    let mut vals = [None; 3];
    for part in text.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| {
            CliError::Config(format!("--bind: expected label=angle, got {part:?}"))
        })?;
        let idx = match k.trim() {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            other => return Err(CliError::Config(format!("--bind: unknown label {other:?}"))),
        };
        vals[idx] = Some(parse_f64(v, "--bind")?);
    }
    match vals {
        [Some(a), Some(b), Some(c)] => Ok(BindingConfig { a, b, c }),
        _ => Err(CliError::Config(
            "--bind: all of a, b, c must be given".into(),
        )),
    }
}

/// Parse `fixed:THETA,PHI`, `uniform`, `independent` or `scan:D1,D2,...`.
pub fn parse_policy(text: &str) -> Result<PolicyConfig, CliError> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    let nums = || -> Result<Vec<f64>, CliError> {
        args.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_f64(s, "--policy"))
            .collect()
    };
    match kind {
        "fixed" => match nums()?.as_slice() {
            [theta, phi] => Ok(PolicyConfig::Fixed {
                theta: *theta,
                phi: *phi,
            }),
            _ => Err(CliError::Config("--policy fixed needs THETA,PHI".into())),
        },
        "uniform" | "uniform_label_pairs" => Ok(PolicyConfig::UniformLabelPairs {}),
        "independent" | "independent_labels" => Ok(PolicyConfig::IndependentLabels {}),
        "scan" | "delta_scan" => Ok(PolicyConfig::DeltaScan { deltas: nums()? }),
        other => Err(CliError::Config(format!(
            "--policy: unknown kind {other:?}"
        ))),
    }
}

/// Parse `quantum`, `mermin`, `grandma`, `grandma-labeled` or
/// `grandma-continuous`. Keeps `current`'s parameters if the kind matches.
pub fn parse_model(text: &str, current: Option<&ModelConfig>) -> Result<ModelConfig, CliError> {
    let wanted = match text {
        "quantum" => ModelConfig::Quantum {},
        "mermin" => match current {
            Some(m @ ModelConfig::Mermin { .. }) => m.clone(),
            _ => ModelConfig::Mermin { weights: None },
        },
        "grandma" => match current {
            Some(m @ ModelConfig::Grandma { .. }) => m.clone(),
            _ => ModelConfig::Grandma { mode: None },
        },
        "grandma-labeled" => ModelConfig::Grandma {
            mode: Some(GrandmaModeConfig::Labeled),
        },
        "grandma-continuous" => ModelConfig::Grandma {
            mode: Some(GrandmaModeConfig::Continuous),
        },
        other => {
            return Err(CliError::Config(format!(
                "--model: unknown model {other:?}"
            )))
        }
    };
    Ok(wanted)
}

fn parse_f64(s: &str, flag: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{flag}: not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{flag}: not finite: {s:?}")))
    }
}

impl RunConfig {
    /// Delta list for `scan`: the configured delta-scan policy, or 0°..360°
    /// in 30° steps when no policy is set. The policy is pinned to the
    /// returned list so that `resolve` validates it against the model.
    pub fn scan_deltas(&mut self) -> Result<Vec<f64>, CliError> {
        let deltas = match &self.policy {
            None => super::default_scan_deltas(),
            Some(PolicyConfig::DeltaScan { deltas }) => deltas.clone(),
            Some(_) => return Err(CliError::Config("scan requires a delta_scan policy".into())),
        };
        if deltas.is_empty() {
            return Err(CliError::Config("scan needs at least one delta".into()));
        }
        self.policy = Some(PolicyConfig::DeltaScan {
            deltas: deltas.clone(),
        });
        Ok(deltas)
    }
}

/// Fully validated settings for one command.
#[derive(Debug)]
pub struct Resolved {
    pub model: Box<dyn Model>,
    pub binding: LabelBinding,
    pub policy: SettingPolicy,
    pub n_trials: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub independence_pairs: Option<(SettingPair, SettingPair)>,
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    /// Apply defaults and validate everything, including that the policy only
    /// emits pairs the model accepts. Nothing has run and nothing has been
    /// written when this returns an error.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let binding = match self.binding {
            Some(b) => LabelBinding::new(b.a, b.b, b.c).map_err(config_err)?,
            None => LabelBinding::default(),
        };
        let model: Box<dyn Model> = match self
            .model
            .clone()
            .unwrap_or(ModelConfig::Grandma { mode: None })
        {
            ModelConfig::Quantum {} => Box::new(QuantumModel),
            ModelConfig::Mermin { weights } => {
                let w = match weights {
                    Some(w) => MerminWeights::new(&w).map_err(config_err)?,
                    None => MerminWeights::uniform(),
                };
                Box::new(MerminModel::new(binding, w))
            }
            ModelConfig::Grandma { mode } => match mode.unwrap_or(GrandmaModeConfig::Continuous) {
                GrandmaModeConfig::Labeled => Box::new(GrandmaModel::labeled(binding)),
                GrandmaModeConfig::Continuous => Box::new(GrandmaModel::continuous()),
            },
        };
        let policy = match self
            .policy
            .clone()
            .unwrap_or(PolicyConfig::UniformLabelPairs {})
        {
            PolicyConfig::Fixed { theta, phi } => {
                SettingPolicy::FixedPair(SettingPair::from_degrees(theta, phi).map_err(config_err)?)
            }
            PolicyConfig::UniformLabelPairs {} => SettingPolicy::UniformLabelPairs(binding),
            PolicyConfig::IndependentLabels {} => SettingPolicy::IndependentUniformLabels(binding),
            PolicyConfig::DeltaScan { deltas } => {
                SettingPolicy::delta_scan(&deltas).map_err(config_err)?
            }
        };
        validate(model.as_ref(), &policy).map_err(config_err)?;
        let independence_pairs = match self.audit.as_ref().and_then(|a| a.independence_pairs) {
            Some([[t1, p1], [t2, p2]]) => {
                let p = SettingPair::from_degrees(t1, p1).map_err(config_err)?;
                let q = SettingPair::from_degrees(t2, p2).map_err(config_err)?;
                for pair in [p, q] {
                    model.check_domain(pair).map_err(config_err)?;
                }
                Some((p, q))
            }
            None => None,
        };
        Ok(Resolved {
            model,
            binding,
            policy,
            n_trials: self.n_trials.unwrap_or(DEFAULT_N_TRIALS),
            seed: self.seed.unwrap_or(0),
            out: self
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            independence_pairs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hvmodels::ModelKind;
    use proptest::prelude::*;
    use serde_json::Value;

    /// Same keys, same values; numbers compared as f64.
    fn same(a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => x.as_f64() == y.as_f64(),
            (Value::Object(x), Value::Object(y)) => {
                x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| same(v, w)))
            }
            (Value::Array(x), Value::Array(y)) => {
                x.len() == y.len() && x.iter().zip(y).all(|(v, w)| same(v, w))
            }
            _ => a == b,
        }
    }

    fn round_trips(text: &str) {
        let parsed = RunConfig::from_json(text).unwrap();
        let back: Value = serde_json::from_str(&parsed.to_json()).unwrap();
        let orig: Value = serde_json::from_str(text).unwrap();
        assert!(same(&orig, &back), "{orig} vs {back}");
    }

    #[test]
    fn config_round_trip() {
        round_trips("{}");
        round_trips(
            r#"{"model":{"kind":"grandma","mode":"labeled"},"binding":{"a":0,"b":120,"c":240},"policy":{"kind":"fixed","theta":0,"phi":0},"n_trials":1000,"seed":7,"out":"x"}"#,
        );
        round_trips(
            r#"{"model":{"kind":"mermin","weights":[0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125]},"policy":{"kind":"delta_scan","deltas":[0,30.5]}}"#,
        );
        round_trips(
            r#"{"model":{"kind":"quantum"},"policy":{"kind":"independent_labels"},"audit":{"independence_pairs":[[0,0],[0,90]]}}"#,
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_json(r#"{"modle":{"kind":"quantum"}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model":{"kind":"quantum","x":1}}"#).is_err());
        assert!(
            RunConfig::from_json(r#"{"policy":{"kind":"uniform_label_pairs","x":1}}"#).is_err()
        );
        assert!(RunConfig::from_json(r#"{"model":{"kind":"mermin","weight":[]}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"binding":{"a":0,"b":1,"c":2,"d":3}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model":{"kind":"bohm"}}"#).is_err());
    }

    #[test]
    fn defaults() {
        let r = RunConfig::default().resolve().unwrap();
        assert_eq!(r.model.kind(), ModelKind::Grandma);
        assert_eq!(r.binding, LabelBinding::default());
        assert_eq!(
            r.policy,
            SettingPolicy::UniformLabelPairs(LabelBinding::default())
        );
        assert_eq!(r.n_trials, DEFAULT_N_TRIALS);
        assert_eq!(r.seed, 0);
    }

    #[test]
    fn bad_weights_rejected() {
        let c = RunConfig::from_json(
            r#"{"model":{"kind":"mermin","weights":[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.2]}}"#,
        )
        .unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn domain_mismatch_rejected_at_resolve() {
        let c = RunConfig::from_json(
            r#"{"model":{"kind":"mermin"},"policy":{"kind":"fixed","theta":45,"phi":0}}"#,
        )
        .unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
        let c = RunConfig::from_json(
            r#"{"model":{"kind":"mermin"},"audit":{"independence_pairs":[[0,0],[0,90]]}}"#,
        )
        .unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(
            parse_binding("a=0,b=120,c=240").unwrap(),
            BindingConfig {
                a: 0.0,
                b: 120.0,
                c: 240.0
            }
        );
        assert_eq!(
            parse_binding("c=1,a=2,b=3").unwrap(),
            BindingConfig {
                a: 2.0,
                b: 3.0,
                c: 1.0
            }
        );
        assert!(parse_binding("a=0,b=120").is_err());
        assert!(parse_binding("a=0,b=x,c=1").is_err());
        assert_eq!(
            parse_policy("fixed:0,90").unwrap(),
            PolicyConfig::Fixed {
                theta: 0.0,
                phi: 90.0
            }
        );
        assert_eq!(
            parse_policy("uniform").unwrap(),
            PolicyConfig::UniformLabelPairs {}
        );
        assert_eq!(
            parse_policy("independent").unwrap(),
            PolicyConfig::IndependentLabels {}
        );
        assert_eq!(
            parse_policy("scan:0,30").unwrap(),
            PolicyConfig::DeltaScan {
                deltas: vec![0.0, 30.0]
            }
        );
        assert!(parse_policy("fixed:0").is_err());
        assert!(parse_policy("random").is_err());
        let current = ModelConfig::Mermin {
            weights: Some(vec![0.125; 8]),
        };
        assert_eq!(parse_model("mermin", Some(&current)).unwrap(), current);
        assert_eq!(
            parse_model("mermin", None).unwrap(),
            ModelConfig::Mermin { weights: None }
        );
        assert!(parse_model("bohm", None).is_err());
    }

    proptest! {
        #[test]
        fn generated_configs_round_trip(
            seed in proptest::option::of(any::<u64>()),
            n in proptest::option::of(0u64..1_000_000),
            theta in -720.0f64..720.0,
            phi in -720.0f64..720.0,
            kind in 0usize..4,
        ) {
            let policy = match kind {
                0 => Some(PolicyConfig::Fixed { theta, phi }),
                1 => Some(PolicyConfig::UniformLabelPairs {}),
                2 => Some(PolicyConfig::DeltaScan { deltas: vec![theta, phi] }),
                _ => None,
            };
            let cfg = RunConfig { policy, seed, n_trials: n, ..RunConfig::default() };
            let text = cfg.to_json();
            let back = RunConfig::from_json(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
