use std::io::Write;

use serde::Serialize;

use super::{write_atomic, CliError, Resolved};
use crate::analysis::{
    certify_mermin_bound, measurement_independence_audit, no_signaling_check, opposite_spin_curve,
    quantum_agreement, write_curve_csv, AuditReport, CheckMode,
};
use crate::domain::{JointOutcome, LabelBinding, SettingLabel, SettingPair};
use crate::engine::{estimate, run_experiment, write_records_jsonl, write_summary_csv};
use crate::hvmodels::{Domain, ModelKind};
use crate::stream::sub_seed;

pub const RECORDS_JSONL: &str = "records.jsonl";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const AUDIT_JSON: &str = "audit.json";
pub const AUDIT_TEXT: &str = "audit.txt";
pub const CURVE_CSV: &str = "curve.csv";

/// 0°, 30°, ..., 360°.
pub fn default_scan_deltas() -> Vec<f64> {
    (0..=12).map(|i| 30.0 * i as f64).collect()
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io(format!("stdout: {e}"))
}

pub fn cmd_simulate(cfg: &Resolved, stdout: &mut dyn Write) -> Result<(), CliError> {
    if cfg.n_trials == 0 {
        return Err(CliError::Config("simulate needs n_trials > 0".into()));
    }
    let model = cfg.model.as_ref();
    let records = run_experiment(model, &cfg.policy, cfg.n_trials, cfg.seed)?;
    let summary = estimate(&records, None)?;

    write_atomic(&cfg.out.join(RECORDS_JSONL), |w| {
        Ok(write_records_jsonl(w, &records)?)
    })?;
    write_atomic(&cfg.out.join(SUMMARY_CSV), |w| {
        Ok(write_summary_csv(w, &summary)?)
    })?;

    let mut pairs: Vec<SettingPair> = cfg.policy.candidate_pairs();
    pairs.dedup();
    writeln!(
        stdout,
        "model {}  trials {}  seed {}",
        model.kind(),
        cfg.n_trials,
        cfg.seed
    )
    .map_err(stdout_err)?;
    writeln!(
        stdout,
        "{:<22} {:<7} {:>9} {:>10} {:>10} {:>10} {:>10}",
        "pair", "outcome", "count", "p_hat", "ci_lo", "ci_hi", "exact"
    )
    .map_err(stdout_err)?;
    for pair in pairs {
        let Ok(e) = estimate(&records, Some(pair)) else {
            continue;
        };
        let exact = model.exact_distribution(pair).ok();
        for o in JointOutcome::ALL {
            let k = o.index();
            let exact = exact.map_or_else(|| "-".to_string(), |d| format!("{:.6}", d.get(o)));
            writeln!(
                stdout,
                "{:<22} {:<7} {:>9} {:>10.6} {:>10.6} {:>10.6} {:>10}",
                pair.to_string(),
                o.to_string(),
                e.counts[k],
                e.p_hat[k],
                e.ci[k].0,
                e.ci[k].1,
                exact
            )
            .map_err(stdout_err)?;
        }
    }
    writeln!(
        stdout,
        "wrote {} and {}",
        cfg.out.join(RECORDS_JSONL).display(),
        cfg.out.join(SUMMARY_CSV).display()
    )
    .map_err(stdout_err)?;
    Ok(())
}

pub fn cmd_certify(stdout: &mut dyn Write, json: bool) -> Result<(), CliError> {
    let cert = certify_mermin_bound();
    if json {
        let text = serde_json::to_string_pretty(&cert).expect("certificate serializes");
        writeln!(stdout, "{text}").map_err(stdout_err)
    } else {
        write!(stdout, "{cert}").map_err(stdout_err)
    }
}

#[derive(Serialize)]
struct AuditFile<'a> {
    model: ModelKind,
    n_trials: u64,
    seed: u64,
    reports: &'a [AuditReport],
}

/// Pairs each audit runs on, chosen from the model's domain.
struct AuditPlan {
    agreement: Vec<SettingPair>,
    signaling: Vec<SettingPair>,
    independence: (SettingPair, SettingPair),
}

fn audit_plan(cfg: &Resolved) -> AuditPlan {
    let pair = |t, p| SettingPair::from_degrees(t, p).expect("finite");
    match cfg.model.domain() {
        Domain::Labeled(b) => {
            let all: Vec<SettingPair> = LabelBinding::label_pairs()
                .map(|(t, p)| b.pair(t, p))
                .collect();
            AuditPlan {
                agreement: all.clone(),
                signaling: all,
                independence: cfg.independence_pairs.unwrap_or((
                    b.pair(SettingLabel::A, SettingLabel::A),
                    b.pair(SettingLabel::A, SettingLabel::B),
                )),
            }
        }
        Domain::Continuous => AuditPlan {
            agreement: (0..12).map(|i| pair(30.0 * i as f64, 0.0)).collect(),
            signaling: vec![
                pair(0.0, 0.0),
                pair(0.0, 90.0),
                pair(0.0, 180.0),
                pair(90.0, 0.0),
                pair(180.0, 0.0),
            ],
            independence: cfg
                .independence_pairs
                .unwrap_or((pair(0.0, 0.0), pair(0.0, 90.0))),
        },
    }
}

/// Runs every audit for the configured model and returns the reports.
pub fn cmd_audit(cfg: &Resolved, stdout: &mut dyn Write) -> Result<Vec<AuditReport>, CliError> {
    if cfg.n_trials == 0 {
        return Err(CliError::Config("audit needs n_trials > 0".into()));
    }
    let model = cfg.model.as_ref();
    let plan = audit_plan(cfg);
    let reports = vec![
        quantum_agreement(model, &plan.agreement, cfg.n_trials, cfg.seed)?,
        no_signaling_check(model, &plan.signaling, CheckMode::Exact)?,
        no_signaling_check(
            model,
            &plan.signaling,
            CheckMode::Empirical {
                n: cfg.n_trials,
                seed: sub_seed(cfg.seed, u64::MAX),
            },
        )?,
        measurement_independence_audit(model, plan.independence.0, plan.independence.1)?,
    ];

    let file = AuditFile {
        model: model.kind(),
        n_trials: cfg.n_trials,
        seed: cfg.seed,
        reports: &reports,
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    write_atomic(&cfg.out.join(AUDIT_JSON), |w| {
        serde_json::to_writer_pretty(&mut *w, &file).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_all(b"\n").map_err(io)
    })?;
    let text: String = reports.iter().map(|r| r.to_text() + "\n").collect();
    write_atomic(&cfg.out.join(AUDIT_TEXT), |w| {
        w.write_all(text.as_bytes()).map_err(io)
    })?;

    write!(stdout, "{text}").map_err(stdout_err)?;
    for r in &reports {
        writeln!(
            stdout,
            "{:<26} checks {:>3}  failing {:>3}  max_metric {:.6e}",
            r.audit,
            r.checks.len(),
            r.failures().count(),
            r.max_metric()
        )
        .map_err(stdout_err)?;
    }
    Ok(reports)
}

pub fn cmd_scan(cfg: &Resolved, deltas: &[f64], stdout: &mut dyn Write) -> Result<(), CliError> {
    if deltas.is_empty() {
        return Err(CliError::Config("scan needs at least one delta".into()));
    }
    if cfg.n_trials == 0 {
        return Err(CliError::Config("scan needs n_trials > 0".into()));
    }
    let rows = opposite_spin_curve(cfg.model.as_ref(), deltas, cfg.n_trials, cfg.seed)?;
    let path = cfg.out.join(CURVE_CSV);
    write_atomic(&path, |w| Ok(write_curve_csv(w, &rows)?))?;
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, &rows)?;
    stdout.write_all(&buf).map_err(stdout_err)?;
    writeln!(stdout, "wrote {}", path.display()).map_err(stdout_err)?;
    Ok(())
}
