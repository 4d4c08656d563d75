use std::collections::BTreeMap;

use super::{AnalysisError, AuditReport, Check, Provenance, EXACT_TOL, SIGMA_BAND};
use crate::domain::{Angle, JointOutcome, SettingPair};
use crate::engine::{tally, EmpiricalDistribution};
use crate::hvmodels::Model;
use crate::quantum::quantum_distribution;
use crate::stream::sub_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Empirical { n: u64, seed: u64 },
}

/// `5·sqrt(p(1−p)/n)`, floored at `10/n` so that the band never collapses
/// to zero when `p` is 0 or 1.
pub fn agreement_bound(p: f64, n: u64) -> f64 {
    let n = n as f64;
    (SIGMA_BAND * (p * (1.0 - p) / n).sqrt()).max(10.0 / n)
}

/// Runs the model at every pair and compares each outcome frequency with the
/// singlet probability. One check per pair and outcome.
pub fn quantum_agreement(
    model: &dyn Model,
    pairs: &[SettingPair],
    n: u64,
    seed: u64,
) -> Result<AuditReport, AnalysisError> {
    if pairs.is_empty() {
        return Err(AnalysisError::NoPairs);
    }
    for &pair in pairs {
        model.check_domain(pair)?;
    }
    let mut report = AuditReport::new("quantum_agreement", model.kind());
    for (k, &pair) in pairs.iter().enumerate() {
        let emp = tally(model, pair, n, sub_seed(seed, k as u64))?;
        let exact = quantum_distribution(pair);
        for o in JointOutcome::ALL {
            let p = exact.get(o);
            report.push(Check::new(
                format!("agreement {pair} {o}"),
                (emp.get(o) - p).abs(),
                agreement_bound(p, n),
                Provenance::Empirical,
            ));
        }
    }
    Ok(report)
}

/// Groups pairs by a shared side and checks that the other side's setting
/// does not move this side's marginal.
pub fn no_signaling_check(
    model: &dyn Model,
    pairs: &[SettingPair],
    mode: CheckMode,
) -> Result<AuditReport, AnalysisError> {
    for &pair in pairs {
        model.check_domain(pair)?;
    }
    let by_theta = group(pairs, |p| p.theta);
    let by_phi = group(pairs, |p| p.phi);
    if by_theta.is_empty() || by_phi.is_empty() {
        return Err(AnalysisError::InsufficientPairs);
    }

    let mut marginals: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for (k, &pair) in pairs.iter().enumerate() {
        let m = match mode {
            CheckMode::Exact => {
                let d = model.exact_distribution(pair)?;
                (d.marginal_a_up(), d.marginal_b_up())
            }
            CheckMode::Empirical { n, seed } => {
                let e: EmpiricalDistribution = tally(model, pair, n, sub_seed(seed, k as u64))?;
                (e.marginal_a_up(), e.marginal_b_up())
            }
        };
        marginals.insert(k, m);
    }

    let mut report = AuditReport::new("no_signaling", model.kind());
    let mut push = |side: &str, shared: Angle, members: &[usize], pick: fn(&(f64, f64)) -> f64| {
        let values: Vec<f64> = members.iter().map(|k| pick(&marginals[k])).collect();
        let hi = values.iter().cloned().fold(f64::MIN, f64::max);
        let lo = values.iter().cloned().fold(f64::MAX, f64::min);
        let (threshold, provenance) = match mode {
            CheckMode::Exact => (EXACT_TOL, Provenance::Exact),
            CheckMode::Empirical { n, .. } => {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let nf = n as f64;
                let band = SIGMA_BAND * (mean * (1.0 - mean) * 2.0 / nf).sqrt();
                (band.max(10.0 / nf), Provenance::Empirical)
            }
        };
        report.push(Check::new(
            format!("{side} marginal at {shared}"),
            hi - lo,
            threshold,
            provenance,
        ));
    };
    for (shared, members) in &by_theta {
        push("particle 1", *shared, members, |m| m.0);
    }
    for (shared, members) in &by_phi {
        push("particle 2", *shared, members, |m| m.1);
    }
    Ok(report)
}

/// Indices of pairs grouped by `key`, keeping only groups whose other side
/// takes at least two values.
fn group(pairs: &[SettingPair], key: fn(&SettingPair) -> Angle) -> Vec<(Angle, Vec<usize>)> {
    let mut groups: Vec<(Angle, Vec<usize>)> = Vec::new();
    for (k, p) in pairs.iter().enumerate() {
        match groups.iter_mut().find(|(a, _)| *a == key(p)) {
            Some((_, members)) => members.push(k),
            None => groups.push((key(p), vec![k])),
        }
    }
    groups.retain(|(_, members)| {
        let distinct: std::collections::HashSet<_> = members.iter().map(|&k| pairs[k]).collect();
        distinct.len() >= 2
    });
    groups
}

/// Total-variation distance between the hidden-component laws at two pairs.
/// Zero means the law the model consults does not depend on which of the
/// two setting pairs is chosen.
pub fn measurement_independence_audit(
    model: &dyn Model,
    pair1: SettingPair,
    pair2: SettingPair,
) -> Result<AuditReport, AnalysisError> {
    let l1 = model.lambda_distribution(pair1)?;
    let l2 = model.lambda_distribution(pair2)?;
    let tv = l1.total_variation(&l2)?;
    let mut report = AuditReport::new("measurement_independence", model.kind());
    report.push(Check::new(
        format!("lambda tv {pair1} vs {pair2}"),
        tv,
        EXACT_TOL,
        Provenance::Exact,
    ));
    Ok(report)
}
