use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::hvmodels::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Empirical,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::Empirical => "empirical",
        })
    }
}

/// One metric compared against its threshold. `pass` is `metric <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        metric: f64,
        threshold: f64,
        provenance: Provenance,
    ) -> Self {
        debug_assert!(metric.is_finite() && threshold.is_finite());
        Check {
            name: name.into(),
            metric,
            threshold,
            pass: metric <= threshold,
            provenance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub audit: String,
    pub model: ModelKind,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn new(audit: impl Into<String>, model: ModelKind) -> Self {
        AuditReport {
            audit: audit.into(),
            model,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Largest metric over all checks.
    pub fn max_metric(&self) -> f64 {
        self.checks.iter().map(|c| c.metric).fold(0.0, f64::max)
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .chain(std::iter::once(5))
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "# {} [{}]", self.audit, self.model);
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>14}  {:<4}  provenance",
            "check", "metric", "threshold", "pass"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.6e}  {:>14.6e}  {:<4}  {}",
                c.name,
                c.metric,
                c.threshold,
                if c.pass { "yes" } else { "no" },
                c.provenance
            );
        }
        out
    }
}
