//! Record and summary file formats.
//!
//! Records are JSON Lines with the fields `trial, theta_deg, phi_deg, a, b,
//! model, hidden` in that order. Angles use the shortest representation
//! that round-trips. Summaries are CSV with header
//! `outcome,count,p_hat,ci_lo,ci_hi`, one row per outcome in canonical order.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EmpiricalDistribution, EngineError, RunRecord};
use crate::domain::{Angle, JointOutcome, Outcome};
use crate::hvmodels::ModelKind;

pub const SUMMARY_HEADER: [&str; 5] = ["outcome", "count", "p_hat", "ci_lo", "ci_hi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordLine {
    pub trial: u64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub a: Outcome,
    pub b: Outcome,
    pub model: ModelKind,
    pub hidden: Option<String>,
}

impl From<&RunRecord> for RecordLine {
    fn from(r: &RunRecord) -> Self {
        RecordLine {
            trial: r.trial_index,
            theta_deg: r.theta.degrees(),
            phi_deg: r.phi.degrees(),
            a: r.outcome.a,
            b: r.outcome.b,
            model: r.model_id,
            hidden: r.hidden_summary.clone(),
        }
    }
}

impl RecordLine {
    pub fn into_record(self) -> Result<RunRecord, String> {
        Ok(RunRecord {
            trial_index: self.trial,
            theta: Angle::new(self.theta_deg).map_err(|e| e.to_string())?,
            phi: Angle::new(self.phi_deg).map_err(|e| e.to_string())?,
            outcome: JointOutcome::new(self.a, self.b),
            model_id: self.model,
            hidden_summary: self.hidden,
        })
    }
}

pub fn write_records_jsonl<W: Write>(mut w: W, records: &[RunRecord]) -> Result<(), EngineError> {
    for r in records {
        serde_json::to_writer(&mut w, &RecordLine::from(r)).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a JSONL record file; trial indices must strictly increase.
pub fn read_records_jsonl<R: BufRead>(r: R) -> Result<Vec<RunRecord>, EngineError> {
    let mut out: Vec<RunRecord> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| EngineError::BadRecord {
            line: i + 1,
            message,
        };
        let parsed: RecordLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let record = parsed.into_record().map_err(bad)?;
        if let Some(prev) = out.last() {
            if record.trial_index <= prev.trial_index {
                return Err(bad("trial index not increasing".into()));
            }
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_summary_csv<W: Write>(w: W, e: &EmpiricalDistribution) -> Result<(), EngineError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(SUMMARY_HEADER)?;
    for (k, o) in JointOutcome::ALL.iter().enumerate() {
        csv.write_record([
            o.to_string(),
            e.counts[k].to_string(),
            e.p_hat[k].to_string(),
            e.ci[k].0.to_string(),
            e.ci[k].1.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::LabelBinding;
    use crate::engine::{run_experiment, SettingPolicy};
    use crate::hvmodels::MerminModel;
    use proptest::prelude::*;

    #[test]
    fn line_format_is_exact() {
        let r = RunRecord {
            trial_index: 3,
            theta: Angle::new(120.0).unwrap(),
            phi: Angle::new(0.1).unwrap(),
            outcome: JointOutcome::UP_DOWN,
            model_id: ModelKind::Grandma,
            hidden_summary: Some("+-".into()),
        };
        let mut buf = Vec::new();
        write_records_jsonl(&mut buf, std::slice::from_ref(&r)).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"trial\":3,\"theta_deg\":120.0,\"phi_deg\":0.1,\"a\":\"+\",\"b\":\"-\",\"model\":\"grandma\",\"hidden\":\"+-\"}\n"
        );
        let mut q = r.clone();
        q.hidden_summary = None;
        let mut buf2 = Vec::new();
        write_records_jsonl(&mut buf2, &[q]).unwrap();
        assert!(String::from_utf8(buf2)
            .unwrap()
            .ends_with("\"hidden\":null}\n"));
        assert_eq!(read_records_jsonl(&buf[..]).unwrap(), vec![r]);
    }

    #[test]
    fn read_rejects_bad_lines() {
        let bad = b"{\"trial\":0,\"theta_deg\":0.0,\"phi_deg\":0.0,\"a\":\"x\",\"b\":\"-\",\"model\":\"quantum\",\"hidden\":null}\n";
        assert!(matches!(
            read_records_jsonl(&bad[..]),
            Err(EngineError::BadRecord { line: 1, .. })
        ));
        let extra = b"{\"trial\":0,\"theta_deg\":0.0,\"phi_deg\":0.0,\"a\":\"+\",\"b\":\"-\",\"model\":\"quantum\",\"hidden\":null,\"x\":1}\n";
        assert!(read_records_jsonl(&extra[..]).is_err());
    }

    #[test]
    fn run_round_trips_through_jsonl() {
        let b = LabelBinding::default();
        let r = run_experiment(
            &MerminModel::uniform(b),
            &SettingPolicy::UniformLabelPairs(b),
            500,
            4,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_records_jsonl(&mut buf, &r).unwrap();
        assert_eq!(buf.iter().filter(|&&c| c == b'\n').count(), 500);
        assert_eq!(read_records_jsonl(&buf[..]).unwrap(), r);
    }

    #[test]
    fn summary_csv_layout() {
        let e = EmpiricalDistribution::from_counts([0, 0, 500, 500]).unwrap();
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &e).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "outcome,count,p_hat,ci_lo,ci_hi");
        assert!(lines[1].starts_with("++,0,0,0,"));
        assert!(lines[3].starts_with("+-,500,0.5,"));
        assert_eq!(lines.len(), 5);
    }

    proptest! {
        #[test]
        fn angles_round_trip_bit_exact(t in 0.0f64..360.0, p in 0.0f64..360.0, i in 0u64..u64::MAX) {
            let r = RunRecord {
                trial_index: i,
                theta: Angle::new(t).unwrap(),
                phi: Angle::new(p).unwrap(),
                outcome: JointOutcome::DOWN_UP,
                model_id: ModelKind::Quantum,
                hidden_summary: None,
            };
            let mut buf = Vec::new();
            write_records_jsonl(&mut buf, std::slice::from_ref(&r)).unwrap();
            let back = read_records_jsonl(&buf[..]).unwrap();
            prop_assert_eq!(back[0].theta.degrees().to_bits(), t.to_bits());
            prop_assert_eq!(&back[0], &r);
        }
    }
}
