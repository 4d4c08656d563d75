use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::domain::{JointOutcome, LabelBinding, SettingLabel};
use crate::hvmodels::{mermin_enumerate, mermin_measure, mermin_opposite_fraction, InstructionSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub set: InstructionSet,
    pub opposite_fraction: Ratio<u32>,
    /// Outcomes at every label pair, row-major by (theta, phi).
    pub outcomes: [[JointOutcome; 3]; 3],
    pub equal_pairs_opposite: bool,
}

/// Exhaustive, exact evaluation of the opposite-spin fraction over all
/// instruction sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MerminCertificate {
    pub rows: Vec<CertificateRow>,
    pub min: Ratio<u32>,
    pub max: Ratio<u32>,
    pub attaining_min: usize,
}

impl MerminCertificate {
    pub fn all_equal_pairs_opposite(&self) -> bool {
        self.rows.iter().all(|r| r.equal_pairs_opposite)
    }
}

pub fn certify_mermin_bound() -> MerminCertificate {
    let rows: Vec<CertificateRow> = mermin_enumerate()
        .into_iter()
        .map(|set| {
            let mut outcomes = [[JointOutcome::UP_UP; 3]; 3];
            for (t, p) in LabelBinding::label_pairs() {
                outcomes[t.index()][p.index()] = mermin_measure(&set, t, p);
            }
            let equal_pairs_opposite = SettingLabel::ALL
                .iter()
                .all(|l| outcomes[l.index()][l.index()].is_opposite());
            CertificateRow {
                set,
                opposite_fraction: mermin_opposite_fraction(&set),
                outcomes,
                equal_pairs_opposite,
            }
        })
        .collect();
    let min = rows
        .iter()
        .map(|r| r.opposite_fraction)
        .min()
        .expect("eight rows");
    let max = rows
        .iter()
        .map(|r| r.opposite_fraction)
        .max()
        .expect("eight rows");
    let attaining_min = rows.iter().filter(|r| r.opposite_fraction == min).count();
    MerminCertificate {
        rows,
        min,
        max,
        attaining_min,
    }
}

#[derive(Serialize)]
struct RowJson {
    index: usize,
    set: String,
    opposite_fraction: String,
    outcomes: Vec<String>,
    equal_pairs_opposite: bool,
}

impl Serialize for MerminCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            rows: Vec<RowJson>,
            min_opposite_fraction: String,
            max_opposite_fraction: String,
            sets_attaining_min: usize,
        }
        Out {
            rows: self
                .rows
                .iter()
                .map(|r| RowJson {
                    index: r.set.index(),
                    set: r.set.to_string(),
                    opposite_fraction: r.opposite_fraction.to_string(),
                    outcomes: r.outcomes.iter().flatten().map(|o| o.to_string()).collect(),
                    equal_pairs_opposite: r.equal_pairs_opposite,
                })
                .collect(),
            min_opposite_fraction: self.min.to_string(),
            max_opposite_fraction: self.max.to_string(),
            sets_attaining_min: self.attaining_min,
        }
        .serialize(s)
    }
}

impl fmt::Display for MerminCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<5}  {:<17}  {:<8}  {:<26}  equal_pairs_opposite",
            "index", "set", "opposite", "outcomes aa ab ac ba .. cc"
        )?;
        for r in &self.rows {
            let outcomes: Vec<String> =
                r.outcomes.iter().flatten().map(|o| o.to_string()).collect();
            writeln!(
                f,
                "{:<5}  {:<17}  {:<8}  {:<26}  {}",
                r.set.index(),
                r.set.to_string(),
                r.opposite_fraction.to_string(),
                outcomes.join(" "),
                if r.equal_pairs_opposite { "yes" } else { "no" }
            )?;
        }
        writeln!(f, "min_opposite_fraction {}", self.min)?;
        writeln!(f, "max_opposite_fraction {}", self.max)?;
        writeln!(f, "sets_attaining_min {}", self.attaining_min)
    }
}
