use std::io::Write;

use serde::Serialize;

use super::AnalysisError;
use crate::domain::{Angle, SettingPair};
use crate::engine::{tally, EngineError};
use crate::hvmodels::Model;
use crate::quantum::opposite_spin_probability;
use crate::stream::sub_seed;

pub const CURVE_HEADER: [&str; 6] = [
    "delta_deg",
    "p_opposite_emp",
    "ci_lo",
    "ci_hi",
    "p_opposite_qm",
    "mermin_floor",
];

/// Lower bound on the instruction-set model's opposite-spin probability at
/// unequal labels.
pub const MERMIN_FLOOR: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub delta_deg: f64,
    pub p_opposite_emp: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub p_opposite_qm: f64,
    pub mermin_floor: f64,
}

/// Empirical opposite-spin frequency at `theta = Δ, phi = 0` for each Δ,
/// next to the singlet value `cos²(Δ/2)`.
pub fn opposite_spin_curve(
    model: &dyn Model,
    deltas: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<CurveRow>, AnalysisError> {
    if deltas.is_empty() {
        return Err(AnalysisError::Engine(EngineError::EmptyScan));
    }
    let pairs = deltas
        .iter()
        .map(|&d| Angle::new(d).map(|a| SettingPair::new(a, Angle::ZERO)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| AnalysisError::Engine(EngineError::EmptyScan))?;
    for &pair in &pairs {
        model.check_domain(pair)?;
    }
    pairs
        .iter()
        .zip(deltas)
        .enumerate()
        .map(|(k, (&pair, &delta))| {
            let e = tally(model, pair, n, sub_seed(seed, k as u64))?;
            let (ci_lo, ci_hi) = e.opposite_ci();
            Ok(CurveRow {
                delta_deg: delta,
                p_opposite_emp: e.opposite(),
                ci_lo,
                ci_hi,
                p_opposite_qm: opposite_spin_probability(pair),
                mermin_floor: MERMIN_FLOOR,
            })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(w: W, rows: &[CurveRow]) -> Result<(), EngineError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CURVE_HEADER)?;
    for r in rows {
        csv.write_record(
            [
                r.delta_deg,
                r.p_opposite_emp,
                r.ci_lo,
                r.ci_hi,
                r.p_opposite_qm,
                r.mermin_floor,
            ]
            .map(|x| x.to_string()),
        )?;
    }
    csv.flush()?;
    Ok(())
}
