//! `S = E(a1,b1) − E(a1,b2) + E(a2,b1) + E(a2,b2)`.
//!
//! CHSH needs two settings per side while the instruction-set model only
//! knows three labels, so label-based evaluation reuses labels: any of the
//! 3⁴ assignments of labels to `(a1, a2, b1, b2)` is allowed.

use crate::domain::{Angle, SettingLabel, SettingPair};
use crate::hvmodels::{mermin_enumerate, mermin_measure, InstructionSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a1: Angle,
    pub a2: Angle,
    pub b1: Angle,
    pub b2: Angle,
}

impl ChshSettings {
    pub fn from_degrees(
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
    ) -> Result<Self, crate::domain::DomainError> {
        Ok(ChshSettings {
            a1: Angle::new(a1)?,
            a2: Angle::new(a2)?,
            b1: Angle::new(b1)?,
            b2: Angle::new(b2)?,
        })
    }

    /// Settings reaching `|S| = 2√2` for the singlet.
    pub fn standard() -> Self {
        Self::from_degrees(0.0, 90.0, 45.0, 135.0).expect("finite")
    }
}

pub fn chsh_value<E: Fn(SettingPair) -> f64>(e: E, s: &ChshSettings) -> f64 {
    let p = SettingPair::new;
    e(p(s.a1, s.b1)) - e(p(s.a1, s.b2)) + e(p(s.a2, s.b1)) + e(p(s.a2, s.b2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelChshSettings {
    pub a1: SettingLabel,
    pub a2: SettingLabel,
    pub b1: SettingLabel,
    pub b2: SettingLabel,
}

impl LabelChshSettings {
    /// All 81 label assignments.
    pub fn all() -> impl Iterator<Item = LabelChshSettings> {
        (0..81usize).map(|k| {
            let l = |shift: u32| SettingLabel::ALL[(k / 3usize.pow(shift)) % 3];
            LabelChshSettings {
                a1: l(0),
                a2: l(1),
                b1: l(2),
                b2: l(3),
            }
        })
    }
}

/// Deterministic product `A·B ∈ {−1, +1}` for one instruction set.
pub fn mermin_correlation(set: &InstructionSet, theta: SettingLabel, phi: SettingLabel) -> i32 {
    mermin_measure(set, theta, phi).product()
}

pub fn mermin_chsh(set: &InstructionSet, s: &LabelChshSettings) -> i32 {
    let e = |t, p| mermin_correlation(set, t, p);
    e(s.a1, s.b1) - e(s.a1, s.b2) + e(s.a2, s.b1) + e(s.a2, s.b2)
}

/// Minimum and maximum of `S` over every instruction set and every label
/// assignment. `S` is linear in the source weights, so these vertices bound
/// every mixture.
pub fn mermin_chsh_extremes() -> (i32, i32) {
    let sets = mermin_enumerate();
    let values = sets
        .iter()
        .flat_map(|set| LabelChshSettings::all().map(move |s| mermin_chsh(set, &s)));
    values.fold((i32::MAX, i32::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{LabelBinding, Outcome};
    use crate::hvmodels::{MerminModel, MerminWeights, Model};
    use crate::quantum::correlation;
    use proptest::prelude::*;

    #[test]
    fn quantum_standard_settings() {
        let s = chsh_value(correlation, &ChshSettings::standard());
        assert!((s + 2.0 * 2f64.sqrt()).abs() < 1e-9, "{s}");
    }

    #[test]
    fn equal_settings_give_minus_two() {
        let s = chsh_value(
            correlation,
            &ChshSettings::from_degrees(30.0, 30.0, 30.0, 30.0).unwrap(),
        );
        assert_eq!(s, -2.0);
    }

    #[test]
    fn uniform_sign_set_gives_minus_two() {
        let set = InstructionSet::from_spin1([Outcome::Up; 3]);
        for s in LabelChshSettings::all() {
            assert_eq!(mermin_chsh(&set, &s), -2);
        }
    }

    #[test]
    fn label_assignments_are_distinct() {
        let all: std::collections::HashSet<_> = LabelChshSettings::all()
            .map(|s| (s.a1, s.a2, s.b1, s.b2))
            .collect();
        assert_eq!(all.len(), 81);
    }

    #[test]
    fn vertices_stay_within_two() {
        let (lo, hi) = mermin_chsh_extremes();
        assert!(lo >= -2 && hi <= 2);
        assert_eq!((lo, hi), (-2, 2));
    }

    #[test]
    fn quantum_search_respects_tsirelson() {
        let mut rng = crate::stream::derive_substream(77, 0);
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let mut a = || rng.next_f64() * 360.0;
            let s = ChshSettings::from_degrees(a(), a(), a(), a()).unwrap();
            let v = chsh_value(correlation, &s).abs();
            assert!(v <= 2.0 * 2f64.sqrt() + 1e-9);
            best = best.max(v);
        }
        assert!(best > 2.0);
    }

    proptest! {
        #[test]
        fn mixtures_stay_within_two(raw in proptest::array::uniform8(0.0f64..1.0), k in 0usize..81) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let mut w = raw.map(|x| x / total);
            let residual = 1.0 - w.iter().sum::<f64>();
            w[0] = (w[0] + residual).max(0.0);
            let binding = LabelBinding::default();
            let model = MerminModel::new(binding, MerminWeights::new(&w).unwrap());
            let labels = LabelChshSettings::all().nth(k).unwrap();
            let e = |t, p| model.exact_distribution(binding.pair(t, p)).unwrap().correlation();
            let s = e(labels.a1, labels.b1) - e(labels.a1, labels.b2) + e(labels.a2, labels.b1) + e(labels.a2, labels.b2);
            prop_assert!(s.abs() <= 2.0 + 1e-12);
        }
    }
}
