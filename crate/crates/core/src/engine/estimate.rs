use serde::Serialize;

use super::{EngineError, RunRecord};
use crate::domain::{JointOutcome, SettingPair};

/// Two-sided 95% standard normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes` out of `n`, clamped to [0, 1].
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs n > 0");
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = WILSON_Z95 * WILSON_Z95;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z95 / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    // The interval always contains p; rounding at p = 0 or 1 must not break that.
    let lo = (center - half).clamp(0.0, 1.0).min(p);
    let hi = (center + half).clamp(0.0, 1.0).max(p);
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    pub counts: [u64; 4],
    pub n: u64,
    pub p_hat: [f64; 4],
    pub ci: [(f64, f64); 4],
}

impl EmpiricalDistribution {
    pub fn from_counts(counts: [u64; 4]) -> Result<Self, EngineError> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(EngineError::NoData);
        }
        Ok(EmpiricalDistribution {
            counts,
            n,
            p_hat: counts.map(|c| c as f64 / n as f64),
            ci: counts.map(|c| wilson_interval(c, n)),
        })
    }

    pub fn get(&self, outcome: JointOutcome) -> f64 {
        self.p_hat[outcome.index()]
    }

    pub fn opposite_count(&self) -> u64 {
        self.counts[2] + self.counts[3]
    }

    pub fn opposite(&self) -> f64 {
        self.opposite_count() as f64 / self.n as f64
    }

    pub fn opposite_ci(&self) -> (f64, f64) {
        wilson_interval(self.opposite_count(), self.n)
    }

    pub fn marginal_a_up(&self) -> f64 {
        (self.counts[0] + self.counts[2]) as f64 / self.n as f64
    }

    pub fn marginal_b_up(&self) -> f64 {
        (self.counts[0] + self.counts[3]) as f64 / self.n as f64
    }
}

/// Counts, frequencies and 95% Wilson intervals over the records matching
/// `filter` (all records when `None`).
pub fn estimate<'a, I>(
    records: I,
    filter: Option<SettingPair>,
) -> Result<EmpiricalDistribution, EngineError>
where
    I: IntoIterator<Item = &'a RunRecord>,
{
    let mut counts = [0u64; 4];
    for r in records {
        if filter.is_none_or(|p| p == r.pair()) {
            counts[r.outcome.index()] += 1;
        }
    }
    EmpiricalDistribution::from_counts(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_counts() {
        let e = EmpiricalDistribution::from_counts([250, 250, 250, 250]).unwrap();
        assert_eq!(e.p_hat, [0.25; 4]);
        for (lo, hi) in e.ci {
            assert!(lo < 0.25 && 0.25 < hi);
        }
    }

    #[test]
    fn zero_cells() {
        let e = EmpiricalDistribution::from_counts([0, 0, 500, 500]).unwrap();
        assert_eq!(e.p_hat, [0.0, 0.0, 0.5, 0.5]);
        assert_eq!(e.ci[0].0, 0.0);
        assert!(e.ci[0].1 > 0.0 && e.ci[0].1 < 0.01);
        assert_eq!(e.opposite(), 1.0);
        assert_eq!(e.opposite_ci().1, 1.0);
    }

    #[test]
    fn no_data() {
        assert!(matches!(
            EmpiricalDistribution::from_counts([0; 4]),
            Err(EngineError::NoData)
        ));
        assert!(matches!(estimate(&[], None), Err(EngineError::NoData)));
    }

    #[test]
    fn wilson_reference_value() {
        // 8 of 10: textbook Wilson 95% interval (0.4902, 0.9433).
        let (lo, hi) = wilson_interval(8, 10);
        assert!((lo - 0.4902).abs() < 1e-4, "{lo}");
        assert!((hi - 0.9433).abs() < 1e-4, "{hi}");
    }

    proptest! {
        #[test]
        fn interval_contains_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as u64;
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }

        #[test]
        fn counts_sum_to_n(c in proptest::array::uniform4(0u64..10_000)) {
            prop_assume!(c.iter().sum::<u64>() > 0);
            let e = EmpiricalDistribution::from_counts(c).unwrap();
            prop_assert_eq!(e.counts.iter().sum::<u64>(), e.n);
            prop_assert!((e.p_hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
