//! Closed-form predictions for the singlet state of two spin-1/2 particles.
//!
//! With `δ = (θ − φ)/2` the singlet expands over the product states
//! `|±,θ⟩|±,φ⟩` as
//!
//! ```text
//! |S⟩ = (1/√2) [ −i sin δ |++⟩ + cos δ |+−⟩ − cos δ |−+⟩ + i sin δ |−−⟩ ]
//! ```
//!
//! which gives `P(++) = P(−−) = ½ sin²δ` and `P(+−) = P(−+) = ½ cos²δ`.
//! The phases are reproduced as written even though no probability depends
//! on them.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::domain::{
    cos_deg, half_difference, sin_deg, JointDistribution, JointOutcome, SettingPair,
};

/// Expansion coefficients of the singlet, indexed in canonical outcome order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletAmplitudes([Complex64; 4]);

impl SingletAmplitudes {
    pub fn amp(&self, outcome: JointOutcome) -> Complex64 {
        self.0[outcome.index()]
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn singlet_amplitudes(pair: SettingPair) -> SingletAmplitudes {
    let delta = half_difference(pair);
    let s = FRAC_1_SQRT_2 * sin_deg(delta);
    let c = FRAC_1_SQRT_2 * cos_deg(delta);
    SingletAmplitudes([
        Complex64::new(0.0, -s), // ++
        Complex64::new(0.0, s),  // --
        Complex64::new(c, 0.0),  // +-
        Complex64::new(-c, 0.0), // -+
    ])
}

pub fn joint_probability(pair: SettingPair, outcome: JointOutcome) -> f64 {
    let delta = half_difference(pair);
    if outcome.is_opposite() {
        0.5 * cos_deg(delta).powi(2)
    } else {
        0.5 * sin_deg(delta).powi(2)
    }
}

/// The probability vector `(½sin²δ, ½sin²δ, ½cos²δ, ½cos²δ)`.
pub fn singlet_probabilities(pair: SettingPair) -> [f64; 4] {
    JointOutcome::ALL.map(|o| joint_probability(pair, o))
}

pub fn quantum_distribution(pair: SettingPair) -> JointDistribution {
    JointDistribution::new(singlet_probabilities(pair))
        .expect("sin² + cos² is normalized to rounding")
}

/// `P(+−) + P(−+) = cos²δ`.
pub fn opposite_spin_probability(pair: SettingPair) -> f64 {
    cos_deg(half_difference(pair)).powi(2)
}

/// `E = P(++) + P(−−) − P(+−) − P(−+)`, which equals `−cos(θ − φ)`.
pub fn correlation(pair: SettingPair) -> f64 {
    let delta = half_difference(pair);
    sin_deg(delta).powi(2) - cos_deg(delta).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Outcome;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn pair(t: f64, p: f64) -> SettingPair {
        SettingPair::from_degrees(t, p).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOL
    }

    #[test]
    fn amplitudes_at_equal_angles() {
        let a = singlet_amplitudes(pair(0.0, 0.0));
        assert_eq!(a.amp(JointOutcome::UP_UP), Complex64::new(0.0, 0.0));
        assert_eq!(a.amp(JointOutcome::DOWN_DOWN), Complex64::new(0.0, 0.0));
        assert_eq!(
            a.amp(JointOutcome::UP_DOWN),
            Complex64::new(FRAC_1_SQRT_2, 0.0)
        );
        assert_eq!(
            a.amp(JointOutcome::DOWN_UP),
            Complex64::new(-FRAC_1_SQRT_2, 0.0)
        );
    }

    #[test]
    fn amplitudes_at_opposed_angles() {
        let a = singlet_amplitudes(pair(180.0, 0.0));
        assert!(close(a.amp(JointOutcome::UP_UP).norm_sqr(), 0.5));
        assert!(close(a.amp(JointOutcome::DOWN_DOWN).norm_sqr(), 0.5));
        assert_eq!(a.amp(JointOutcome::UP_DOWN).norm_sqr(), 0.0);
        assert_eq!(a.amp(JointOutcome::DOWN_UP).norm_sqr(), 0.0);
        // Phase convention: ++ carries -i, -- carries +i.
        assert!(a.amp(JointOutcome::UP_UP).im < 0.0);
        assert!(a.amp(JointOutcome::DOWN_DOWN).im > 0.0);
    }

    #[test]
    fn amplitude_at_120() {
        let a = singlet_amplitudes(pair(120.0, 0.0));
        assert!(close(a.amp(JointOutcome::UP_DOWN).norm_sqr(), 0.125));
    }

    #[test]
    fn joint_probability_examples() {
        assert_eq!(joint_probability(pair(0.0, 0.0), JointOutcome::UP_UP), 0.0);
        assert!(close(
            joint_probability(pair(120.0, 0.0), JointOutcome::UP_DOWN),
            0.125
        ));
        assert!(close(
            joint_probability(pair(180.0, 0.0), JointOutcome::UP_UP),
            0.5
        ));
    }

    #[test]
    fn distribution_examples() {
        let check = |t, p, want: [f64; 4]| {
            let got = quantum_distribution(pair(t, p)).probabilities();
            for k in 0..4 {
                assert!(close(got[k], want[k]), "({t},{p}) {got:?} vs {want:?}");
            }
        };
        check(0.0, 0.0, [0.0, 0.0, 0.5, 0.5]);
        check(90.0, 0.0, [0.25; 4]);
        check(120.0, 0.0, [0.375, 0.375, 0.125, 0.125]);
    }

    #[test]
    fn opposite_spin_examples() {
        assert_eq!(opposite_spin_probability(pair(0.0, 0.0)), 1.0);
        assert!(close(opposite_spin_probability(pair(120.0, 0.0)), 0.25));
        assert!(close(opposite_spin_probability(pair(240.0, 0.0)), 0.25));
        assert!(close(opposite_spin_probability(pair(0.0, 120.0)), 0.25));
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(correlation(pair(0.0, 0.0)), -1.0);
        assert!(close(correlation(pair(90.0, 0.0)), 0.0));
        assert_eq!(correlation(pair(180.0, 0.0)), 1.0);
    }

    proptest! {
        #[test]
        fn amplitudes_are_normalized_and_paired(t in 0.0f64..360.0, p in 0.0f64..360.0) {
            let a = singlet_amplitudes(pair(t, p));
            prop_assert!((a.norm_sqr() - 1.0).abs() < TOL);
            prop_assert!(close(a.amp(JointOutcome::UP_UP).norm(), a.amp(JointOutcome::DOWN_DOWN).norm()));
            prop_assert!(close(a.amp(JointOutcome::UP_DOWN).norm(), a.amp(JointOutcome::DOWN_UP).norm()));
        }

        #[test]
        fn amplitude_squares_match_probabilities(t in 0.0f64..360.0, p in 0.0f64..360.0) {
            let pr = pair(t, p);
            let a = singlet_amplitudes(pr);
            for o in JointOutcome::ALL {
                prop_assert!(close(a.amp(o).norm_sqr(), joint_probability(pr, o)));
            }
        }

        #[test]
        fn distribution_symmetries(t in 0.0f64..360.0, p in 0.0f64..360.0) {
            let pr = pair(t, p);
            let d = quantum_distribution(pr);
            let v = d.probabilities();
            prop_assert_eq!(v[0], v[1]);
            prop_assert_eq!(v[2], v[3]);
            prop_assert!(close(d.marginal_a_up(), 0.5));
            prop_assert!(close(d.marginal_b_up(), 0.5));
            prop_assert!(close(opposite_spin_probability(pr) + d.same(), 1.0));
        }

        #[test]
        fn shift_invariance(t in 0.0f64..360.0, p in 0.0f64..360.0, c in -720.0f64..720.0) {
            let a = quantum_distribution(pair(t, p)).probabilities();
            let b = quantum_distribution(pair(t + c, p + c)).probabilities();
            for k in 0..4 {
                prop_assert!((a[k] - b[k]).abs() < TOL);
            }
        }

        #[test]
        fn correlation_is_minus_cos(t in 0.0f64..360.0, p in 0.0f64..360.0) {
            let pr = pair(t, p);
            prop_assert!((correlation(pr) + (t - p).to_radians().cos()).abs() < 1e-12);
            prop_assert!(close(correlation(pr), quantum_distribution(pr).correlation()));
        }
    }

    #[test]
    fn dense_grid_consistency() {
        for i in 0..360 {
            for j in (0..360).step_by(7) {
                let pr = pair(i as f64 * 0.5 + 0.25, j as f64);
                let a = singlet_amplitudes(pr);
                for o in JointOutcome::ALL {
                    assert!(close(a.amp(o).norm_sqr(), joint_probability(pr, o)));
                }
                let d = quantum_distribution(pr);
                assert!(close(
                    d.get(JointOutcome::new(Outcome::Up, Outcome::Down)),
                    d.get(JointOutcome::DOWN_UP)
                ));
            }
        }
    }
}
