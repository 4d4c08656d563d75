//! Shared value types: magnet angles, setting labels, spin outcomes and
//! joint outcome distributions.
//!
//! Angles are kept in degrees. Trigonometry goes through [`sin_deg`] and
//! [`cos_deg`], which are exact at quarter turns so that the equal-angle and
//! opposed-angle cases produce hard zeros instead of `6e-17` residues.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for normalization of probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("probability {value} at index {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("unknown setting label {0:?}")]
    UnknownLabel(String),
    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),
}

/// Magnet direction in degrees, normalized into `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(degrees: f64) -> Result<Self, DomainError> {
        normalize_angle(degrees)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }
}

// Normalized angles are finite and never -0.0, so bitwise identity is the
// same relation as numeric equality.
impl Eq for Angle {}

impl Hash for Angle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = f64::deserialize(d)?;
        Angle::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduce `x` degrees into `[0, 360)`.
pub fn normalize_angle(x: f64) -> Result<Angle, DomainError> {
    if !x.is_finite() {
        return Err(DomainError::NonFiniteAngle(x));
    }
    let mut r = x.rem_euclid(360.0);
    // rem_euclid rounds tiny negative inputs up to exactly 360.
    if r >= 360.0 {
        r = 0.0;
    }
    // Fold -0.0 into +0.0.
    Ok(Angle(r + 0.0))
}

/// Cosine of an angle in degrees, exact at multiples of 90°.
pub fn cos_deg(x: f64) -> f64 {
    let r = x.rem_euclid(360.0);
    if r == 0.0 || r == 360.0 {
        1.0
    } else if r == 90.0 || r == 270.0 {
        0.0
    } else if r == 180.0 {
        -1.0
    } else {
        r.to_radians().cos()
    }
}

/// Sine of an angle in degrees, exact at multiples of 90°.
pub fn sin_deg(x: f64) -> f64 {
    let r = x.rem_euclid(360.0);
    if r == 0.0 || r == 180.0 || r == 360.0 {
        0.0
    } else if r == 90.0 {
        1.0
    } else if r == 270.0 {
        -1.0
    } else {
        r.to_radians().sin()
    }
}

/// One of the three discrete magnet settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingLabel {
    A,
    B,
    C,
}

impl SettingLabel {
    pub const ALL: [SettingLabel; 3] = [SettingLabel::A, SettingLabel::B, SettingLabel::C];

    pub fn index(self) -> usize {
        match self {
            SettingLabel::A => 0,
            SettingLabel::B => 1,
            SettingLabel::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SettingLabel::A => "a",
            SettingLabel::B => "b",
            SettingLabel::C => "c",
        })
    }
}

impl FromStr for SettingLabel {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(SettingLabel::A),
            "b" => Ok(SettingLabel::B),
            "c" => Ok(SettingLabel::C),
            _ => Err(DomainError::UnknownLabel(s.to_string())),
        }
    }
}

/// Binds each of the labels a, b, c to a concrete angle.
///
/// Two labels may share an angle. When an angle is resolved back to a label
/// the first label in a, b, c order wins, so equal angles always resolve to
/// equal labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelBinding {
    pub a: Angle,
    pub b: Angle,
    pub c: Angle,
}

impl Default for LabelBinding {
    fn default() -> Self {
        LabelBinding {
            a: Angle(0.0),
            b: Angle(120.0),
            c: Angle(240.0),
        }
    }
}

impl LabelBinding {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, DomainError> {
        Ok(LabelBinding {
            a: Angle::new(a)?,
            b: Angle::new(b)?,
            c: Angle::new(c)?,
        })
    }

    pub fn angle_of(&self, label: SettingLabel) -> Angle {
        match label {
            SettingLabel::A => self.a,
            SettingLabel::B => self.b,
            SettingLabel::C => self.c,
        }
    }

    pub fn label_of(&self, angle: Angle) -> Option<SettingLabel> {
        SettingLabel::ALL
            .into_iter()
            .find(|&l| self.angle_of(l) == angle)
    }

    pub fn pair(&self, theta: SettingLabel, phi: SettingLabel) -> SettingPair {
        SettingPair::new(self.angle_of(theta), self.angle_of(phi))
    }

    /// Resolve both sides of `pair` to labels.
    pub fn labels_of(&self, pair: SettingPair) -> Option<(SettingLabel, SettingLabel)> {
        Some((self.label_of(pair.theta)?, self.label_of(pair.phi)?))
    }

    /// All nine label pairs in row-major (theta-label, phi-label) order.
    pub fn label_pairs() -> impl Iterator<Item = (SettingLabel, SettingLabel)> {
        SettingLabel::ALL
            .into_iter()
            .flat_map(|t| SettingLabel::ALL.into_iter().map(move |p| (t, p)))
    }
}

impl fmt::Display for LabelBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={},b={},c={}", self.a, self.b, self.c)
    }
}

/// Angles of magnet 1 (`theta`) and magnet 2 (`phi`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SettingPair {
    pub theta: Angle,
    pub phi: Angle,
}

impl SettingPair {
    pub fn new(theta: Angle, phi: Angle) -> Self {
        SettingPair { theta, phi }
    }

    pub fn from_degrees(theta: f64, phi: f64) -> Result<Self, DomainError> {
        Ok(SettingPair::new(Angle::new(theta)?, Angle::new(phi)?))
    }

    /// Signed difference `theta - phi` in degrees, in `(-360, 360)`.
    pub fn difference(&self) -> f64 {
        self.theta.0 - self.phi.0
    }

    pub fn is_equal_setting(&self) -> bool {
        self.theta == self.phi
    }

    pub fn is_opposed(&self) -> bool {
        self.difference().abs() == 180.0
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.theta, self.phi)
    }
}

/// `(theta - phi) / 2` in degrees. Only meaningful inside sin² and cos².
pub fn half_difference(pair: SettingPair) -> f64 {
    pair.difference() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Up,
    #[serde(rename = "-")]
    Down,
}

impl Outcome {
    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Up => Outcome::Down,
            Outcome::Down => Outcome::Up,
        }
    }

    /// +1 for up, -1 for down.
    pub fn sign(self) -> i32 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Up => '+',
            Outcome::Down => '-',
        }
    }

    pub fn from_symbol(s: &str) -> Result<Self, DomainError> {
        match s {
            "+" => Ok(Outcome::Up),
            "-" => Ok(Outcome::Down),
            _ => Err(DomainError::UnknownOutcome(s.to_string())),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Pair of results, `a` for particle 1 and `b` for particle 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointOutcome {
    pub a: Outcome,
    pub b: Outcome,
}

impl JointOutcome {
    pub const UP_UP: JointOutcome = JointOutcome::new(Outcome::Up, Outcome::Up);
    pub const DOWN_DOWN: JointOutcome = JointOutcome::new(Outcome::Down, Outcome::Down);
    pub const UP_DOWN: JointOutcome = JointOutcome::new(Outcome::Up, Outcome::Down);
    pub const DOWN_UP: JointOutcome = JointOutcome::new(Outcome::Down, Outcome::Up);

    /// Canonical order: ++, --, +-, -+. Every probability vector, serialized
    /// table and inverse-CDF walk uses it.
    pub const ALL: [JointOutcome; 4] = [
        JointOutcome::UP_UP,
        JointOutcome::DOWN_DOWN,
        JointOutcome::UP_DOWN,
        JointOutcome::DOWN_UP,
    ];

    pub const fn new(a: Outcome, b: Outcome) -> Self {
        JointOutcome { a, b }
    }

    pub fn index(self) -> usize {
        match (self.a, self.b) {
            (Outcome::Up, Outcome::Up) => 0,
            (Outcome::Down, Outcome::Down) => 1,
            (Outcome::Up, Outcome::Down) => 2,
            (Outcome::Down, Outcome::Up) => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn is_opposite(self) -> bool {
        self.a != self.b
    }

    /// Product of the ±1 values.
    pub fn product(self) -> i32 {
        self.a.sign() * self.b.sign()
    }
}

impl fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

impl FromStr for JointOutcome {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Ok(JointOutcome::new(
                Outcome::from_symbol(&a.to_string())?,
                Outcome::from_symbol(&b.to_string())?,
            )),
            _ => Err(DomainError::UnknownOutcome(s.to_string())),
        }
    }
}

/// Validated probability vector over [`JointOutcome::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution([f64; 4]);

impl JointDistribution {
    pub fn new(p: [f64; 4]) -> Result<Self, DomainError> {
        check_probability_vector(&p)?;
        Ok(JointDistribution(p))
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.0
    }

    pub fn get(&self, outcome: JointOutcome) -> f64 {
        self.0[outcome.index()]
    }

    pub fn opposite(&self) -> f64 {
        self.0[2] + self.0[3]
    }

    pub fn same(&self) -> f64 {
        self.0[0] + self.0[1]
    }

    /// Probability that particle 1 is measured up.
    pub fn marginal_a_up(&self) -> f64 {
        self.0[0] + self.0[2]
    }

    /// Probability that particle 2 is measured up.
    pub fn marginal_b_up(&self) -> f64 {
        self.0[0] + self.0[3]
    }

    /// E[AB] with outcomes valued ±1.
    pub fn correlation(&self) -> f64 {
        self.same() - self.opposite()
    }

    pub fn total_variation(&self, other: &JointDistribution) -> f64 {
        total_variation(&self.0, &other.0)
    }
}

/// Checks that every entry lies in [0, 1] and the entries sum to 1.
pub fn check_probability_vector(p: &[f64]) -> Result<(), DomainError> {
    for (index, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(DomainError::ProbabilityOutOfRange { index, value });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DomainError::NotNormalized(sum));
    }
    Ok(())
}

/// Half the L1 distance between two probability vectors of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_angle(0.0).unwrap().degrees(), 0.0);
        assert_eq!(normalize_angle(360.0).unwrap().degrees(), 0.0);
        assert_eq!(normalize_angle(-120.0).unwrap().degrees(), 240.0);
        assert_eq!(
            normalize_angle(-0.0).unwrap().degrees().to_bits(),
            0.0f64.to_bits()
        );
        assert_eq!(normalize_angle(-1e-300).unwrap().degrees(), 0.0);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        assert!(matches!(
            normalize_angle(f64::NAN),
            Err(DomainError::NonFiniteAngle(_))
        ));
        assert!(normalize_angle(f64::INFINITY).is_err());
        assert!(normalize_angle(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn half_difference_examples() {
        let hd = |t, p| half_difference(SettingPair::from_degrees(t, p).unwrap());
        assert_eq!(hd(0.0, 0.0), 0.0);
        assert_eq!(hd(120.0, 0.0), 60.0);
        assert_eq!(hd(180.0, 0.0), 90.0);
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(cos_deg(90.0), 0.0);
        assert_eq!(cos_deg(-90.0), 0.0);
        assert_eq!(cos_deg(180.0), -1.0);
        assert_eq!(sin_deg(-90.0), -1.0);
        assert_eq!(sin_deg(180.0), 0.0);
        assert_eq!(sin_deg(-180.0), 0.0);
    }

    #[test]
    fn outcome_order_is_canonical() {
        let names: Vec<String> = JointOutcome::ALL.iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["++", "--", "+-", "-+"]);
        for (i, o) in JointOutcome::ALL.iter().enumerate() {
            assert_eq!(o.index(), i);
            assert_eq!(o.to_string().parse::<JointOutcome>().unwrap(), *o);
        }
        assert!("+".parse::<JointOutcome>().is_err());
        assert!("+x".parse::<JointOutcome>().is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::new([0.25; 4]).is_ok());
        assert!(matches!(
            JointDistribution::new([0.3, 0.3, 0.3, 0.3]),
            Err(DomainError::NotNormalized(_))
        ));
        assert!(matches!(
            JointDistribution::new([-0.1, 0.1, 0.5, 0.5]),
            Err(DomainError::ProbabilityOutOfRange { index: 0, .. })
        ));
        assert!(JointDistribution::new([f64::NAN, 0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn degenerate_binding_resolves_to_first_label() {
        let b = LabelBinding::new(0.0, 0.0, 90.0).unwrap();
        assert_eq!(b.label_of(Angle::ZERO), Some(SettingLabel::A));
        assert_eq!(b.label_of(Angle::new(45.0).unwrap()), None);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(x in -1e6f64..1e6) {
            let once = normalize_angle(x).unwrap();
            let twice = normalize_angle(once.degrees()).unwrap();
            prop_assert_eq!(once, twice);
            prop_assert!((0.0..360.0).contains(&once.degrees()));
        }

        #[test]
        fn normalize_is_periodic(x in 0.0f64..360.0, k in -1000i32..1000) {
            let shifted = normalize_angle(x + 360.0 * k as f64).unwrap().degrees();
            let base = normalize_angle(x).unwrap().degrees();
            // Adding 360k to a non-integer x rounds; compare on the circle.
            let d = (shifted - base).abs();
            prop_assert!(d < 1e-9 || (360.0 - d) < 1e-9);
        }

        #[test]
        fn integer_degrees_are_exactly_periodic(x in -720i32..720, k in -100i32..100) {
            let a = normalize_angle((x + 360 * k) as f64).unwrap();
            let b = normalize_angle(x as f64).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn pythagorean_identity_on_half_difference(t in -1e4f64..1e4, p in -1e4f64..1e4) {
            let d = half_difference(SettingPair::from_degrees(t, p).unwrap());
            let s = sin_deg(d);
            let c = cos_deg(d);
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-12);
        }
    }
}
