//! Trapezoidal fuzzy numbers and the possibility / necessity / credibility
//! measure family over threshold events `{v <= g}` and `{v >= g}`.
//!
//! A trapezoid `(nu1, nu2, nu3, nu4)` has membership rising linearly on
//! `[nu1, nu2]`, equal to one on `[nu2, nu3]` and falling on `[nu3, nu4]`.
//! Equal neighbouring points are allowed, so triangular and crisp numbers are
//! representable. Where a ramp collapses to zero width the measures take the
//! limit of narrowing trapezoids (a right-continuous step for `{v <= g}`).
//!
//! Credibility is the average of possibility and necessity. Chance constraints
//! `Cr{v <= g} >= alpha` and `Cr{v >= g} >= alpha` are turned into crisp
//! linear bounds on `g` by [`crisp_bound`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("fuzzy number points must be finite, got {0:?}")]
    NonFinite([f64; 4]),
    #[error("fuzzy number points must be ordered nu1 <= nu2 <= nu3 <= nu4, got {0:?}")]
    Unordered([f64; 4]),
    #[error("confidence level must lie in [0, 1], got {0}")]
    ConfidenceOutOfRange(f64),
}

/// A trapezoidal fuzzy quantity `(nu1, nu2, nu3, nu4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuzzySpec", into = "FuzzySpec")]
pub struct TrapezoidalFuzzyNumber {
    nu1: f64,
    nu2: f64,
    nu3: f64,
    nu4: f64,
}

/// File representation: either a bare scalar (crisp) or four points.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FuzzySpec {
    Crisp(f64),
    Points([f64; 4]),
}

impl TryFrom<FuzzySpec> for TrapezoidalFuzzyNumber {
    type Error = FuzzyError;

    fn try_from(spec: FuzzySpec) -> Result<Self, Self::Error> {
        match spec {
            FuzzySpec::Crisp(v) => Self::new(v, v, v, v),
            FuzzySpec::Points([a, b, c, d]) => Self::new(a, b, c, d),
        }
    }
}

impl From<TrapezoidalFuzzyNumber> for FuzzySpec {
    fn from(nu: TrapezoidalFuzzyNumber) -> Self {
        if nu.is_crisp() {
            FuzzySpec::Crisp(nu.nu1)
        } else {
            FuzzySpec::Points(nu.points())
        }
    }
}

impl TrapezoidalFuzzyNumber {
    pub fn new(nu1: f64, nu2: f64, nu3: f64, nu4: f64) -> Result<Self, FuzzyError> {
        let pts = [nu1, nu2, nu3, nu4];
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(FuzzyError::NonFinite(pts));
        }
        if !(nu1 <= nu2 && nu2 <= nu3 && nu3 <= nu4) {
            return Err(FuzzyError::Unordered(pts));
        }
        Ok(Self { nu1, nu2, nu3, nu4 })
    }

    pub fn crisp(value: f64) -> Result<Self, FuzzyError> {
        Self::new(value, value, value, value)
    }

    /// Triangular number with peak `mode`.
    pub fn triangular(low: f64, mode: f64, high: f64) -> Result<Self, FuzzyError> {
        Self::new(low, mode, mode, high)
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    pub fn nu3(&self) -> f64 {
        self.nu3
    }

    pub fn nu4(&self) -> f64 {
        self.nu4
    }

    pub fn points(&self) -> [f64; 4] {
        [self.nu1, self.nu2, self.nu3, self.nu4]
    }

    pub fn is_crisp(&self) -> bool {
        self.nu1 == self.nu4
    }

    /// Centre of the plateau `[nu2, nu3]`.
    pub fn plateau_midpoint(&self) -> f64 {
        0.5 * (self.nu2 + self.nu3)
    }

    /// Membership grade at `x`.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.nu1 || x > self.nu4 {
            0.0
        } else if x < self.nu2 {
            (x - self.nu1) / (self.nu2 - self.nu1)
        } else if x <= self.nu3 {
            1.0
        } else {
            (self.nu4 - x) / (self.nu4 - self.nu3)
        }
    }
}

impl fmt::Display for TrapezoidalFuzzyNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.nu1, self.nu2, self.nu3, self.nu4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Possibility,
    Necessity,
    #[default]
    Credibility,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Possibility => "possibility",
            MeasureKind::Necessity => "necessity",
            MeasureKind::Credibility => "credibility",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "possibility" => Ok(MeasureKind::Possibility),
            "necessity" => Ok(MeasureKind::Necessity),
            "credibility" => Ok(MeasureKind::Credibility),
            other => Err(format!(
                "unknown measure '{other}', expected possibility, necessity or credibility"
            )),
        }
    }
}

/// Which threshold event a chance constraint guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintSense {
    /// `{v <= g}`
    #[serde(rename = "le")]
    FuzzyLE,
    /// `{v >= g}`
    #[serde(rename = "ge")]
    FuzzyGE,
}

/// Confidence level `alpha` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(alpha: f64) -> Result<Self, FuzzyError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(FuzzyError::ConfidenceOutOfRange(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ConfidenceLevel {
    type Error = FuzzyError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

impl From<ConfidenceLevel> for f64 {
    fn from(alpha: ConfidenceLevel) -> f64 {
        alpha.0
    }
}

/// Credibility of `{v <= g}`, the five-branch piecewise form.
pub fn credibility_le(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    let [n1, n2, n3, n4] = nu.points();
    if gamma >= n4 {
        1.0
    } else if gamma >= n3 {
        // n3 <= gamma < n4, so the ramp has positive width
        (gamma - 2.0 * n3 + n4) / (2.0 * (n4 - n3))
    } else if gamma >= n2 {
        0.5
    } else if gamma > n1 {
        (gamma - n1) / (2.0 * (n2 - n1))
    } else {
        0.0
    }
}

/// Credibility of `{v >= g}`, the five-branch piecewise form.
pub fn credibility_ge(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    let [n1, n2, n3, n4] = nu.points();
    if gamma <= n1 {
        1.0
    } else if gamma <= n2 {
        // n1 < gamma <= n2
        (2.0 * n2 - n1 - gamma) / (2.0 * (n2 - n1))
    } else if gamma <= n3 {
        0.5
    } else if gamma < n4 {
        (n4 - gamma) / (2.0 * (n4 - n3))
    } else {
        0.0
    }
}

/// `sup { mu(x) : x <= g }`
fn pos_le(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    if gamma >= nu.nu2 {
        1.0
    } else if gamma <= nu.nu1 {
        0.0
    } else {
        (gamma - nu.nu1) / (nu.nu2 - nu.nu1)
    }
}

/// `sup { mu(x) : x > g }`
fn pos_gt(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    if gamma >= nu.nu4 {
        0.0
    } else if gamma < nu.nu3 {
        1.0
    } else {
        (nu.nu4 - gamma) / (nu.nu4 - nu.nu3)
    }
}

/// `sup { mu(x) : x >= g }`
fn pos_ge(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    if gamma <= nu.nu3 {
        1.0
    } else if gamma > nu.nu4 {
        0.0
    } else {
        (nu.nu4 - gamma) / (nu.nu4 - nu.nu3)
    }
}

/// `sup { mu(x) : x < g }`
fn pos_lt(nu: &TrapezoidalFuzzyNumber, gamma: f64) -> f64 {
    if gamma <= nu.nu1 {
        0.0
    } else if gamma >= nu.nu2 {
        1.0
    } else {
        (gamma - nu.nu1) / (nu.nu2 - nu.nu1)
    }
}

pub fn possibility(nu: &TrapezoidalFuzzyNumber, gamma: f64, sense: ConstraintSense) -> f64 {
    match sense {
        ConstraintSense::FuzzyLE => pos_le(nu, gamma),
        ConstraintSense::FuzzyGE => pos_ge(nu, gamma),
    }
}

/// Necessity of an event is one minus the possibility of its complement.
pub fn necessity(nu: &TrapezoidalFuzzyNumber, gamma: f64, sense: ConstraintSense) -> f64 {
    match sense {
        ConstraintSense::FuzzyLE => 1.0 - pos_gt(nu, gamma),
        ConstraintSense::FuzzyGE => 1.0 - pos_lt(nu, gamma),
    }
}

pub fn credibility(nu: &TrapezoidalFuzzyNumber, gamma: f64, sense: ConstraintSense) -> f64 {
    match sense {
        ConstraintSense::FuzzyLE => credibility_le(nu, gamma),
        ConstraintSense::FuzzyGE => credibility_ge(nu, gamma),
    }
}

pub fn measure(
    kind: MeasureKind,
    nu: &TrapezoidalFuzzyNumber,
    gamma: f64,
    sense: ConstraintSense,
) -> f64 {
    match kind {
        MeasureKind::Possibility => possibility(nu, gamma, sense),
        MeasureKind::Necessity => necessity(nu, gamma, sense),
        MeasureKind::Credibility => credibility(nu, gamma, sense),
    }
}

/// Crisp threshold equivalent of a credibility chance constraint.
///
/// For `FuzzyLE` the result `B` satisfies `Cr{v <= g} >= alpha <=> g >= B`;
/// for `FuzzyGE`, `Cr{v >= g} >= alpha <=> g <= B`. The `alpha <= 0.5` branch
/// is inclusive and `alpha = 0` is evaluated literally (`nu1` resp. `nu4`).
pub fn crisp_bound(
    nu: &TrapezoidalFuzzyNumber,
    alpha: ConfidenceLevel,
    sense: ConstraintSense,
) -> f64 {
    let a = alpha.value();
    let [n1, n2, n3, n4] = nu.points();
    // Written as endpoint plus offset so coinciding points reproduce exactly.
    match sense {
        ConstraintSense::FuzzyLE => {
            if a > 0.5 {
                n3 + (2.0 * a - 1.0) * (n4 - n3)
            } else {
                n1 + 2.0 * a * (n2 - n1)
            }
        }
        ConstraintSense::FuzzyGE => {
            if a > 0.5 {
                n2 - (2.0 * a - 1.0) * (n2 - n1)
            } else {
                n4 - 2.0 * a * (n4 - n3)
            }
        }
    }
}

/// Crisp threshold for a chance constraint under any of the three measures.
///
/// Credibility delegates to [`crisp_bound`]. Possibility and necessity use the
/// inverse of their ramps, with `alpha = 0` evaluated by the same linear
/// formula as positive levels.
pub fn chance_bound(
    nu: &TrapezoidalFuzzyNumber,
    alpha: ConfidenceLevel,
    sense: ConstraintSense,
    kind: MeasureKind,
) -> f64 {
    let a = alpha.value();
    let [n1, n2, n3, n4] = nu.points();
    match (kind, sense) {
        (MeasureKind::Credibility, _) => crisp_bound(nu, alpha, sense),
        (MeasureKind::Possibility, ConstraintSense::FuzzyLE) => n1 + a * (n2 - n1),
        (MeasureKind::Possibility, ConstraintSense::FuzzyGE) => n4 - a * (n4 - n3),
        (MeasureKind::Necessity, ConstraintSense::FuzzyLE) => n3 + a * (n4 - n3),
        (MeasureKind::Necessity, ConstraintSense::FuzzyGE) => n2 - a * (n2 - n1),
    }
}

/// How a fuzzy weight is reduced to a single nominal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefuzzMode {
    /// Largest `g` with `Measure{v >= g} >= alpha`.
    #[default]
    Optimistic,
    /// Smallest `g` with `Measure{v <= g} >= alpha`.
    Pessimistic,
}

/// Alpha-optimistic nominal value of `nu` under `kind`.
pub fn defuzzify(nu: &TrapezoidalFuzzyNumber, alpha: ConfidenceLevel, kind: MeasureKind) -> f64 {
    defuzzify_with(nu, alpha, kind, DefuzzMode::Optimistic)
}

pub fn defuzzify_with(
    nu: &TrapezoidalFuzzyNumber,
    alpha: ConfidenceLevel,
    kind: MeasureKind,
    mode: DefuzzMode,
) -> f64 {
    let sense = match mode {
        DefuzzMode::Optimistic => ConstraintSense::FuzzyGE,
        DefuzzMode::Pessimistic => ConstraintSense::FuzzyLE,
    };
    // Convex combinations of the points can round just outside the support.
    chance_bound(nu, alpha, sense, kind).clamp(nu.nu1, nu.nu4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tfn(a: f64, b: f64, c: f64, d: f64) -> TrapezoidalFuzzyNumber {
        TrapezoidalFuzzyNumber::new(a, b, c, d).unwrap()
    }

    fn alpha(a: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(a).unwrap()
    }

    #[test]
    fn credibility_le_branches() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        assert_eq!(credibility_le(&nu, 2.5), 0.5);
        assert_eq!(credibility_le(&nu, 0.0), 0.0);
        assert_eq!(credibility_le(&nu, 1.0), 0.0);
        assert!((credibility_le(&nu, 3.5) - 0.75).abs() < 1e-12);
        assert!((credibility_le(&nu, 1.5) - 0.25).abs() < 1e-12);
        assert_eq!(credibility_le(&nu, 4.0), 1.0);
        assert_eq!(credibility_le(&nu, 9.0), 1.0);
    }

    #[test]
    fn credibility_ge_branches() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        assert!((credibility_ge(&nu, 1.5) - 0.75).abs() < 1e-12);
        assert_eq!(credibility_ge(&nu, 5.0), 0.0);
        assert_eq!(credibility_ge(&nu, 2.5), 0.5);
        assert_eq!(credibility_ge(&nu, 1.0), 1.0);
        assert!((credibility_ge(&nu, 3.5) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn crisp_number_steps() {
        let nu = tfn(2.0, 2.0, 2.0, 2.0);
        assert_eq!(credibility_le(&nu, 2.0), 1.0);
        assert_eq!(credibility_le(&nu, 1.999), 0.0);
        assert_eq!(credibility_ge(&nu, 2.0), 1.0);
        assert_eq!(credibility_ge(&nu, 2.001), 0.0);
    }

    #[test]
    fn degenerate_ramps_jump_by_half() {
        let nu = tfn(1.0, 1.0, 3.0, 3.0);
        assert_eq!(credibility_le(&nu, 0.9), 0.0);
        assert_eq!(credibility_le(&nu, 1.0), 0.5);
        assert_eq!(credibility_le(&nu, 2.9), 0.5);
        assert_eq!(credibility_le(&nu, 3.0), 1.0);
        // averaging identity still holds at the jump points
        for g in [1.0, 3.0] {
            let avg = 0.5
                * (possibility(&nu, g, ConstraintSense::FuzzyLE)
                    + necessity(&nu, g, ConstraintSense::FuzzyLE));
            assert_eq!(avg, credibility_le(&nu, g));
        }
    }

    #[test]
    fn possibility_and_necessity_examples() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        let le = ConstraintSense::FuzzyLE;
        assert_eq!(possibility(&nu, 1.5, le), 0.5);
        assert_eq!(necessity(&nu, 1.5, le), 0.0);
        assert_eq!(credibility(&nu, 1.5, le), 0.25);
        assert_eq!(possibility(&nu, 4.5, le), 1.0);
        assert_eq!(necessity(&nu, 4.5, le), 1.0);
        assert_eq!(possibility(&nu, 2.5, le), 1.0);
        assert_eq!(necessity(&nu, 2.5, le), 0.0);
    }

    #[test]
    fn crisp_bound_examples() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        let le = ConstraintSense::FuzzyLE;
        let ge = ConstraintSense::FuzzyGE;
        assert!((crisp_bound(&nu, alpha(0.75), le) - 3.5).abs() < 1e-12);
        assert!((crisp_bound(&nu, alpha(0.5), le) - 2.0).abs() < 1e-12);
        assert!((crisp_bound(&nu, alpha(0.0), ge) - 4.0).abs() < 1e-12);
        assert!((crisp_bound(&nu, alpha(0.75), ge) - 1.5).abs() < 1e-12);
        assert_eq!(crisp_bound(&nu, alpha(0.0), le), 1.0);
    }

    #[test]
    fn chance_bound_credibility_matches_measure_at_branch_switch() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        for kind in [
            MeasureKind::Possibility,
            MeasureKind::Necessity,
            MeasureKind::Credibility,
        ] {
            for a in [0.2, 0.5, 0.8, 1.0] {
                let b = chance_bound(&nu, alpha(a), ConstraintSense::FuzzyLE, kind);
                assert!(measure(kind, &nu, b, ConstraintSense::FuzzyLE) >= a - 1e-12);
                let b = chance_bound(&nu, alpha(a), ConstraintSense::FuzzyGE, kind);
                assert!(measure(kind, &nu, b, ConstraintSense::FuzzyGE) >= a - 1e-12);
            }
        }
    }

    #[test]
    fn defuzzify_examples() {
        let w = tfn(0.1, 0.2, 0.3, 0.4);
        let cr = MeasureKind::Credibility;
        assert!((defuzzify(&w, alpha(0.5), cr) - 0.3).abs() < 1e-12);
        assert!((defuzzify(&w, alpha(1.0), cr) - 0.1).abs() < 1e-12);
        let crisp = TrapezoidalFuzzyNumber::crisp(0.37).unwrap();
        for kind in [
            MeasureKind::Possibility,
            MeasureKind::Necessity,
            MeasureKind::Credibility,
        ] {
            for mode in [DefuzzMode::Optimistic, DefuzzMode::Pessimistic] {
                for a in [0.0, 0.3, 0.5, 1.0] {
                    assert_eq!(defuzzify_with(&crisp, alpha(a), kind, mode), 0.37);
                }
            }
        }
        assert!((defuzzify_with(&w, alpha(1.0), cr, DefuzzMode::Pessimistic) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(matches!(
            TrapezoidalFuzzyNumber::new(1.0, 3.0, 2.0, 4.0),
            Err(FuzzyError::Unordered(_))
        ));
        assert!(matches!(
            TrapezoidalFuzzyNumber::new(1.0, f64::NAN, 2.0, 4.0),
            Err(FuzzyError::NonFinite(_))
        ));
        assert!(ConfidenceLevel::new(1.01).is_err());
        assert!(ConfidenceLevel::new(-0.01).is_err());
    }

    #[test]
    fn serde_scalar_and_array() {
        let a: TrapezoidalFuzzyNumber = serde_json::from_str("0.5").unwrap();
        assert!(a.is_crisp());
        let b: TrapezoidalFuzzyNumber = serde_json::from_str("[1, 2, 3, 4]").unwrap();
        assert_eq!(b.points(), [1.0, 2.0, 3.0, 4.0]);
        assert!(serde_json::from_str::<TrapezoidalFuzzyNumber>("[4, 3, 2, 1]").is_err());
        assert_eq!(serde_json::to_string(&a).unwrap(), "0.5");
    }

    #[test]
    fn membership_shape() {
        let nu = tfn(1.0, 2.0, 3.0, 4.0);
        assert_eq!(nu.membership(0.5), 0.0);
        assert_eq!(nu.membership(1.5), 0.5);
        assert_eq!(nu.membership(2.5), 1.0);
        assert_eq!(nu.membership(3.75), 0.25);
        assert_eq!(nu.plateau_midpoint(), 2.5);
    }
}
