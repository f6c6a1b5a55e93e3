//! Pulses, composite sequences and their composition.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{angle_distance, wrap_angle};
use crate::su2::{raw_propagator, Su2Matrix};

const AREA_TOL: f64 = 1e-12;
const PHASE_TOL: f64 = 1e-9;

/// One resonant pulse: nominal area (radians, positive) and phase in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    area: f64,
    phase: f64,
}

impl Pulse {
    pub fn new(area: f64, phase: f64) -> Result<Self> {
        if !area.is_finite() {
            return Err(Error::NonFinite("area"));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite("phase"));
        }
        if area <= 0.0 {
            return Err(Error::NonPositiveArea(area));
        }
        Ok(Self {
            area,
            phase: wrap_angle(phase),
        })
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn propagator(&self, eps: f64) -> Su2Matrix {
        raw_propagator(self.area, self.phase, eps)
    }
}

/// Structural family of a composite sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Palindromic train of nominal π pulses.
    SymmetricX,
    /// `α_{φ₁} π_{φ₂} … π_{φ₂} α_{φ₁}` with palindromic phases.
    SymmetricRot,
    /// A pulse of area θ followed by nominal π pulses.
    AsymTheta,
    /// `α_{φ₁} π_{φ₂} … π_{φ_{N-1}} β_{φ_N}`.
    AsymAlphaBeta,
    /// Anything else; areas are taken as given.
    Custom,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::SymmetricX,
        Family::SymmetricRot,
        Family::AsymTheta,
        Family::AsymAlphaBeta,
        Family::Custom,
    ];

    /// Kebab-case identifier used in data files and on the command line.
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::SymmetricX => "symmetric-x",
            Family::SymmetricRot => "symmetric-rot",
            Family::AsymTheta => "asym-theta",
            Family::AsymAlphaBeta => "asym-alpha-beta",
            Family::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.as_str() == s)
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, Family::SymmetricX | Family::SymmetricRot)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered pulse train (first pulse applied first) with its target rotation angle.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    pulses: Vec<Pulse>,
    target_theta: f64,
    family: Family,
}

impl CompositeSequence {
    /// Validates the family layout. Phases are already canonical in each [`Pulse`].
    pub fn new(pulses: Vec<Pulse>, target_theta: f64, family: Family) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::EmptySequence);
        }
        if !target_theta.is_finite() {
            return Err(Error::NonFinite("target_theta"));
        }
        check_family(&pulses, target_theta, family)?;
        Ok(Self {
            pulses,
            target_theta,
            family,
        })
    }

    /// Builds a sequence from raw `(area, phase)` pairs in radians.
    pub fn from_pairs(pairs: &[(f64, f64)], target_theta: f64, family: Family) -> Result<Self> {
        let pulses = pairs
            .iter()
            .map(|&(a, p)| Pulse::new(a, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pulses, target_theta, family)
    }

    /// Palindromic π-pulse train from its first half; the last entry of
    /// `half_phases` is the centre pulse. Targets θ = π.
    pub fn symmetric_x(half_phases: &[f64]) -> Result<Self> {
        let pairs = mirror(PI, half_phases);
        Self::from_pairs(&pairs, PI, Family::SymmetricX)
    }

    /// `α_{φ₁} π_{φ₂} … π_{φ_m} … π_{φ₂} α_{φ₁}` from `half_phases = [φ₁ … φ_m]`.
    pub fn symmetric_rot(alpha: f64, half_phases: &[f64], theta: f64) -> Result<Self> {
        let pairs = mirror(alpha, half_phases);
        Self::from_pairs(&pairs, theta, Family::SymmetricRot)
    }

    /// `θ_{φ₁} π_{φ₂} … π_{φ_N}`.
    pub fn asym_theta(theta: f64, phases: &[f64]) -> Result<Self> {
        let pairs: Vec<_> = phases
            .iter()
            .enumerate()
            .map(|(k, &p)| (if k == 0 { theta } else { PI }, p))
            .collect();
        Self::from_pairs(&pairs, theta, Family::AsymTheta)
    }

    /// `α_{φ₁} π_{φ₂} … π_{φ_{N-1}} β_{φ_N}`.
    pub fn asym_alpha_beta(alpha: f64, beta: f64, phases: &[f64], theta: f64) -> Result<Self> {
        let n = phases.len();
        let pairs: Vec<_> = phases
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let area = if k == 0 {
                    alpha
                } else if k + 1 == n {
                    beta
                } else {
                    PI
                };
                (area, p)
            })
            .collect();
        Self::from_pairs(&pairs, theta, Family::AsymAlphaBeta)
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn target_theta(&self) -> f64 {
        self.target_theta
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn areas(&self) -> Vec<f64> {
        self.pulses.iter().map(Pulse::area).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.pulses.iter().map(Pulse::phase).collect()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.pulses.iter().map(|p| (p.area, p.phase)).collect()
    }

    /// `Σ |A_k|` in radians.
    pub fn total_area(&self) -> f64 {
        total_area(self)
    }

    /// Same pulses relabelled; the layout is re-validated.
    pub fn with_family(&self, family: Family) -> Result<Self> {
        Self::new(self.pulses.clone(), self.target_theta, family)
    }

    /// Same pulses with a different target angle.
    pub fn with_target(&self, theta: f64) -> Result<Self> {
        Self::new(self.pulses.clone(), theta, self.family)
    }

    /// Pulses concatenated: `self` first, then `other`. The result is `Custom`.
    pub fn concat(&self, other: &CompositeSequence) -> Self {
        let mut pulses = self.pulses.clone();
        pulses.extend_from_slice(&other.pulses);
        Self {
            pulses,
            target_theta: self.target_theta,
            family: Family::Custom,
        }
    }

    /// Maps every phase through `φ → sign·φ + offset`. Negation and a global offset
    /// both preserve all family layouts.
    pub fn map_phases(&self, negate: bool, offset: f64) -> Self {
        let pulses = self
            .pulses
            .iter()
            .map(|p| Pulse {
                area: p.area,
                phase: wrap_angle(if negate { -p.phase } else { p.phase } + offset),
            })
            .collect();
        Self {
            pulses,
            target_theta: self.target_theta,
            family: self.family,
        }
    }

    /// `φ → π - φ`; the composite propagator becomes its complex conjugate, so a
    /// solution for a real target stays a solution.
    pub fn reflected(&self) -> Self {
        self.map_phases(true, PI)
    }

    /// Pulses in reverse order; the result is `Custom` unless the train is palindromic.
    pub fn reversed(&self) -> Self {
        let mut pulses = self.pulses.clone();
        pulses.reverse();
        let family = if check_family(&pulses, self.target_theta, self.family).is_ok() {
            self.family
        } else {
            Family::Custom
        };
        Self {
            pulses,
            target_theta: self.target_theta,
            family,
        }
    }

    /// Largest per-pulse deviation (areas and phases mod 2π); `None` if lengths differ.
    pub fn max_parameter_distance(&self, other: &CompositeSequence) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let d = self
            .pulses
            .iter()
            .zip(&other.pulses)
            .map(|(p, q)| {
                (p.area - q.area)
                    .abs()
                    .max(angle_distance(p.phase, q.phase))
            })
            .fold(0.0, f64::max);
        Some(d)
    }

    /// Parameter distance minimised over reversal and reflection `φ → π - φ`.
    pub fn distance_modulo_symmetry(&self, other: &CompositeSequence) -> Option<f64> {
        let candidates = [
            other.clone(),
            other.reflected(),
            other.reversed(),
            other.reversed().reflected(),
        ];
        candidates
            .iter()
            .filter_map(|c| self.max_parameter_distance(c))
            .reduce(f64::min)
    }
}

pub(crate) fn mirror(outer_area: f64, half_phases: &[f64]) -> Vec<(f64, f64)> {
    let m = half_phases.len();
    if m == 0 {
        return Vec::new();
    }
    let area_of = |k: usize| if k == 0 { outer_area } else { PI };
    let mut pairs: Vec<(f64, f64)> = (0..m).map(|k| (area_of(k), half_phases[k])).collect();
    for k in (0..m - 1).rev() {
        pairs.push((area_of(k), half_phases[k]));
    }
    pairs
}

fn is_pi(area: f64) -> bool {
    (area - PI).abs() <= AREA_TOL * PI
}

fn palindromic(pulses: &[Pulse]) -> bool {
    let n = pulses.len();
    (0..n / 2).all(|k| {
        let (p, q) = (&pulses[k], &pulses[n - 1 - k]);
        (p.area - q.area).abs() <= AREA_TOL * p.area.max(1.0)
            && angle_distance(p.phase, q.phase) <= PHASE_TOL
    })
}

fn check_family(pulses: &[Pulse], theta: f64, family: Family) -> Result<()> {
    let n = pulses.len();
    let fail = |reason| {
        Err(Error::FamilyMismatch {
            family: family.as_str(),
            reason,
        })
    };
    match family {
        Family::SymmetricX => {
            if !pulses.iter().all(|p| is_pi(p.area)) {
                return fail("all areas must equal π");
            }
            if !palindromic(pulses) {
                return fail("phases must be palindromic");
            }
        }
        Family::SymmetricRot => {
            if n >= 2 && !pulses[1..n - 1].iter().all(|p| is_pi(p.area)) {
                return fail("interior pulses must be π pulses");
            }
            if !palindromic(pulses) {
                return fail("outer pulses must match and phases must be palindromic");
            }
        }
        Family::AsymTheta => {
            if (pulses[0].area - theta).abs() > AREA_TOL * theta.abs().max(1.0) {
                return fail("first pulse area must equal the target angle");
            }
            if !pulses[1..].iter().all(|p| is_pi(p.area)) {
                return fail("pulses after the first must be π pulses");
            }
        }
        Family::AsymAlphaBeta => {
            if n < 2 {
                return fail("needs at least two pulses");
            }
            if !pulses[1..n - 1].iter().all(|p| is_pi(p.area)) {
                return fail("interior pulses must be π pulses");
            }
        }
        Family::Custom => {}
    }
    Ok(())
}

/// `Σ |A_k|` in radians.
pub fn total_area(seq: &CompositeSequence) -> f64 {
    seq.pulses.iter().map(|p| p.area.abs()).sum()
}

/// Composite propagator `U_N ⋯ U_2 U_1` at error `eps`; the first pulse acts first.
pub fn compose(seq: &CompositeSequence, eps: f64) -> Result<Su2Matrix> {
    if !eps.is_finite() {
        return Err(Error::NonFinite("eps"));
    }
    if eps <= -1.0 {
        return Err(Error::ErrorOutOfDomain(eps));
    }
    if seq.pulses.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(compose_pairs(&seq.pairs(), eps))
}

/// Unchecked composition of raw `(area, phase)` pairs.
pub(crate) fn compose_pairs(pairs: &[(f64, f64)], eps: f64) -> Su2Matrix {
    pairs.iter().fold(Su2Matrix::identity(), |acc, &(a, p)| {
        raw_propagator(a, p, eps) * acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{pulse_propagator, target_rotation};
    use crate::Complex;

    #[test]
    fn x3_composes_to_x_gate() {
        let seq = CompositeSequence::symmetric_x(&[PI / 6.0, 5.0 * PI / 6.0]).unwrap();
        assert_eq!(seq.len(), 3);
        let u = compose(&seq, 0.0).unwrap();
        assert!(u.max_entry_distance(&target_rotation(PI)) < 1e-15);
    }

    #[test]
    fn single_pulse_matches_propagator() {
        let seq = CompositeSequence::from_pairs(&[(1.1, 0.3)], 0.5, Family::Custom).unwrap();
        for eps in [-0.3, 0.0, 0.17] {
            let u = compose(&seq, eps).unwrap();
            assert_eq!(u, pulse_propagator(1.1, 0.3, eps).unwrap());
        }
    }

    #[test]
    fn three_zero_phase_pi_pulses_give_i() {
        // M = [[0,-i],[-i,0]], M³ = -M, so a = 0 and b = i.
        let seq = CompositeSequence::symmetric_x(&[0.0, 0.0]).unwrap();
        let u = compose(&seq, 0.0).unwrap();
        assert!(u.a.norm() < 1e-15);
        assert!((u.b - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_sequence_is_rejected() {
        assert_eq!(
            CompositeSequence::new(Vec::new(), PI, Family::Custom),
            Err(Error::EmptySequence)
        );
    }

    #[test]
    fn bad_eps_is_rejected() {
        let seq = CompositeSequence::symmetric_x(&[PI / 2.0]).unwrap();
        assert_eq!(compose(&seq, -1.5), Err(Error::ErrorOutOfDomain(-1.5)));
        assert_eq!(compose(&seq, f64::NAN), Err(Error::NonFinite("eps")));
    }

    #[test]
    fn phases_are_canonical() {
        let p = Pulse::new(PI, -PI / 2.0).unwrap();
        assert!((p.phase() - 1.5 * PI).abs() < 1e-15);
        let q = Pulse::new(PI, 4.0 * PI).unwrap();
        assert_eq!(q.phase(), 0.0);
    }

    #[test]
    fn family_layouts_are_checked() {
        let bad = CompositeSequence::from_pairs(
            &[(PI, 0.1), (PI, 0.2), (PI, 0.3)],
            PI,
            Family::SymmetricX,
        );
        assert!(matches!(bad, Err(Error::FamilyMismatch { .. })));
        let bad_rot = CompositeSequence::from_pairs(
            &[(0.5, 0.1), (PI, 0.2), (0.6, 0.1)],
            PI,
            Family::SymmetricRot,
        );
        assert!(bad_rot.is_err());
        let ok = CompositeSequence::symmetric_rot(0.5, &[0.1, 0.2, 0.3], PI / 2.0).unwrap();
        assert_eq!(ok.areas(), [0.5, PI, PI, PI, 0.5]);
        let theta = CompositeSequence::asym_theta(PI / 2.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(theta.areas(), [PI / 2.0, PI, PI]);
        let ab = CompositeSequence::asym_alpha_beta(0.7, 1.3, &[0.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(ab.areas(), [0.7, PI, PI, 1.3]);
    }

    #[test]
    fn total_area_of_nine_pi_pulses() {
        let seq = CompositeSequence::symmetric_x(&[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!((seq.total_area() - 9.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn reflection_conjugates_the_propagator() {
        let seq = CompositeSequence::asym_alpha_beta(0.7, 1.3, &[0.2, 1.0, 2.0, 3.0], 1.0).unwrap();
        for eps in [-0.2, 0.0, 0.3] {
            let u = compose(&seq, eps).unwrap();
            let v = compose(&seq.reflected(), eps).unwrap();
            assert!((v.a - u.a.conj()).norm() < 1e-14);
            assert!((v.b - u.b.conj()).norm() < 1e-14);
        }
    }
}
