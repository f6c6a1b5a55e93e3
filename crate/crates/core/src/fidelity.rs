//! Fidelity metrics, profiles over `ε` and high-fidelity ranges.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt};
use crate::sequence::{compose, compose_pairs, CompositeSequence};
use crate::su2::target_rotation;

/// Infidelity level used when no threshold is given.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// Grid step of the outward scan in [`high_fidelity_range`].
pub const RANGE_SCAN_STEP: f64 = 1e-4;

/// Bisection stops once the bracket is narrower than this.
const RANGE_BISECT_TOL: f64 = 1e-12;

/// Largest `|ε|` the range scan explores on the positive side.
const RANGE_SCAN_LIMIT: f64 = 1.0;

/// `1 - sqrt(¼ Σ|U_jk - R_jk|²)`.
pub fn frobenius_fidelity(seq: &CompositeSequence, theta: f64, eps: f64) -> Result<f64> {
    Ok(1.0 - frobenius_infidelity(seq, theta, eps)?)
}

/// Frobenius distance to the target, computed directly rather than as `1 - F`
/// so that values near zero keep their relative precision.
pub fn frobenius_infidelity(seq: &CompositeSequence, theta: f64, eps: f64) -> Result<f64> {
    let u = compose(seq, eps)?;
    Ok(u.frobenius_distance(&target_rotation(theta)))
}

/// `Re ½ Tr(U R†)`.
///
/// Only the real part is kept. For the real targets used here it is the whole
/// trace whenever `U` is close to the target, and it reproduces the closed forms
/// for single pulses and X gates.
pub fn trace_fidelity(seq: &CompositeSequence, theta: f64, eps: f64) -> Result<f64> {
    let u = compose(seq, eps)?;
    Ok(u.half_trace_with_adjoint(&target_rotation(theta)).re)
}

pub(crate) fn frobenius_infidelity_pairs(pairs: &[(f64, f64)], theta: f64, eps: f64) -> f64 {
    compose_pairs(pairs, eps).frobenius_distance(&target_rotation(theta))
}

/// Frobenius infidelity of a single π pulse against the X gate.
pub fn single_pulse_infidelity(eps: f64) -> f64 {
    sqrt(2.0) * sin(PI * eps / 4.0).abs()
}

/// Trace fidelity of a single π pulse against the X gate.
pub fn single_pulse_trace_fidelity(eps: f64) -> f64 {
    cos(PI * eps / 2.0)
}

/// Closed-form Frobenius infidelity of the three-pulse X gate.
pub fn x3_infidelity(eps: f64) -> f64 {
    let s = sin(PI * eps / 4.0);
    let c = cos(PI * eps / 4.0);
    sqrt(2.0 * (1.0 + 2.0 * c * c)) * s * s
}

/// Closed-form Frobenius infidelity shared by all second-order X gates.
pub fn x5_infidelity(eps: f64) -> f64 {
    let c = cos(PI * eps / 2.0);
    let s = sin(PI * eps / 4.0).abs();
    sqrt(8.0 + 9.0 * c + 3.0 * c * c) * s * s * s
}

/// Both fidelities sampled on a uniform `ε` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityProfile {
    pub eps_grid: Vec<f64>,
    pub frobenius: Vec<f64>,
    pub trace: Vec<f64>,
}

impl FidelityProfile {
    pub fn len(&self) -> usize {
        self.eps_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_grid.is_empty()
    }

    /// `(ε, F, F_T)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.eps_grid
            .iter()
            .zip(&self.frobenius)
            .zip(&self.trace)
            .map(|((&e, &f), &t)| (e, f, t))
    }
}

/// Evaluates both metrics at `count` evenly spaced points of `[eps_min, eps_max]`.
pub fn profile(
    seq: &CompositeSequence,
    theta: f64,
    eps_min: f64,
    eps_max: f64,
    count: usize,
) -> Result<FidelityProfile> {
    if !(eps_min.is_finite() && eps_max.is_finite()) {
        return Err(Error::NonFinite("eps bounds"));
    }
    if !(eps_min < eps_max) {
        return Err(Error::OutOfRange("eps_min must be below eps_max"));
    }
    if count < 2 {
        return Err(Error::OutOfRange("profile needs at least two points"));
    }
    if eps_min <= -1.0 {
        return Err(Error::ErrorOutOfDomain(eps_min));
    }
    let target = target_rotation(theta);
    let pairs = seq.pairs();
    let step = (eps_max - eps_min) / (count - 1) as f64;
    let mut out = FidelityProfile {
        eps_grid: Vec::with_capacity(count),
        frobenius: Vec::with_capacity(count),
        trace: Vec::with_capacity(count),
    };
    for i in 0..count {
        // Pin the last point so rounding in `step` cannot overshoot.
        let eps = if i + 1 == count {
            eps_max
        } else {
            eps_min + i as f64 * step
        };
        let u = compose_pairs(&pairs, eps);
        out.eps_grid.push(eps);
        out.frobenius.push(1.0 - u.frobenius_distance(&target));
        out.trace.push(u.half_trace_with_adjoint(&target).re);
    }
    Ok(out)
}

/// Interval `[ε₋, ε₊]` around zero where the Frobenius infidelity stays under `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighFidelityRange {
    pub eps_minus: f64,
    pub eps_plus: f64,
    pub threshold: f64,
}

impl HighFidelityRange {
    /// Pulse-area interval `[(1+ε₋), (1+ε₊)]` in units of a nominal π pulse.
    pub fn area_interval_pi(&self) -> (f64, f64) {
        (1.0 + self.eps_minus, 1.0 + self.eps_plus)
    }

    pub fn width(&self) -> f64 {
        self.eps_plus - self.eps_minus
    }

    pub fn contains(&self, eps: f64) -> bool {
        self.eps_minus <= eps && eps <= self.eps_plus
    }
}

/// Scans outward from `ε = 0` in steps of [`RANGE_SCAN_STEP`] for the first grid
/// point above `threshold` on each side, then bisects the bracketing cell.
///
/// Scanning first keeps isolated high-fidelity lobes further out from being
/// merged into the central interval.
pub fn high_fidelity_range(
    seq: &CompositeSequence,
    theta: f64,
    threshold: f64,
) -> Result<HighFidelityRange> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::OutOfRange("threshold must lie in (0, 1)"));
    }
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let pairs = seq.pairs();
    let inf = |e: f64| frobenius_infidelity_pairs(&pairs, theta, e);
    let at_zero = inf(0.0);
    if at_zero > threshold {
        return Err(Error::NoRange(at_zero));
    }
    let edge = |sign: f64, limit: f64| -> f64 {
        let steps = libm::floor(limit / RANGE_SCAN_STEP) as usize;
        let mut good = 0.0;
        for k in 1..=steps {
            let e = k as f64 * RANGE_SCAN_STEP;
            if inf(sign * e) > threshold {
                return sign * bisect(|x| inf(sign * x) > threshold, good, e);
            }
            good = e;
        }
        sign * good
    };
    Ok(HighFidelityRange {
        eps_minus: edge(-1.0, RANGE_SCAN_LIMIT - RANGE_SCAN_STEP),
        eps_plus: edge(1.0, RANGE_SCAN_LIMIT),
        threshold,
    })
}

/// Last point below the crossing in `[good, bad]`, where `above(bad)` holds.
fn bisect(above: impl Fn(f64) -> bool, mut good: f64, mut bad: f64) -> f64 {
    while bad - good > RANGE_BISECT_TOL {
        let mid = 0.5 * (good + bad);
        if above(mid) {
            bad = mid;
        } else {
            good = mid;
        }
    }
    good
}
