//! Closed-form solutions: symmetric X phase relations, the second-order X5
//! phases, and the three-pulse symmetric rotation (SCROFULOUS).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use super::{residual_pairs, DesignProblem, Solution, DEDUP_DISTANCE, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::math::{acos, asin, cos, sin, sqrt};
use crate::sequence::{CompositeSequence, Family};

/// `χ = arcsin(1/4)`.
pub fn chi() -> f64 {
    asin(0.25)
}

/// Centre phase from the zeroth-order condition and the residual of the
/// first-order condition, for a palindromic π train with half phases `φ₁ … φ_n`
/// followed by the centre `φ_{n+1}`.
///
/// `φ_{n+1} = π/2 + 2 Σ_j (-1)^{n-j} φ_j`, and the residual is
/// `2 Σ_k sin Φ_k - (-1)^{n+1}` with `Φ_k = 2 Σ_{j<k} (-1)^{j+1} φ_j + (-1)^{k+1} φ_k`.
pub fn symmetric_x_phase_relations(phases: &[f64]) -> Result<(f64, f64)> {
    let n = phases.len();
    if n == 0 {
        return Err(Error::InvalidProblem("need at least one phase"));
    }
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let centre = FRAC_PI_2
        + 2.0
            * phases
                .iter()
                .enumerate()
                .map(|(j, &p)| sign(n - 1 - j) * p)
                .sum::<f64>();
    let mut prefix = 0.0;
    let mut total = 0.0;
    for (k, &p) in phases.iter().enumerate() {
        // k is zero-based: (-1)^{k+1} for one-based k is sign(k).
        total += sin(2.0 * prefix + sign(k) * p);
        prefix += sign(k) * p;
    }
    let residual = 2.0 * total - sign(n + 1);
    Ok((centre, residual))
}

/// Half phases `[φ₁, φ₂, φ₃]` of the symmetric five-pulse second-order X gate.
pub fn x5_symmetric_half_phases() -> [f64; 3] {
    let p1 = asin(1.0 - sqrt(5.0 / 8.0));
    let p2 = asin((3.0 * sqrt(10.0) - 2.0) / 8.0);
    [p1, p2, 2.0 * p2 - 2.0 * p1 + FRAC_PI_2]
}

/// Phases of the asymmetric five-pulse second-order X gate.
pub fn x5_asymmetric_phases() -> [f64; 5] {
    let r = sqrt(31.0);
    [
        0.0,
        asin((14.0 + r) / 20.0),
        PI + asin((9.0 * r - 19.0) / 80.0),
        asin((9.0 * r + 19.0) / 80.0),
        asin((14.0 - r) / 20.0),
    ]
}

/// Solves `sin(πu)/u = v` for `u ∈ (0, 1]`.
///
/// The left side falls monotonically from π at `u → 0` to 0 at `u = 1`, so
/// `v` must lie in `[0, π)`.
pub fn inverse_sinc(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::NonFinite("v"));
    }
    if !(0.0..PI).contains(&v) {
        return Err(Error::OutOfRange("inverse sinc needs 0 <= v < π"));
    }
    if v == 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if sin(PI * mid) / mid > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Every three-pulse symmetric first-order solution `α_{φ₁} π_{φ₂} α_{φ₁}` for `R(θ)`.
///
/// `α = π·u` with `u` the inverse sinc of `2 cos(θ/2)`; `cos(φ₁ - φ₂) = -1/(2u)`
/// and `sin(φ₁ - φ₂) = ± sin(θ/2) cos φ₁`, the sign depending on the phase
/// orientation. All sign choices are tried and only candidates whose full
/// residual is below `1e-12` are returned, sorted by `φ₁`. For `θ < π` there are
/// two, related by `φ → π - φ`.
pub fn scrofulous_branches(theta: f64) -> Result<Vec<CompositeSequence>> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::OutOfRange("theta must lie in (0, π]"));
    }
    let u = inverse_sinc(2.0 * cos(theta / 2.0))?;
    let alpha = PI * u;
    let delta = acos(-1.0 / (2.0 * u));
    let s = sin(theta / 2.0);
    let mut out: Vec<CompositeSequence> = Vec::new();
    for d in [delta, -delta] {
        let c = (sin(d) / s).clamp(-1.0, 1.0);
        for p1 in [acos(c), -acos(c)] {
            for orient in [1.0, -1.0] {
                let (q1, q2) = (orient * p1, orient * (p1 - d));
                let pairs = [(alpha, q1), (PI, q2), (alpha, q1)];
                if norm(&residual_pairs(&pairs, theta, 1)) > DEFAULT_TOL {
                    continue;
                }
                let seq = CompositeSequence::symmetric_rot(alpha, &[q1, q2], theta)?;
                let dup = out.iter().any(|k| {
                    k.max_parameter_distance(&seq)
                        .is_some_and(|x| x <= DEDUP_DISTANCE)
                });
                if !dup {
                    out.push(seq);
                }
            }
        }
    }
    out.sort_by(|x, y| x.phases()[0].total_cmp(&y.phases()[0]));
    Ok(out)
}

/// First branch of [`scrofulous_branches`] as a [`Solution`].
pub fn scrofulous_solve(theta: f64) -> Result<Solution> {
    let problem = DesignProblem::new(Family::SymmetricRot, 1, theta)?;
    let seq = scrofulous_branches(theta)?
        .into_iter()
        .next()
        .ok_or(Error::InvalidProblem("closed form produced no root"))?;
    Solution::from_sequence(seq, &problem, 0)
}
