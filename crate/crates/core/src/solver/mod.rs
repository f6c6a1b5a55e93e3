//! Numerical and closed-form solutions of the compensation conditions.
//!
//! A [`DesignProblem`] fixes a family layout, a target order `n` and a target angle.
//! Its residual stacks the real and then the imaginary parts of
//! `[a₀ - cos θ/2, b₀ - sin θ/2, a₁, b₁, …, a_n, b_n]` where `a_m`, `b_m` are the
//! Taylor coefficients of the composite propagator. [`solve`] runs multi-start
//! Levenberg-Marquardt on it; [`polish`] refines a known sequence in place.

mod closed_form;
mod lm;

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::math::{wrap_angle, TAU};
use crate::sequence::{mirror, CompositeSequence, Family};
use crate::series::{compensation_order_with, compose_pairs_series};
use crate::su2::target_rotation;

pub use closed_form::{
    chi, inverse_sinc, scrofulous_branches, scrofulous_solve, symmetric_x_phase_relations,
    x5_asymmetric_phases, x5_symmetric_half_phases,
};
pub use lm::JACOBIAN_STEP;

/// Residual norm accepted as converged by default.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Initial damping for multi-start solves.
pub const LAMBDA_INIT: f64 = 1e-3;
/// Initial damping for [`polish`]; small so the first step is nearly Gauss-Newton.
pub const POLISH_LAMBDA_INIT: f64 = 1e-9;
/// Iteration cap per start.
pub const MAX_ITERATIONS: usize = 200;
/// Per-component shift beyond which a polish counts as leaving the input's basin.
pub const BASIN_ESCAPE: f64 = 5e-4 * PI;
/// Phase distance below which two solutions are merged.
pub const DEDUP_DISTANCE: f64 = 1e-6;
/// Coefficient tolerance used to report the achieved order of a solution.
pub const ORDER_TOL: f64 = 1e-10;

const AREA_DRAW: (f64, f64) = (0.1 * PI, 1.9 * PI);
const MIN_AREA: f64 = 1e-9;

/// Family, order, target angle and pulse count of a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignProblem {
    family: Family,
    order: usize,
    theta: f64,
    pulse_count: usize,
}

impl DesignProblem {
    /// Uses the default pulse count: `2n` for `AsymAlphaBeta`, `2n + 1` otherwise.
    pub fn new(family: Family, order: usize, theta: f64) -> Result<Self> {
        let n = match family {
            Family::AsymAlphaBeta => 2 * order,
            _ => 2 * order + 1,
        };
        Self::with_pulse_count(family, order, theta, n)
    }

    pub fn with_pulse_count(
        family: Family,
        order: usize,
        theta: f64,
        pulse_count: usize,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidProblem("order must be at least 1"));
        }
        let p = Self::unchecked(family, order, theta, pulse_count)?;
        if p.parameter_count() < p.constraint_count() {
            return Err(Error::InvalidProblem(
                "fewer free parameters than independent conditions",
            ));
        }
        Ok(p)
    }

    /// Layout checks only; order 0 and under-determined problems are allowed.
    fn unchecked(family: Family, order: usize, theta: f64, pulse_count: usize) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        if pulse_count == 0 {
            return Err(Error::EmptySequence);
        }
        match family {
            Family::SymmetricX | Family::SymmetricRot if pulse_count.is_multiple_of(2) => {
                return Err(Error::InvalidProblem(
                    "symmetric layouts need an odd pulse count",
                ));
            }
            Family::AsymTheta if !(theta > 0.0) => {
                return Err(Error::InvalidProblem(
                    "asym-theta needs a positive target angle",
                ));
            }
            Family::AsymAlphaBeta if pulse_count < 2 => {
                return Err(Error::InvalidProblem(
                    "asym-alpha-beta needs at least two pulses",
                ));
            }
            _ => {}
        }
        Ok(Self {
            family,
            order,
            theta,
            pulse_count,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn pulse_count(&self) -> usize {
        self.pulse_count
    }

    fn half_len(&self) -> usize {
        self.pulse_count.div_ceil(2)
    }

    /// Free parameters: phases, plus `α` for `SymmetricRot`, `α, β` for
    /// `AsymAlphaBeta`, and every area for `Custom`.
    pub fn parameter_count(&self) -> usize {
        match self.family {
            Family::SymmetricX => self.half_len(),
            Family::SymmetricRot => self.half_len() + 1,
            Family::AsymTheta => self.pulse_count,
            Family::AsymAlphaBeta => self.pulse_count + 2,
            Family::Custom => 2 * self.pulse_count,
        }
    }

    /// Number of independent real conditions for order `n`.
    ///
    /// Normalisation removes one of the `2n + 2` real conditions. For palindromic
    /// π-pulse trains targeting X the parity structure leaves `n + 1`; a symmetric
    /// rotation with capping pulses needs one more.
    pub fn constraint_count(&self) -> usize {
        match self.family {
            Family::SymmetricX => self.order + 1,
            Family::SymmetricRot => self.order + 2,
            _ => 2 * self.order + 1,
        }
    }

    /// Length of [`residual_vector`].
    pub fn residual_len(&self) -> usize {
        4 * (self.order + 1)
    }

    /// Maps parameters to `(area, phase)` pairs without any validation; areas may
    /// be negative mid-iteration.
    pub(crate) fn pairs(&self, params: &[f64]) -> Vec<(f64, f64)> {
        let n = self.pulse_count;
        match self.family {
            Family::SymmetricX => mirror(PI, params),
            Family::SymmetricRot => mirror(params[0], &params[1..]),
            Family::AsymTheta => params
                .iter()
                .enumerate()
                .map(|(k, &p)| (if k == 0 { self.theta } else { PI }, p))
                .collect(),
            Family::AsymAlphaBeta => params[2..]
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    let area = match k {
                        0 => params[0],
                        k if k + 1 == n => params[1],
                        _ => PI,
                    };
                    (area, p)
                })
                .collect(),
            Family::Custom => (0..n).map(|k| (params[k], params[n + k])).collect(),
        }
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::ParameterLength {
                expected: self.parameter_count(),
                actual: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("parameters"));
        }
        Ok(())
    }

    /// Sequence described by `params`, canonicalised (negative areas flipped with
    /// a π phase shift, phases wrapped).
    pub fn sequence(&self, params: &[f64]) -> Result<CompositeSequence> {
        self.check_len(params)?;
        let pairs = canonical_pairs(&self.pairs(params))
            .ok_or(Error::OutOfRange("pulse areas must lie in (0, 2π]"))?;
        CompositeSequence::from_pairs(&pairs, self.theta, self.family)
    }

    /// Inverse of [`DesignProblem::sequence`] for a sequence with this layout.
    pub fn parameters(&self, seq: &CompositeSequence) -> Result<Vec<f64>> {
        if seq.len() != self.pulse_count {
            return Err(Error::ParameterLength {
                expected: self.pulse_count,
                actual: seq.len(),
            });
        }
        let seq = seq.with_family(self.family)?;
        let areas = seq.areas();
        let phases = seq.phases();
        let m = self.half_len();
        let mut out = Vec::with_capacity(self.parameter_count());
        match self.family {
            Family::SymmetricX => out.extend_from_slice(&phases[..m]),
            Family::SymmetricRot => {
                out.push(areas[0]);
                out.extend_from_slice(&phases[..m]);
            }
            Family::AsymTheta => out.extend_from_slice(&phases),
            Family::AsymAlphaBeta => {
                out.push(areas[0]);
                out.push(areas[self.pulse_count - 1]);
                out.extend_from_slice(&phases);
            }
            Family::Custom => {
                out.extend_from_slice(&areas);
                out.extend_from_slice(&phases);
            }
        }
        Ok(out)
    }
}

/// Residual of the compensation conditions at `params`.
pub fn residual_vector(params: &[f64], problem: &DesignProblem) -> Result<Vec<f64>> {
    problem.check_len(params)?;
    Ok(residual_pairs(
        &problem.pairs(params),
        problem.theta,
        problem.order,
    ))
}

pub(crate) fn residual_pairs(pairs: &[(f64, f64)], theta: f64, order: usize) -> Vec<f64> {
    let s = compose_pairs_series(pairs, order);
    let target = target_rotation(theta);
    let mut terms = Vec::with_capacity(2 * (order + 1));
    terms.push(s.a.coeff(0) - target.a);
    terms.push(s.b.coeff(0) - target.b);
    for m in 1..=order {
        terms.push(s.a.coeff(m));
        terms.push(s.b.coeff(m));
    }
    let mut out: Vec<f64> = terms.iter().map(|c| c.re).collect();
    out.extend(terms.iter().map(|c| c.im));
    out
}

fn canonical_pairs(pairs: &[(f64, f64)]) -> Option<Vec<(f64, f64)>> {
    pairs
        .iter()
        .map(|&(a, p)| {
            let (a, p) = if a < 0.0 { (-a, p + PI) } else { (a, p) };
            (MIN_AREA..=TAU * (1.0 + 1e-12))
                .contains(&a)
                .then(|| (a, wrap_angle(p)))
        })
        .collect()
}

/// A converged design.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub sequence: CompositeSequence,
    pub residual_norm: f64,
    /// Compensation order at [`ORDER_TOL`].
    pub achieved_order: usize,
    /// Index of the random start that produced it.
    pub seed_id: usize,
}

impl Solution {
    fn from_sequence(
        sequence: CompositeSequence,
        problem: &DesignProblem,
        seed_id: usize,
    ) -> Result<Self> {
        let residual_norm = norm(&residual_pairs(
            &sequence.pairs(),
            problem.theta,
            problem.order,
        ));
        let report =
            compensation_order_with(&sequence, problem.theta, ORDER_TOL, problem.order + 3)?;
        Ok(Self {
            sequence,
            residual_norm,
            achieved_order: report.order,
            seed_id,
        })
    }
}

/// What happened to one random start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartOutcome {
    Converged,
    /// Stopped above tolerance.
    Stalled,
    /// Converged to areas outside `(0, 2π]`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartDiagnostic {
    pub seed_id: usize,
    pub iterations: usize,
    pub residual_norm: f64,
    pub outcome: StartOutcome,
}

/// Deduplicated solutions sorted by total area, plus one diagnostic per start.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    pub starts: Vec<StartDiagnostic>,
}

/// Multi-start Levenberg-Marquardt.
///
/// Starts draw phases uniformly from `[0, 2π)` and free areas from `(0.1π, 1.9π)`
/// using a ChaCha8 stream seeded with `rng_seed`. Solutions are merged when they
/// coincide up to reversal of the pulse order; reflection twins `φ → π - φ` are
/// kept as separate branches.
pub fn solve(
    problem: &DesignProblem,
    seeds: usize,
    rng_seed: u64,
    tol: f64,
) -> Result<SolveReport> {
    if seeds == 0 {
        return Err(Error::InvalidProblem("need at least one start"));
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let area_params = match problem.family {
        Family::SymmetricRot => 1,
        Family::AsymAlphaBeta => 2,
        Family::Custom => problem.pulse_count,
        _ => 0,
    };
    let mut found = Vec::new();
    let mut starts = Vec::with_capacity(seeds);
    for seed_id in 0..seeds {
        let x0: Vec<f64> = (0..problem.parameter_count())
            .map(|i| {
                // Area parameters always lead the layout.
                if i < area_params {
                    rng.random_range(AREA_DRAW.0..AREA_DRAW.1)
                } else {
                    rng.random_range(0.0..TAU)
                }
            })
            .collect();
        let out = lm::levenberg_marquardt(
            |x| residual_pairs(&problem.pairs(x), problem.theta, problem.order),
            x0,
            LAMBDA_INIT,
            tol,
            MAX_ITERATIONS,
        );
        let mut outcome = StartOutcome::Stalled;
        if out.residual_norm <= tol {
            outcome = StartOutcome::Degenerate;
            if let Ok(seq) = problem.sequence(&out.x) {
                let sol = Solution::from_sequence(seq, problem, seed_id)?;
                if sol.residual_norm <= tol {
                    found.push(sol);
                    outcome = StartOutcome::Converged;
                }
            }
        }
        starts.push(StartDiagnostic {
            seed_id,
            iterations: out.iterations,
            residual_norm: out.residual_norm,
            outcome,
        });
    }
    found.sort_by(solution_order);
    let mut solutions: Vec<Solution> = Vec::new();
    for s in found {
        if !solutions.iter().any(|k| same_solution(k, &s)) {
            solutions.push(s);
        }
    }
    Ok(SolveReport { solutions, starts })
}

/// Total area (quantised so rounding cannot reorder equal-area branches), then
/// phases, then seed.
fn solution_order(x: &Solution, y: &Solution) -> Ordering {
    let key = |s: &Solution| libm::round(s.sequence.total_area() * 1e8) as i64;
    key(x)
        .cmp(&key(y))
        .then_with(|| {
            let (px, py) = (x.sequence.pairs(), y.sequence.pairs());
            px.iter()
                .zip(&py)
                .map(|(a, b)| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
        .then(x.seed_id.cmp(&y.seed_id))
}

fn same_solution(x: &Solution, y: &Solution) -> bool {
    let (a, b) = (&x.sequence, &y.sequence);
    [b.clone(), b.reversed()]
        .iter()
        .filter_map(|c| a.max_parameter_distance(c))
        .any(|d| d <= DEDUP_DISTANCE)
}

/// Result of [`polish`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polished {
    pub solution: Solution,
    /// Largest per-component change (areas and phases, radians).
    pub max_shift: f64,
    /// `max_shift > BASIN_ESCAPE`: the refined root is probably not the one the
    /// input approximated.
    pub basin_escape: bool,
    pub iterations: usize,
}

/// Refines `seq` to a root of the order-`order` conditions, keeping its layout.
///
/// Order 0 is accepted here and only enforces the gate itself.
pub fn polish(seq: &CompositeSequence, order: usize) -> Result<Polished> {
    let problem = DesignProblem::unchecked(seq.family(), order, seq.target_theta(), seq.len())?;
    let x0 = problem.parameters(seq)?;
    let out = lm::levenberg_marquardt(
        |x| residual_pairs(&problem.pairs(x), problem.theta, problem.order),
        x0,
        POLISH_LAMBDA_INIT,
        DEFAULT_TOL,
        MAX_ITERATIONS,
    );
    let refined = problem.sequence(&out.x);
    let max_shift = refined
        .as_ref()
        .ok()
        .and_then(|r| seq.max_parameter_distance(r))
        .unwrap_or(f64::INFINITY);
    match refined {
        Ok(r) if out.residual_norm <= DEFAULT_TOL => Ok(Polished {
            solution: Solution::from_sequence(r, &problem, 0)?,
            max_shift,
            basin_escape: max_shift > BASIN_ESCAPE,
            iterations: out.iterations,
        }),
        other => Err(Error::PolishDiverged {
            residual: out.residual_norm,
            iterations: out.iterations,
            max_shift,
            last: Box::new(other.unwrap_or_else(|_| seq.clone())),
        }),
    }
}
