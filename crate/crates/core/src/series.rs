//! Truncated power series in the pulse-area error `ε`.
//!
//! Every entry of a composite propagator is an entire function of `ε`. Carrying
//! its Taylor coefficients through the matrix product gives the derivatives at
//! `ε = 0` exactly (up to rounding), at `O(N·K²)` cost for `N` pulses and order `K`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::fidelity::frobenius_infidelity_pairs;
use crate::math::{cos, factorial, ln, pow, sin};
use crate::sequence::CompositeSequence;
use crate::su2::Su2Matrix;
use crate::Complex;

/// Largest supported truncation order.
pub const MAX_TRUNCATION: usize = 64;

/// `c₀ + c₁ε + … + c_K ε^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSeries {
    coeffs: Vec<Complex>,
}

impl EpsSeries {
    /// Coefficients `c₀..c_K`; the truncation order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Complex>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "series needs at least the constant term"
        );
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Complex::new(0.0, 0.0); order + 1],
        }
    }

    pub fn constant(value: Complex, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex {
        self.coeffs[m]
    }

    /// `m`-th derivative at `ε = 0`, i.e. `m!·c_m`.
    pub fn derivative_at_zero(&self, m: usize) -> Complex {
        self.coeffs[m] * factorial(m)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, eps: f64) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * eps + c)
    }

    /// Coefficient-wise conjugate; the series of `f(ε)*` for real `ε`.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.truncation_order().min(other.truncation_order())
    }
}

impl Add for &EpsSeries {
    type Output = EpsSeries;
    fn add(self, rhs: &EpsSeries) -> EpsSeries {
        let k = self.common_order(rhs);
        EpsSeries {
            coeffs: (0..=k).map(|m| self.coeffs[m] + rhs.coeffs[m]).collect(),
        }
    }
}

impl Sub for &EpsSeries {
    type Output = EpsSeries;
    fn sub(self, rhs: &EpsSeries) -> EpsSeries {
        let k = self.common_order(rhs);
        EpsSeries {
            coeffs: (0..=k).map(|m| self.coeffs[m] - rhs.coeffs[m]).collect(),
        }
    }
}

impl Mul for &EpsSeries {
    type Output = EpsSeries;
    /// Cauchy product truncated at the smaller order.
    fn mul(self, rhs: &EpsSeries) -> EpsSeries {
        let k = self.common_order(rhs);
        let coeffs = (0..=k)
            .map(|m| {
                (0..=m).fold(Complex::new(0.0, 0.0), |acc, j| {
                    acc + self.coeffs[j] * rhs.coeffs[m - j]
                })
            })
            .collect();
        EpsSeries { coeffs }
    }
}

/// Propagator whose Cayley-Klein entries `U₁₁(ε)`, `U₁₂(ε)` are truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Series {
    pub a: EpsSeries,
    pub b: EpsSeries,
}

impl Su2Series {
    pub fn identity(order: usize) -> Self {
        Self {
            a: EpsSeries::constant(Complex::new(1.0, 0.0), order),
            b: EpsSeries::zero(order),
        }
    }

    pub fn truncation_order(&self) -> usize {
        self.a.truncation_order().min(self.b.truncation_order())
    }

    /// Matrix product `self · rhs` (`rhs` acts first), truncated.
    pub fn compose(&self, rhs: &Su2Series) -> Su2Series {
        Su2Series {
            a: &(&self.a * &rhs.a) - &(&self.b * &rhs.b.conj()),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a.conj()),
        }
    }

    /// Series of `|a|² + |b|²`; identically 1 for an exact SU(2) family.
    pub fn unitarity_series(&self) -> EpsSeries {
        &(&self.a * &self.a.conj()) + &(&self.b * &self.b.conj())
    }

    pub fn eval(&self, eps: f64) -> Su2Matrix {
        Su2Matrix::new(self.a.eval(eps), self.b.eval(eps))
    }

    /// Value at `ε = 0`.
    pub fn at_zero(&self) -> Su2Matrix {
        Su2Matrix::new(self.a.coeff(0), self.b.coeff(0))
    }
}

/// Exact Taylor series of one pulse propagator with `A → A(1+ε)` to order `order`.
pub fn pulse_series(area: f64, phase: f64, order: usize) -> Result<Su2Series> {
    if order > MAX_TRUNCATION {
        return Err(Error::TruncationTooHigh(order));
    }
    if !area.is_finite() {
        return Err(Error::NonFinite("area"));
    }
    if !phase.is_finite() {
        return Err(Error::NonFinite("phase"));
    }
    Ok(raw_pulse_series(area, phase, order))
}

pub(crate) fn raw_pulse_series(area: f64, phase: f64, order: usize) -> Su2Series {
    let half = 0.5 * area;
    // -i e^{iφ}
    let rot = Complex::new(sin(phase), -cos(phase));
    let mut a = Vec::with_capacity(order + 1);
    let mut b = Vec::with_capacity(order + 1);
    let mut scale = 1.0;
    for m in 0..=order {
        if m > 0 {
            scale *= half / m as f64;
        }
        let shift = half + m as f64 * FRAC_PI_2;
        a.push(Complex::new(scale * cos(shift), 0.0));
        b.push(rot * (scale * sin(shift)));
    }
    Su2Series {
        a: EpsSeries::from_coeffs(a),
        b: EpsSeries::from_coeffs(b),
    }
}

/// Series of the composite propagator of `seq`, truncated at `order`.
pub fn compose_series(seq: &CompositeSequence, order: usize) -> Result<Su2Series> {
    if order > MAX_TRUNCATION {
        return Err(Error::TruncationTooHigh(order));
    }
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(compose_pairs_series(&seq.pairs(), order))
}

pub(crate) fn compose_pairs_series(pairs: &[(f64, f64)], order: usize) -> Su2Series {
    pairs
        .iter()
        .fold(Su2Series::identity(order), |acc, &(a, p)| {
            raw_pulse_series(a, p, order).compose(&acc)
        })
}

/// Outcome of [`compensation_order`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    /// Largest `n` with all coefficients of orders `1..=n` within tolerance.
    /// Zero when the zeroth-order test fails.
    pub order: usize,
    /// Whether `U(0)` matches the target entrywise within tolerance.
    pub zeroth_order_ok: bool,
    /// `max(|a₀ - cos θ/2|, |b₀ - sin θ/2|)`.
    pub zeroth_order_error: f64,
    /// Magnitude of the first coefficient above tolerance; `None` if every
    /// coefficient up to the truncation order vanished.
    pub leading_error: Option<f64>,
    /// Truncation order the report was computed with.
    pub truncation: usize,
}

impl OrderReport {
    /// True when the order is only a lower bound because nothing failed up to the truncation.
    pub fn is_truncated(&self) -> bool {
        self.zeroth_order_ok && self.leading_error.is_none()
    }
}

/// Default truncation used by [`compensation_order`].
pub const DEFAULT_ORDER_PROBE: usize = 24;

/// Compensation order of `seq` for the target `R(θ)`; comparisons are `≤ tol`.
pub fn compensation_order(seq: &CompositeSequence, theta: f64, tol: f64) -> Result<OrderReport> {
    compensation_order_with(seq, theta, tol, DEFAULT_ORDER_PROBE)
}

/// As [`compensation_order`] with an explicit truncation order.
pub fn compensation_order_with(
    seq: &CompositeSequence,
    theta: f64,
    tol: f64,
    truncation: usize,
) -> Result<OrderReport> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive"));
    }
    let s = compose_series(seq, truncation)?;
    let target = crate::su2::target_rotation(theta);
    let zeroth_order_error = s.at_zero().max_entry_distance(&target);
    if zeroth_order_error > tol {
        return Ok(OrderReport {
            order: 0,
            zeroth_order_ok: false,
            zeroth_order_error,
            leading_error: Some(zeroth_order_error),
            truncation,
        });
    }
    let mut order = 0;
    let mut leading_error = None;
    for m in 1..=truncation {
        let mag = s.a.coeff(m).norm().max(s.b.coeff(m).norm());
        if mag > tol {
            leading_error = Some(mag);
            break;
        }
        order = m;
    }
    Ok(OrderReport {
        order,
        zeroth_order_ok: true,
        zeroth_order_error,
        leading_error,
        truncation,
    })
}

/// Log-log slope of the Frobenius infidelity near `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeEstimate {
    Slope {
        slope: f64,
        /// Inner and outer `|ε|` of the fitted window.
        window: (f64, f64),
    },
    /// Infidelity stayed under the rounding floor everywhere it was probed.
    MachineLimited,
}

impl SlopeEstimate {
    pub fn slope(&self) -> Option<f64> {
        match self {
            SlopeEstimate::Slope { slope, .. } => Some(*slope),
            SlopeEstimate::MachineLimited => None,
        }
    }
}

/// Samples per side of `ε = 0`.
const SLOPE_SAMPLES: usize = 20;
/// Smallest infidelity trusted in the fit; below this rounding in the
/// composed propagator dominates.
const SLOPE_FLOOR: f64 = 1e-12;
/// Window spans `[lo, lo·√10]`.
const SLOPE_WINDOW_RATIO: f64 = 3.162_277_660_168_379_5;
const SLOPE_START: f64 = 1e-3;
const SLOPE_MAX_START: f64 = 0.1;

/// Least-squares slope of `log(1 - F)` against `log|ε|`, using both signs of `ε`.
///
/// The window starts at `|ε| = 10⁻³` and is moved outwards in steps of `10^{1/8}`
/// until the infidelity at its inner edge clears the rounding floor on both sides,
/// so high-order sequences are fitted where their infidelity is still resolvable.
/// An order-`n` sequence gives a slope close to `n + 1`.
pub fn order_slope_estimate(seq: &CompositeSequence, theta: f64) -> Result<SlopeEstimate> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let pairs = seq.pairs();
    let inf = |e: f64| frobenius_infidelity_pairs(&pairs, theta, e);
    let step = pow(10.0, 0.125);
    let mut lo = SLOPE_START;
    while inf(lo).min(inf(-lo)) < SLOPE_FLOOR {
        lo *= step;
        if lo > SLOPE_MAX_START {
            return Ok(SlopeEstimate::MachineLimited);
        }
    }
    let hi = lo * SLOPE_WINDOW_RATIO;
    let (l0, l1) = (ln(lo), ln(hi));
    let mut xs = Vec::with_capacity(2 * SLOPE_SAMPLES);
    let mut ys = Vec::with_capacity(2 * SLOPE_SAMPLES);
    for i in 0..SLOPE_SAMPLES {
        let t = i as f64 / (SLOPE_SAMPLES - 1) as f64;
        let le = l0 + t * (l1 - l0);
        let e = libm::exp(le);
        for sign in [1.0, -1.0] {
            let v = inf(sign * e);
            if v > 0.0 {
                xs.push(le);
                ys.push(ln(v));
            }
        }
    }
    if xs.len() < 2 {
        return Ok(SlopeEstimate::MachineLimited);
    }
    Ok(SlopeEstimate::Slope {
        slope: least_squares_slope(&xs, &ys),
        window: (lo, hi),
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
