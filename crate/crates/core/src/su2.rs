//! Exact SU(2) propagators at a fixed pulse-area error.

use core::ops::Mul;

use crate::error::{Error, Result};
use crate::math::{cos, sin};
use crate::Complex;

/// Special-unitary 2×2 matrix `[[a, b], [-b*, a*]]` stored by its Cayley-Klein pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix {
    pub a: Complex,
    pub b: Complex,
}

impl Su2Matrix {
    pub const fn new(a: Complex, b: Complex) -> Self {
        Self { a, b }
    }

    pub const fn identity() -> Self {
        Self {
            a: Complex::new(1.0, 0.0),
            b: Complex::new(0.0, 0.0),
        }
    }

    /// Full matrix, row major.
    pub fn entries(&self) -> [[Complex; 2]; 2] {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    /// `|a|² + |b|²`, equal to the determinant.
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_entry_distance(&self, other: &Su2Matrix) -> f64 {
        let da = (self.a - other.a).norm();
        let db = (self.b - other.b).norm();
        da.max(db)
    }

    /// `sqrt(¼ Σ_jk |U_jk - V_jk|²)` over all four entries.
    pub fn frobenius_distance(&self, other: &Su2Matrix) -> f64 {
        let u = self.entries();
        let v = other.entries();
        let mut sum = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                sum += (u[j][k] - v[j][k]).norm_sqr();
            }
        }
        crate::math::sqrt(0.25 * sum)
    }

    /// `½ Tr(self · other†)`.
    pub fn half_trace_with_adjoint(&self, other: &Su2Matrix) -> Complex {
        let u = self.entries();
        let v = other.entries();
        let mut tr = Complex::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                tr += u[j][k] * v[j][k].conj();
            }
        }
        tr * 0.5
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;

    /// Matrix product `self · rhs`; `rhs` acts first.
    fn mul(self, rhs: Su2Matrix) -> Su2Matrix {
        Su2Matrix {
            a: self.a * rhs.a - self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }
}

/// Propagator of a resonant pulse of nominal `area` and `phase` with relative
/// area error `eps`: `a = cos(A(1+ε)/2)`, `b = -i sin(A(1+ε)/2) e^{iφ}`.
pub fn pulse_propagator(area: f64, phase: f64, eps: f64) -> Result<Su2Matrix> {
    if !area.is_finite() {
        return Err(Error::NonFinite("area"));
    }
    if !phase.is_finite() {
        return Err(Error::NonFinite("phase"));
    }
    if !eps.is_finite() {
        return Err(Error::NonFinite("eps"));
    }
    if area <= 0.0 {
        return Err(Error::NonPositiveArea(area));
    }
    if eps <= -1.0 {
        return Err(Error::ErrorOutOfDomain(eps));
    }
    Ok(raw_propagator(area, phase, eps))
}

/// Unchecked propagator; accepts any real area, used inside solvers.
pub(crate) fn raw_propagator(area: f64, phase: f64, eps: f64) -> Su2Matrix {
    let half = 0.5 * area * (1.0 + eps);
    let s = sin(half);
    // -i e^{iφ} = sin φ - i cos φ
    Su2Matrix {
        a: Complex::new(cos(half), 0.0),
        b: Complex::new(s * sin(phase), -s * cos(phase)),
    }
}

/// Target gate `R(θ) = [[cos θ/2, sin θ/2], [-sin θ/2, cos θ/2]]`.
pub fn target_rotation(theta: f64) -> Su2Matrix {
    Su2Matrix {
        a: Complex::new(cos(0.5 * theta), 0.0),
        b: Complex::new(sin(0.5 * theta), 0.0),
    }
}

/// `F(φ) = diag(e^{iφ}, e^{-iφ})`.
pub fn phase_gate(phi: f64) -> Su2Matrix {
    Su2Matrix {
        a: Complex::new(cos(phi), sin(phi)),
        b: Complex::new(0.0, 0.0),
    }
}

/// The x-axis rotation `[[cos θ/2, i sin θ/2], [i sin θ/2, cos θ/2]]`.
pub fn x_rotation(theta: f64) -> Su2Matrix {
    Su2Matrix {
        a: Complex::new(cos(0.5 * theta), 0.0),
        b: Complex::new(0.0, sin(0.5 * theta)),
    }
}
