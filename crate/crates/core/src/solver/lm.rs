//! Levenberg-Marquardt with a forward-difference Jacobian.

use alloc::vec::Vec;

use crate::linalg::{cholesky_solve, norm, Matrix};

/// Forward-difference step for the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-7;
const LAMBDA_GROW: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e12;
const LAMBDA_MIN: f64 = 1e-15;

pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Minimises `‖f(x)‖` from `x0`, stopping once the norm is `≤ tol`, after
/// `max_iter` Jacobian updates, or when no damping level yields a decrease.
pub(crate) fn levenberg_marquardt(
    f: impl Fn(&[f64]) -> Vec<f64>,
    x0: Vec<f64>,
    lambda0: f64,
    tol: f64,
    max_iter: usize,
) -> LmOutcome {
    let mut x = x0;
    let mut r = f(&x);
    let mut cost = norm(&r);
    let mut lambda = lambda0;
    let mut iterations = 0;
    'outer: while iterations < max_iter && cost > tol {
        iterations += 1;
        let j = jacobian(&f, &x, &r);
        let g = j.gram();
        let rhs: Vec<f64> = j.transpose_mul(&r).iter().map(|v| -v).collect();
        loop {
            let mut a = g.clone();
            for i in 0..a.rows {
                let d = a.get(i, i);
                a.set(i, i, d + lambda);
            }
            if let Some(delta) = cholesky_solve(&a, &rhs) {
                let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
                let r_trial = f(&trial);
                let c_trial = norm(&r_trial);
                if c_trial < cost {
                    x = trial;
                    r = r_trial;
                    cost = c_trial;
                    lambda = (lambda / LAMBDA_GROW).max(LAMBDA_MIN);
                    continue 'outer;
                }
            }
            lambda *= LAMBDA_GROW;
            if lambda > LAMBDA_MAX {
                break 'outer;
            }
        }
    }
    LmOutcome {
        x,
        residual_norm: cost,
        iterations,
    }
}

fn jacobian(f: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], r0: &[f64]) -> Matrix {
    let mut j = Matrix::zeros(r0.len(), x.len());
    let mut xp = x.to_vec();
    for c in 0..x.len() {
        xp[c] = x[c] + JACOBIAN_STEP;
        let rp = f(&xp);
        for (row, (p, q)) in rp.iter().zip(r0).enumerate() {
            j.set(row, c, (p - q) / JACOBIAN_STEP);
        }
        xp[c] = x[c];
    }
    j
}
