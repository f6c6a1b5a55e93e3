//! Series coefficients against Richardson-extrapolated central differences of
//! the exact propagator.

use std::f64::consts::PI;

use cpulse_core::sequence::compose;
use cpulse_core::series::compose_series;
use cpulse_core::{Complex, CompositeSequence, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference for the `m`-th derivative at 0, error O(h²).
fn central(f: &dyn Fn(f64) -> [Complex; 2], m: usize, h: f64) -> [Complex; 2] {
    let mut acc = [Complex::new(0.0, 0.0); 2];
    for k in 0..=m {
        let w = if k % 2 == 0 { 1.0 } else { -1.0 } * binom(m, k);
        let v = f((m as f64 / 2.0 - k as f64) * h);
        acc[0] += v[0] * w;
        acc[1] += v[1] * w;
    }
    let s = h.powi(m as i32);
    [acc[0] / s, acc[1] / s]
}

/// Two Richardson levels on top of [`central`]: error O(h⁶).
fn richardson(f: &dyn Fn(f64) -> [Complex; 2], m: usize, h: f64) -> [Complex; 2] {
    let d = [
        central(f, m, h),
        central(f, m, h / 2.0),
        central(f, m, h / 4.0),
    ];
    let r1 = |x: Complex, y: Complex| (y * 4.0 - x) / 3.0;
    let mut out = [Complex::new(0.0, 0.0); 2];
    for e in 0..2 {
        let a = r1(d[0][e], d[1][e]);
        let b = r1(d[1][e], d[2][e]);
        out[e] = (b * 16.0 - a) / 15.0;
    }
    out
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

#[test]
fn coefficients_match_richardson_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_901);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=7);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                (
                    rng.random_range(0.1..2.0) * PI,
                    rng.random_range(0.0..2.0) * PI,
                )
            })
            .collect();
        let seq = CompositeSequence::from_pairs(&pairs, PI, Family::Custom).unwrap();
        let series = compose_series(&seq, 4).unwrap();
        let f = |e: f64| {
            let u = compose(&seq, e).unwrap();
            [u.a, u.b]
        };
        for m in 1..=4 {
            // Larger steps for higher derivatives keep rounding below truncation.
            let h = [0.0, 1e-3, 4e-3, 1.6e-2, 3.2e-2][m];
            let fd = richardson(&f, m, h);
            let got = [
                series.a.coeff(m) * factorial(m),
                series.b.coeff(m) * factorial(m),
            ];
            for e in 0..2 {
                let rel = (got[e] - fd[e]).norm() / fd[e].norm().max(1.0);
                worst = worst.max(rel);
                assert!(rel <= 1e-6, "order {m}, entry {e}: {} vs {}", got[e], fd[e]);
            }
        }
    }
    eprintln!("worst relative deviation {worst:.2e}");
}
