use std::f64::consts::PI;

use cpulse_core::series::compensation_order;
use cpulse_core::solver::{scrofulous_branches, scrofulous_solve, solve, DEFAULT_TOL, ORDER_TOL};
use cpulse_core::{DesignProblem, Family};

const ROTATION_TABLE_THETAS: [f64; 13] = [
    1.0 / 10.0,
    1.0 / 8.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    2.0 / 3.0,
    3.0 / 4.0,
    4.0 / 5.0,
    5.0 / 6.0,
    7.0 / 8.0,
    9.0 / 10.0,
];

#[test]
fn closed_form_three_pulse_matches_numeric_search() {
    for t in ROTATION_TABLE_THETAS {
        let theta = t * PI;
        let problem = DesignProblem::new(Family::SymmetricRot, 1, theta).unwrap();
        let found = solve(&problem, 48, 11, DEFAULT_TOL).unwrap().solutions;
        for branch in scrofulous_branches(theta).unwrap() {
            let best = found
                .iter()
                .filter_map(|s| s.sequence.distance_modulo_symmetry(&branch))
                .fold(f64::INFINITY, f64::min);
            assert!(
                best <= 1e-9,
                "theta {t}π: nearest numeric root {best:.2e} away"
            );
        }
        let s = scrofulous_solve(theta).unwrap();
        assert!(s.residual_norm <= 1e-12);
        assert!(s.achieved_order >= 1);
    }
}

#[test]
fn converged_solutions_reach_their_order() {
    let cases = [
        (Family::SymmetricX, 2, PI),
        (Family::SymmetricRot, 2, PI / 2.0),
        (Family::AsymTheta, 2, PI / 2.0),
        (Family::AsymAlphaBeta, 2, PI / 2.0),
        (Family::SymmetricRot, 1, PI / 3.0),
    ];
    for (family, order, theta) in cases {
        let problem = DesignProblem::new(family, order, theta).unwrap();
        let report = solve(&problem, 24, 3, DEFAULT_TOL).unwrap();
        assert!(!report.solutions.is_empty(), "{family} order {order}");
        for s in &report.solutions {
            assert!(s.residual_norm <= DEFAULT_TOL);
            let r = compensation_order(&s.sequence, theta, ORDER_TOL).unwrap();
            assert!(r.order >= order, "{family}: order {} < {order}", r.order);
            assert!(s.sequence.areas().iter().all(|&a| a > 0.0 && a <= 2.0 * PI));
            assert!(s
                .sequence
                .phases()
                .iter()
                .all(|&p| (0.0..2.0 * PI).contains(&p)));
        }
        let areas: Vec<f64> = report
            .solutions
            .iter()
            .map(|s| s.sequence.total_area())
            .collect();
        assert!(areas.windows(2).all(|w| w[0] <= w[1] + 1e-8));
    }
}

#[test]
fn identical_seeds_give_identical_solutions() {
    let problem = DesignProblem::new(Family::SymmetricX, 3, PI).unwrap();
    let a = solve(&problem, 32, 99, DEFAULT_TOL).unwrap();
    let b = solve(&problem, 32, 99, DEFAULT_TOL).unwrap();
    assert_eq!(a, b);
}

#[test]
fn impossible_problem_reports_every_start() {
    // Two free phases cannot meet three conditions; the counting check refuses it.
    assert!(DesignProblem::with_pulse_count(Family::Custom, 1, PI, 1).is_err());
    let problem = DesignProblem::with_pulse_count(Family::AsymTheta, 1, PI / 2.0, 3).unwrap();
    let report = solve(&problem, 8, 5, 1e-30).unwrap();
    assert!(report.solutions.is_empty());
    assert_eq!(report.starts.len(), 8);
}
