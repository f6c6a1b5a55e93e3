use std::f64::consts::PI;

use cpulse::catalog::Filter;
use cpulse::expr::chi_pi;
use cpulse::Catalog;
use cpulse_core::fidelity::frobenius_fidelity;
use cpulse_core::sequence::compose;
use cpulse_core::series::{compensation_order, compose_series};
use cpulse_core::solver::{chi, polish};
use cpulse_core::su2::target_rotation;
use cpulse_core::{CompositeSequence, Family};

fn cat() -> &'static Catalog {
    Catalog::builtin()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn every_printed_row_is_present() {
    let mut names: Vec<String> = ["single", "X3", "X5", "X7", "X9", "X11", "X13", "X15", "X17"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend(["X4a", "X4b", "X4c", "X4d", "X5-asym", "X5-sym"].map(String::from));
    for n in [3, 5, 7, 9, 11, 13, 15] {
        names.push(format!("H{n}s"));
    }
    for n in [5, 7, 9, 11, 13] {
        names.push(format!("H{n}w"));
    }
    for n in [4, 6, 8, 10, 12] {
        names.push(format!("H{n}a"));
    }
    names.extend(["BB1", "BB1-5", "SCROFULOUS-H", "single-pi"].map(String::from));
    for t in [
        "1/10", "1/8", "1/6", "1/5", "1/4", "1/3", "1/2", "2/3", "3/4", "4/5", "5/6", "7/8", "9/10",
    ] {
        for n in [3, 5, 7, 9] {
            names.push(format!("ROT-{t}-{n}"));
        }
    }
    for n in &names {
        assert!(cat().get(n).is_ok(), "missing {n}");
    }
    assert_eq!(cat().records().len(), names.len());
}

#[test]
fn unknown_name_is_an_error() {
    assert!(matches!(
        cat().get("X99"),
        Err(cpulse::Error::UnknownName(_))
    ));
}

#[test]
fn x3_record() {
    let e = cat().get("X3").unwrap();
    assert_eq!(e.claimed_order, 1);
    assert_eq!(e.sequence.areas(), vec![PI; 3]);
    let expected = [1.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0];
    for (p, x) in e.sequence.phases().iter().zip(expected) {
        assert!(close(p / PI, x, 1e-15));
    }
}

#[test]
fn bb1_record_has_the_four_pulse_shape() {
    let e = cat().get("BB1").unwrap();
    assert!(close(e.theta(), PI / 2.0, 1e-15));
    let areas: Vec<f64> = e.sequence.areas().iter().map(|a| a / PI).collect();
    assert_eq!(areas, vec![0.5, 1.0, 2.0, 1.0]);
    let ph = e.sequence.phases();
    // Relative phases follow the 0, φ, 3φ, φ pattern.
    let rel = |k: usize| ((ph[k] - ph[0]) / PI).rem_euclid(2.0);
    let phi = (-1.0f64 / 8.0).acos() / PI;
    assert!(close(rel(1), phi, 1e-12));
    assert!(close(rel(2), (3.0 * phi).rem_euclid(2.0), 1e-12));
    assert!(close(rel(3), phi, 1e-12));
    assert!(close(e.sequence.total_area() / PI, 4.5, 1e-12));
}

#[test]
fn chi_variants_use_arcsin_quarter() {
    assert!(close(chi_pi() * PI, chi(), 1e-15));
    assert!(close(chi_pi(), 0.0804, 5e-5));
}

#[test]
fn order_four_alpha_beta_is_h8a_only() {
    let f = Filter {
        family: Some(Family::AsymAlphaBeta),
        order: Some(4),
        theta_pi: None,
    };
    let rows = cat().list(&f);
    assert_eq!(rows.len(), 1);
    let areas = rows[0].sequence.areas();
    assert_eq!(rows[0].name, "H8a");
    assert!(close(areas[0] / PI, 0.4954, 1e-12));
    assert!(close(areas[areas.len() - 1] / PI, 0.9028, 1e-12));
}

#[test]
fn listing_filters() {
    let sym_x = cat().list(&Filter {
        family: Some(Family::SymmetricX),
        ..Filter::default()
    });
    let names: Vec<&str> = sym_x.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(
        names,
        ["single", "X3", "X5", "X7", "X9", "X11", "X13", "X15", "X17"]
    );
    let quarter = cat().list(&Filter {
        theta_pi: Some(0.25),
        ..Filter::default()
    });
    let orders: Vec<usize> = quarter.iter().map(|e| e.claimed_order).collect();
    assert_eq!(orders, [1, 2, 3, 4]);
}

#[test]
fn published_areas() {
    let area = |n: &str| cat().get(n).unwrap().sequence.total_area() / PI;
    assert!(close(area("H4a"), 4.1735, 1e-9));
    assert!(close(area("H5s"), 3.90, 1e-9));
    assert!(close(area("BB1"), 4.50, 1e-12));
    assert!(close(area("X9"), 9.0, 1e-12));
    assert!(area("H5s") / area("BB1") <= 0.867);
}

#[test]
fn printed_data_is_kept_alongside_corrections() {
    let h9w = cat().get("H9w").unwrap();
    assert_eq!(h9w.record.phases_pi[7].to_string(), "04124");
    assert!(close(h9w.sequence.phases()[7] / PI, 0.4124, 1e-12));
    let h7s = cat().get("H7s").unwrap();
    assert_eq!(h7s.record.phases_pi[1].eval().unwrap(), 0.2724);
}

fn gate_error(seq: &CompositeSequence) -> f64 {
    compose(seq, 0.0)
        .unwrap()
        .max_entry_distance(&target_rotation(seq.target_theta()))
}

/// Swaps in the printed value at `(areas?, index)` and returns the resulting sequence.
fn with_printed(name: &str, area: bool, index: usize, value: f64) -> CompositeSequence {
    let mut r = cat().get(name).unwrap().record.clone();
    r.corrections.clear();
    let list = if area {
        &mut r.areas_pi
    } else {
        &mut r.phases_pi
    };
    list[index] = value.into();
    r.build().unwrap()
}

#[test]
fn corrected_values_fix_the_gate_while_printed_ones_break_it() {
    let cases = [
        ("H7s", false, 1, 0.2724, 6e-4),
        ("H15s", true, 0, 0.3213, 1e-2),
        ("H8a", false, 5, 1.9512, 1e-2),
    ];
    for (name, area, idx, printed, min_err) in cases {
        let fixed = cat().get(name).unwrap();
        assert!(gate_error(&fixed.sequence) <= 5e-4, "{name} corrected");
        let raw = with_printed(name, area, idx, printed);
        assert!(
            gate_error(&raw) >= min_err,
            "{name} printed: {:.2e}",
            gate_error(&raw)
        );
    }
}

#[test]
fn h9w_typo_is_settled_by_the_polish_basin() {
    let good = polish(&cat().get("H9w").unwrap().sequence, 4).unwrap();
    assert!(!good.basin_escape);
    assert!(good.solution.residual_norm <= 1e-12);
    let other = with_printed("H9w", false, 7, 0.04124);
    if let Ok(p) = polish(&other, 4) {
        assert!(p.basin_escape, "0.04124 stayed in place");
    }
}

#[test]
fn aliases_describe_the_same_gate() {
    // Each alias is an independent writing: after refinement both must give the
    // same Frobenius profile.
    for (alias, target) in cat().aliases() {
        let entry = cat().get(target).unwrap();
        let writing = cat().alias_writing(alias).unwrap();
        let theta = entry.theta();
        let p1 = polish(&entry.sequence, entry.claimed_order).unwrap();
        let p2 = polish(&writing, entry.claimed_order).unwrap();
        for k in -30..=30 {
            let eps = k as f64 * 0.01;
            let f1 = frobenius_fidelity(&p1.solution.sequence, theta, eps).unwrap();
            let f2 = frobenius_fidelity(&p2.solution.sequence, theta, eps).unwrap();
            assert!(
                (f1 - f2).abs() <= 1e-9,
                "{alias} vs {target} at {eps}: {f1} {f2}"
            );
        }
    }
    assert_eq!(cat().get("SCROFULOUS-H").unwrap().name, "H3s");
    assert_eq!(cat().get("ROT-1/2-7").unwrap().name, "H7s");
}

#[test]
fn x5_alias_is_the_closed_form() {
    let closed = cat().alias_writing("X5-sym").unwrap();
    let report = compensation_order(&closed, PI, 1e-10).unwrap();
    assert_eq!(report.order, 2);
    let printed = &cat().get("X5").unwrap().sequence;
    assert!(printed.max_parameter_distance(&closed).unwrap() <= 5e-5 * PI);
}

#[test]
fn literal_arcsin_quarter_bb1_is_not_a_hadamard() {
    // With χ = arcsin(1/4) as the phase parameter, |a₁| does not depend on any
    // global phase offset and stays far from zero, so no frame rescues it.
    let chi = chi();
    for k in 0..8 {
        let off = k as f64 * PI / 4.0;
        let pairs = [
            (PI / 2.0, off),
            (PI, chi + off),
            (2.0 * PI, 3.0 * chi + off),
            (PI, chi + off),
        ];
        let seq = CompositeSequence::from_pairs(&pairs, PI / 2.0, Family::Custom).unwrap();
        let s = compose_series(&seq, 1).unwrap();
        assert!(s.a.coeff(1).norm() > 0.1, "offset {k}π/4");
        assert_eq!(compensation_order(&seq, PI / 2.0, 1e-10).unwrap().order, 0);
    }
    let bb1 = &cat().get("BB1").unwrap().sequence;
    assert_eq!(compensation_order(bb1, PI / 2.0, 1e-10).unwrap().order, 2);
}

#[test]
fn four_and_five_pulse_bb1_are_equal_matrices() {
    let four = &cat().get("BB1").unwrap().sequence;
    let five = &cat().get("BB1-5").unwrap().sequence;
    for k in -49..=50 {
        let eps = k as f64 * 0.02;
        let d = compose(four, eps)
            .unwrap()
            .max_entry_distance(&compose(five, eps).unwrap());
        assert!(d <= 1e-12, "eps {eps}: {d:.2e}");
    }
}

#[test]
fn frobenius_dominates_trace_across_the_catalog() {
    for e in cat().entries() {
        let theta = e.theta();
        for k in -30..=30 {
            let eps = k as f64 * 0.01;
            let f = frobenius_fidelity(&e.sequence, theta, eps).unwrap();
            let t = cpulse_core::fidelity::trace_fidelity(&e.sequence, theta, eps).unwrap();
            assert!(1.0 - f >= 1.0 - t - 1e-12, "{} at {eps}", e.name);
        }
    }
}

#[test]
fn symmetric_x_profiles_are_even_in_eps() {
    for e in cat().list(&Filter {
        family: Some(Family::SymmetricX),
        ..Filter::default()
    }) {
        let seq = &cat().polished(&e.name).unwrap().solution.sequence;
        for k in 1..=50 {
            let eps = k as f64 * 0.01;
            let fp = frobenius_fidelity(seq, PI, eps).unwrap();
            let fm = frobenius_fidelity(seq, PI, -eps).unwrap();
            assert!((fp - fm).abs() <= 1e-10, "{} at {eps}", e.name);
        }
    }
}

#[test]
fn catalog_round_trips_through_toml() {
    let text = cat().to_toml().unwrap();
    let again = Catalog::from_toml(&text).unwrap();
    assert_eq!(again.records(), cat().records());
    assert_eq!(again.entries(), cat().entries());
}

#[test]
fn csv_export_has_one_row_per_entry() {
    let mut buf = Vec::new();
    cat().write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(!text.contains('\r'));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), cat().entries().len());
    assert_eq!(&rows[1][0], "X3");
}

#[test]
fn malformed_records_are_rejected() {
    let bad = [
        "[[sequence]]\nname = \"a\"\nfamily = \"nope\"\ntheta_pi = 1\nphases_pi = [0.5]\nclaimed_order = 0\nsource = \"x\"\n",
        "[[sequence]]\nname = \"a\"\nfamily = \"custom\"\ntheta_pi = 1\nareas_pi = [1, 1]\nphases_pi = [0.5]\nclaimed_order = 0\nsource = \"x\"\n",
        "[[sequence]]\nname = \"a\"\nalias_of = \"b\"\nfamily = \"custom\"\ntheta_pi = 1\nareas_pi = [1]\nphases_pi = [0.5]\nsource = \"x\"\n",
        "[[sequence]]\nname = \"a\"\nfamily = \"custom\"\ntheta_pi = 1\nareas_pi = [1]\nphases_pi = [\"q+1\"]\nclaimed_order = 0\nsource = \"x\"\n",
        "[[sequence]]\nname = \"a\"\nfamily = \"custom\"\ntheta_pi = 1\nareas_pi = [1]\nphases_pi = [0.5]\nsource = \"x\"\n",
    ];
    for text in bad {
        assert!(Catalog::from_toml(text).is_err(), "{text}");
    }
}
