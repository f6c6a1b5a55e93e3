//! Claim checks for a single sequence and for the whole catalog.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use cpulse_core::fidelity::{high_fidelity_range, DEFAULT_THRESHOLD};
use cpulse_core::sequence::compose;
use cpulse_core::series::{compensation_order_with, order_slope_estimate, SlopeEstimate};
use cpulse_core::solver::{polish, Polished, ORDER_TOL};
use cpulse_core::su2::target_rotation;
use cpulse_core::CompositeSequence;

use crate::catalog::{Catalog, NamedSequence};
use crate::error::Result;
use crate::file::SequenceFile;

/// Gate tolerance for 4-decimal printed parameters.
pub const PRINTED_GATE_TOL: f64 = 5e-4;
/// Gate tolerance after refinement.
pub const POLISHED_GATE_TOL: f64 = 1e-10;
pub const SLOPE_TOL: f64 = 0.15;
pub const AREA_TOL_PI: f64 = 0.01;
pub const RANGE_TOL_PI: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Adds the coefficient test of the refined sequence at [`ORDER_TOL`].
    pub strict: bool,
    /// Gate tolerance for the sequence as given.
    pub gate_tol: f64,
    pub threshold: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            strict: false,
            gate_tol: PRINTED_GATE_TOL,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// A sequence together with what is claimed about it.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub name: String,
    pub sequence: CompositeSequence,
    pub claimed_order: Option<usize>,
    pub claimed_range_pi: Option<(f64, f64)>,
    pub claimed_total_area_pi: Option<f64>,
}

impl From<&NamedSequence> for Subject {
    fn from(e: &NamedSequence) -> Self {
        Subject {
            name: e.name.clone(),
            sequence: e.sequence.clone(),
            claimed_order: Some(e.claimed_order),
            claimed_range_pi: e.claimed_range_pi,
            claimed_total_area_pi: e.claimed_total_area_pi,
        }
    }
}

impl SequenceFile {
    pub fn subject(&self) -> Result<Subject> {
        Ok(Subject {
            name: self.name.clone(),
            sequence: self.sequence()?,
            claimed_order: self.claimed_order,
            claimed_range_pi: self.claimed_range_pi.map(|[a, b]| (a, b)),
            claimed_total_area_pi: self.claimed_total_area_pi,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub claimed_order: Option<usize>,
    /// Largest entry distance to the target at `ε = 0`, as given.
    pub gate_error: f64,
    pub polished: Option<Polished>,
    /// Entry distance at `ε = 0` after refinement.
    pub polished_gate_error: Option<f64>,
    pub slope: Option<SlopeEstimate>,
    /// Coefficient-test order of the refined sequence (strict mode only).
    pub exact_order: Option<usize>,
    pub total_area_pi: f64,
    /// Range measured on the refined sequence when available.
    pub range_pi: Option<(f64, f64)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn status(&self) -> Status {
        if self.passed() {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Refined sequence if refinement succeeded.
    pub fn refined(&self) -> Option<&CompositeSequence> {
        self.polished.as_ref().map(|p| &p.solution.sequence)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.name, self.status());
        for c in &self.checks {
            let _ = writeln!(s, "  {:<14} {}  {}", c.name, c.status, c.detail);
        }
        s
    }

    /// One line for a summary table.
    pub fn summary_row(&self) -> String {
        let order = self
            .claimed_order
            .map(|n| n.to_string())
            .unwrap_or_else(|| "-".into());
        let range = self
            .range_pi
            .map(|(a, b)| format!("[{a:.4}, {b:.4}]"))
            .unwrap_or_else(|| "-".into());
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name)
            .collect();
        format!(
            "{:<14} {:<4} {:>5} {:>9.4} {:>9.2e} {:<18} {}",
            self.name,
            self.status(),
            order,
            self.total_area_pi,
            self.gate_error,
            range,
            failed.join(",")
        )
    }
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn gate_error(seq: &CompositeSequence) -> Result<f64> {
    let u = compose(seq, 0.0)?;
    Ok(u.max_entry_distance(&target_rotation(seq.target_theta())))
}

/// Runs every applicable check on `subject`.
///
/// With a claimed order the sequence is first refined to machine precision at
/// that order; the slope and range are measured on the refined sequence, since
/// rounding of printed parameters leaves a residual that dominates the
/// infidelity near `ε = 0`.
pub fn verify(subject: &Subject, opts: &VerifyOptions) -> Result<Report> {
    let seq = &subject.sequence;
    let theta = seq.target_theta();
    let mut checks = Vec::new();

    let gate = gate_error(seq)?;
    checks.push(check(
        "gate",
        gate <= opts.gate_tol,
        format!("max |U(0) - R| = {gate:.2e} (tol {:.1e})", opts.gate_tol),
    ));

    let mut polished = None;
    let mut polished_gate = None;
    let mut slope = None;
    let mut exact_order = None;
    if let Some(n) = subject.claimed_order {
        match polish(seq, n) {
            Ok(p) => {
                checks.push(check(
                    "polish",
                    !p.basin_escape,
                    format!(
                        "residual {:.1e}, max shift {:.6}π{}",
                        p.solution.residual_norm,
                        p.max_shift / PI,
                        if p.basin_escape {
                            " (basin escape)"
                        } else {
                            ""
                        }
                    ),
                ));
                polished = Some(p);
            }
            Err(e) => checks.push(check("polish", false, e.to_string())),
        }
        let refined = polished.as_ref().map(|p| &p.solution.sequence);
        if let Some(r) = refined {
            let g = gate_error(r)?;
            checks.push(check(
                "gate-polished",
                g <= POLISHED_GATE_TOL,
                format!("max |U(0) - R| = {g:.2e} (tol {POLISHED_GATE_TOL:.0e})"),
            ));
            polished_gate = Some(g);
        }
        let probe = refined.unwrap_or(seq);
        let est = order_slope_estimate(probe, theta)?;
        let expected = (n + 1) as f64;
        let (ok, detail) = match est {
            SlopeEstimate::Slope { slope, .. } => (
                (slope - expected).abs() <= SLOPE_TOL,
                format!("{slope:.3} (expected {expected} ± {SLOPE_TOL})"),
            ),
            SlopeEstimate::MachineLimited => (false, "machine-limited".to_string()),
        };
        checks.push(check("slope", ok, detail));
        slope = Some(est);
        if opts.strict {
            let report = compensation_order_with(probe, theta, ORDER_TOL, n + 3)?;
            checks.push(check(
                "order",
                report.zeroth_order_ok && report.order >= n,
                format!(
                    "coefficient order {} at {ORDER_TOL:.0e} (claimed {n})",
                    report.order
                ),
            ));
            exact_order = Some(report.order);
        }
    }
    let probe = polished
        .as_ref()
        .map(|p| &p.solution.sequence)
        .unwrap_or(seq);

    let area = seq.total_area() / PI;
    if let Some(claim) = subject.claimed_total_area_pi {
        checks.push(check(
            "area",
            (area - claim).abs() <= AREA_TOL_PI,
            format!("{area:.4}π (claimed {claim}π)"),
        ));
    }

    let range = high_fidelity_range(probe, theta, opts.threshold)
        .ok()
        .map(|r| r.area_interval_pi());
    if let Some((lo, hi)) = subject.claimed_range_pi {
        let (ok, detail) = match range {
            Some((a, b)) => (
                (a - lo).abs() <= RANGE_TOL_PI && (b - hi).abs() <= RANGE_TOL_PI,
                format!("[{a:.4}π, {b:.4}π] (claimed [{lo}π, {hi}π])"),
            ),
            None => (
                false,
                "no range: gate infidelity above threshold".to_string(),
            ),
        };
        checks.push(check("range", ok, detail));
    }

    Ok(Report {
        name: subject.name.clone(),
        claimed_order: subject.claimed_order,
        gate_error: gate,
        polished,
        polished_gate_error: polished_gate,
        slope,
        exact_order,
        total_area_pi: area,
        range_pi: range,
        checks,
    })
}

/// Verifies every primary catalog entry, in catalog order.
pub fn verify_all(catalog: &Catalog, opts: &VerifyOptions) -> Result<Vec<Report>> {
    catalog
        .entries()
        .iter()
        .map(|e| verify(&Subject::from(e), opts))
        .collect()
}

/// Fixed-width table of [`verify_all`] results with a closing tally.
pub fn render_table(reports: &[Report]) -> String {
    let mut s = format!(
        "{:<14} {:<4} {:>5} {:>9} {:>9} {:<18} {}\n",
        "name", "stat", "order", "area/π", "gate", "range/π", "failed"
    );
    for r in reports {
        s.push_str(&r.summary_row());
        s.push('\n');
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(s, "{passed}/{} passed", reports.len());
    s
}
