//! Command-line interface. [`run`] returns the process exit code.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpulse_core::fidelity::{high_fidelity_range, profile, DEFAULT_THRESHOLD};
use cpulse_core::solver::{solve, DEFAULT_TOL};
use cpulse_core::{CompositeSequence, DesignProblem, Family};

use crate::catalog::{Catalog, Filter};
use crate::error::{Error, Result};
use crate::file::SequenceFile;
use crate::verify::{render_table, verify, verify_all, Subject, VerifyOptions, PRINTED_GATE_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cpulse",
    version,
    about = "Composite pulse sequences: verify, profile, solve"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a sequence against its claimed order, area and range.
    Verify(VerifyArgs),
    /// Fidelity profile as CSV.
    Profile(ProfileArgs),
    /// High-fidelity pulse-area interval.
    Range(RangeArgs),
    /// Search for sequences of a given family and order.
    Solve(SolveArgs),
    /// Inspect or export the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    /// Catalog name or path to a sequence file.
    pub target: String,
    /// Use catalog parameters as printed instead of refining them first.
    #[arg(long)]
    pub as_printed: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Catalog name or path to a sequence file; omit with --all.
    #[arg(required_unless_present = "all")]
    pub target: Option<String>,
    /// Verify every catalog entry.
    #[arg(long, conflicts_with = "target")]
    pub all: bool,
    /// Also require the exact coefficient test after refinement.
    #[arg(long)]
    pub strict: bool,
    /// Gate tolerance for the sequence as given.
    #[arg(long, default_value_t = PRINTED_GATE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub theta_pi: f64,
    /// Pulse count; the family default when omitted.
    #[arg(long)]
    pub pulses: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write the solutions as CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Toml,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// List entries, optionally filtered.
    List {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        theta_pi: Option<f64>,
    },
    /// Write the catalog as a data file.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Toml)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Profile(a) => cmd_profile(a, out),
        Command::Range(a) => cmd_range(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Catalog { action } => cmd_catalog(action, out),
    }
}

/// Resolves a catalog name or a sequence file.
pub fn resolve(target: &str) -> Result<Subject> {
    let catalog = Catalog::builtin();
    match catalog.get(target) {
        Ok(e) => Ok(Subject::from(e)),
        Err(Error::UnknownName(_)) if Path::new(target).is_file() => {
            SequenceFile::read(Path::new(target))?.subject()
        }
        Err(e) => Err(e),
    }
}

/// Sequence used by `profile` and `range`: catalog entries are refined unless
/// `--as-printed` is given; files are used as written.
fn working_sequence(t: &Target) -> Result<CompositeSequence> {
    let catalog = Catalog::builtin();
    match catalog.get(&t.target) {
        Ok(e) if !t.as_printed => Ok(catalog.polished(&e.name)?.solution.sequence),
        Ok(e) => Ok(e.sequence.clone()),
        Err(_) => resolve(&t.target).map(|s| s.sequence),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Option<BufWriter<File>>> {
    Ok(match path {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let opts = VerifyOptions {
        strict: a.strict,
        gate_tol: a.tol,
        ..VerifyOptions::default()
    };
    let passed = match &a.target {
        None => {
            let reports = verify_all(Catalog::builtin(), &opts)?;
            out.write_all(render_table(&reports).as_bytes())?;
            reports.iter().all(|r| r.passed())
        }
        Some(t) => {
            let report = verify(&resolve(t)?, &opts)?;
            out.write_all(report.render().as_bytes())?;
            report.passed()
        }
    };
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_profile(a: &ProfileArgs, out: &mut dyn Write) -> Result<i32> {
    let seq = working_sequence(&a.target)?;
    let p = profile(&seq, seq.target_theta(), a.eps_min, a.eps_max, a.points)?;
    let mut file = open_out(&a.out)?;
    let w: &mut dyn Write = match file.as_mut() {
        Some(f) => f,
        None => out,
    };
    write_profile_csv(&p, w)?;
    w.flush()?;
    Ok(EXIT_PASS)
}

/// CSV with header `eps,frobenius_fidelity,trace_fidelity`, 12 decimals, LF endings.
pub fn write_profile_csv(p: &cpulse_core::FidelityProfile, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "eps,frobenius_fidelity,trace_fidelity")?;
    for (e, f, t) in p.rows() {
        writeln!(w, "{e:.12},{f:.12},{t:.12}")?;
    }
    Ok(())
}

fn cmd_range(a: &RangeArgs, out: &mut dyn Write) -> Result<i32> {
    let seq = working_sequence(&a.target)?;
    let r = high_fidelity_range(&seq, seq.target_theta(), a.threshold)?;
    let (lo, hi) = r.area_interval_pi();
    writeln!(out, "[{lo:.5}π, {hi:.5}π]")?;
    Ok(EXIT_PASS)
}

fn parse_family(s: &str) -> Result<Family> {
    Family::parse(s).ok_or_else(|| Error::Record {
        name: s.to_string(),
        reason: "unknown family".into(),
    })
}

fn join_pi(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{:.12}", x / PI))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let family = parse_family(&a.family)?;
    let theta = a.theta_pi * PI;
    let problem = match a.pulses {
        Some(n) => DesignProblem::with_pulse_count(family, a.order, theta, n)?,
        None => DesignProblem::new(family, a.order, theta)?,
    };
    let report = solve(&problem, a.seeds, a.rng_seed, a.tol)?;
    let converged = report
        .starts
        .iter()
        .filter(|s| s.outcome == cpulse_core::solver::StartOutcome::Converged)
        .count();
    writeln!(
        out,
        "family {} order {} theta {:.12}π pulses {}: {} solution(s) from {} of {} starts",
        family,
        a.order,
        a.theta_pi,
        problem.pulse_count(),
        report.solutions.len(),
        converged,
        report.starts.len()
    )?;
    for (i, s) in report.solutions.iter().enumerate() {
        let seq = &s.sequence;
        writeln!(
            out,
            "#{i} area {:.12}π residual {:.1e} order {}",
            seq.total_area() / PI,
            s.residual_norm,
            s.achieved_order
        )?;
        writeln!(out, "  areas/π  {}", join_pi(&seq.areas()))?;
        writeln!(out, "  phases/π {}", join_pi(&seq.phases()))?;
    }
    if let Some(path) = &a.out {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record([
            "index",
            "total_area_pi",
            "residual",
            "achieved_order",
            "areas_pi",
            "phases_pi",
        ])?;
        for (i, s) in report.solutions.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:.12}", s.sequence.total_area() / PI),
                format!("{:.3e}", s.residual_norm),
                s.achieved_order.to_string(),
                join_pi(&s.sequence.areas()),
                join_pi(&s.sequence.phases()),
            ])?;
        }
        w.flush()?;
    }
    Ok(EXIT_PASS)
}

fn cmd_catalog(action: &CatalogAction, out: &mut dyn Write) -> Result<i32> {
    let catalog = Catalog::builtin();
    match action {
        CatalogAction::List {
            family,
            order,
            theta_pi,
        } => {
            let filter = Filter {
                family: family.as_deref().map(parse_family).transpose()?,
                order: *order,
                theta_pi: *theta_pi,
            };
            writeln!(
                out,
                "{:<14} {:<16} {:>8} {:>5} {:>6} {:>9}  range/π",
                "name", "family", "theta/π", "order", "pulses", "area/π"
            )?;
            for e in catalog.list(&filter) {
                let range = e
                    .claimed_range_pi
                    .map(|(a, b)| format!("[{a}, {b}]"))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{:<14} {:<16} {:>8.4} {:>5} {:>6} {:>9.4}  {}",
                    e.name,
                    e.family().as_str(),
                    e.theta() / PI,
                    e.claimed_order,
                    e.sequence.len(),
                    e.sequence.total_area() / PI,
                    range
                )?;
            }
        }
        CatalogAction::Export { format, out: path } => {
            let mut file = open_out(path)?;
            let w: &mut dyn Write = match file.as_mut() {
                Some(f) => f,
                None => out,
            };
            match format {
                Format::Toml => w.write_all(catalog.to_toml()?.as_bytes())?,
                Format::Csv => catalog.write_csv(&mut *w)?,
            }
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}
