//! Config-driven front end.
//!
//! Exit codes: `0` success, `1` usage error, `2` config error, `3` degenerate
//! or failed analysis (outputs are still written where possible).

pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bifurcation::{
    analyze, certify_corsc, certify_no_bifurcation, find_crossings_banded, scan, AnalysisError,
    ReportStatus, Verdict,
};
use crate::models::CaseStudy;
pub use config::{load, ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

/// Caps the worker threads used for grid scans.
pub const THREADS_ENV: &str = "CMCB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cmcb",
    version,
    about = "Rigidity and bifurcation analysis of CMC slices in warped products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Target {
    /// Run configuration (TOML).
    config: PathBuf,
    /// Output directory, overriding `[output] directory`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full analysis: report.json plus every other artifact.
    Analyze(Target),
    /// h, α² and Morse index on the grid (scan.csv).
    Scan(Target),
    /// Eigenvalue crossings of h (crossings.json).
    Crossings(Target),
    /// Rigidity certificates (certificates.json).
    Certify(Target),
    /// Morse index on the grid (index.csv).
    Index(Target),
    /// Fiber spectrum (spectrum.csv).
    Spectrum(Target),
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Incomplete(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            _ => EXIT_ANALYSIS,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match thread_pool() {
        Some(pool) => pool.install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Option<rayon::ThreadPool> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new().num_threads(n).build().ok(),
        _ => {
            eprintln!("warning: ignoring {THREADS_ENV}={raw:?}, expected a positive integer");
            None
        }
    }
}

fn prepare(target: &Target) -> Result<RunConfig, Failure> {
    let mut run = load(&target.config)?;
    if let Some(dir) = &target.out {
        run.output_dir = dir.clone();
    }
    std::fs::create_dir_all(&run.output_dir)?;
    Ok(run)
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze(t) => run_analyze(&prepare(&t)?),
        Command::Scan(t) => run_scan(&prepare(&t)?),
        Command::Crossings(t) => run_crossings(&prepare(&t)?),
        Command::Certify(t) => run_certify(&prepare(&t)?),
        Command::Index(t) => run_index(&prepare(&t)?),
        Command::Spectrum(t) => run_spectrum(&prepare(&t)?),
    }
}

fn run_analyze(run: &RunConfig) -> Result<(), Failure> {
    let cfg = run.analysis()?;
    let CaseStudy { model, fiber } = &run.case;
    let report = analyze(model, fiber, cfg);
    let dir = &run.output_dir;
    if run.formats.json {
        output::write_json(dir, "report.json", &report)?;
        output::write_json(dir, "crossings.json", &report.crossings)?;
        output::write_json(dir, "certificates.json", &report.certificates)?;
    }
    if run.formats.csv && !report.scan.is_empty() {
        output::write_scan_csv(dir, &report.scan, &report.levels)?;
    }
    for e in &report.errors {
        eprintln!("error in {}: {}", e.step, e.message);
    }
    match report.status {
        ReportStatus::Ok => Ok(()),
        ReportStatus::Degenerate => Err(Failure::Incomplete(format!(
            "analysis is degenerate (verdict {:?})",
            report.verdict
        ))),
        ReportStatus::Failed => Err(Failure::Incomplete(format!(
            "{} analysis steps failed",
            report.errors.len()
        ))),
    }
}

fn run_scan(run: &RunConfig) -> Result<(), Failure> {
    let cfg = run.analysis()?;
    let profile = scan(
        &run.case.model,
        &run.case.fiber,
        cfg.grid,
        cfg.degeneracy_tol,
    )?;
    if run.formats.csv {
        output::write_scan_csv(&run.output_dir, &profile.samples, &profile.levels)?;
    }
    degenerate_samples(profile.degenerate_samples())
}

fn run_index(run: &RunConfig) -> Result<(), Failure> {
    let cfg = run.analysis()?;
    let profile = scan(
        &run.case.model,
        &run.case.fiber,
        cfg.grid,
        cfg.degeneracy_tol,
    )?;
    if run.formats.csv {
        output::write_index_csv(&run.output_dir, &profile.samples)?;
    }
    degenerate_samples(profile.degenerate_samples())
}

fn degenerate_samples(count: usize) -> Result<(), Failure> {
    if count == 0 {
        Ok(())
    } else {
        Err(Failure::Incomplete(format!(
            "{count} grid points have a singular second variation"
        )))
    }
}

fn run_crossings(run: &RunConfig) -> Result<(), Failure> {
    let cfg = run.analysis()?;
    let g = cfg.grid;
    let set = find_crossings_banded(
        &run.case.model,
        &run.case.fiber,
        (g.r_min, g.r_max),
        g.points,
        cfg.tol,
        cfg.degeneracy_tol,
    )?;
    if run.formats.json {
        output::write_json(&run.output_dir, "crossings.json", &set.crossings)?;
    }
    for t in &set.touches {
        eprintln!(
            "note: h touches eigenvalue {} near r = {} without a detectable sign change",
            t.eigenvalue, t.r_approx
        );
    }
    Ok(())
}

fn run_certify(run: &RunConfig) -> Result<(), Failure> {
    let cfg = run.analysis()?;
    let CaseStudy { model, fiber } = &run.case;
    let mut certificates = vec![certify_no_bifurcation(
        model,
        fiber,
        cfg.grid,
        cfg.degeneracy_tol,
    )?];
    match certify_corsc(model, fiber, cfg.grid, cfg.degeneracy_tol) {
        Ok(c) => certificates.push(c),
        Err(AnalysisError::MissingFiberCurvature) => {
            eprintln!("note: no fiber curvature bounds, scalar-curvature certificate skipped")
        }
        Err(e) => return Err(e.into()),
    }
    if run.formats.json {
        output::write_json(&run.output_dir, "certificates.json", &certificates)?;
    }
    if certificates
        .iter()
        .any(|c| c.verdict == Verdict::InconclusiveDegenerate)
    {
        return Err(Failure::Incomplete(
            "a certificate is inconclusive: zero margin".into(),
        ));
    }
    Ok(())
}

fn run_spectrum(run: &RunConfig) -> Result<(), Failure> {
    let bound = match run.spectrum_bound {
        Some(b) => b,
        None => {
            // Default: everything that can matter on the scan grid.
            let cfg = run.analysis()?;
            let profile = scan(
                &run.case.model,
                &run.case.fiber,
                cfg.grid,
                cfg.degeneracy_tol,
            )?;
            let h_max = profile.samples.iter().map(|s| s.h).fold(0.0, f64::max);
            h_max.max(
                run.case
                    .fiber
                    .first_nonzero()
                    .map_err(AnalysisError::from)?
                    .value,
            )
        }
    };
    let levels = run
        .case
        .fiber
        .levels_up_to(bound)
        .map_err(AnalysisError::from)?;
    if run.formats.csv {
        output::write_spectrum_csv(&run.output_dir, &levels)?;
    }
    Ok(())
}
