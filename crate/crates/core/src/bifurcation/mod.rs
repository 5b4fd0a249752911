//! Rigidity and bifurcation decisions for the slice family `{r} × P`.
//!
//! With `h(r) = (n-1)(α̇² - α̈α)` the Jacobi operator of the slice, restricted
//! to volume-preserving variations, has eigenvalues
//!
//! ```text
//! μ̄ᵢ(r) = (μ̂ᵢ - h(r)) / α²(r),   i ≥ 1,
//! ```
//!
//! where `μ̂ᵢ` runs over the nonzero fiber eigenvalues. The zero mode is never
//! shifted: constants violate the zero-mean constraint. The Morse index at `r`
//! is the number of `μ̂ᵢ < h(r)` counted with multiplicity, and the index can
//! only change where `h` crosses a fiber eigenvalue.

mod certify;
mod crossings;
mod divergence;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::RootError;
use crate::spectra::{FiberSpectrum, SpectralLevel, SpectrumError};
use crate::warpcore::{GeometryError, WarpedModel};

pub use certify::{
    certify_corsc, certify_no_bifurcation, check_general_rigidity, CertificateScope,
    GeneralRigidityData, HypersurfaceRicci, RigidityCertificate, RigidityCriterion, Verdict,
};
pub use crossings::{
    find_crossings, find_crossings_banded, CrossingEvent, CrossingSet, Direction, TouchEvent,
};
pub use divergence::{
    divergence_test, DivergenceClass, DivergenceConfig, DivergenceResult, Endpoint,
};
pub use report::{
    analyze, scan, AnalysisConfig, BifurcationReport, DivergenceSettings, DivergenceSummary,
    ReportStatus, ScanProfile, ScanSample, StepError, SummaryVerdict,
};

/// Default relative band around `h(r) = μ̂` treated as a singular second
/// variation.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Default bracket width for located crossings.
pub const DEFAULT_CROSSING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectrum(SpectrumError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("the zero fiber eigenvalue has no shifted counterpart (constants are not admissible)")]
    ZeroModeQueried,
    #[error("{value} is not an eigenvalue of the fiber")]
    NotInSpectrum { value: f64 },
    #[error("second variation is singular at r = {r}: h = {h} is within tolerance of eigenvalue {eigenvalue}")]
    DegeneratePoint { r: f64, h: f64, eigenvalue: f64 },
    #[error(
        "endpoint r = {r} is degenerate: h = {h} is within tolerance of eigenvalue {eigenvalue}"
    )]
    DegenerateEndpoint { r: f64, h: f64, eigenvalue: f64 },
    #[error("fiber spectrum is needed up to {requested} but only known up to {available}")]
    SpectrumBoundExceeded { requested: f64, available: f64 },
    #[error("model carries no fiber scalar-curvature bounds")]
    MissingFiberCurvature,
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),
    #[error("{name} must be positive and finite, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("invalid rigidity data: {0}")]
    InvalidData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl From<SpectrumError> for AnalysisError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::BoundExceedsData {
                requested,
                available,
            } => AnalysisError::SpectrumBoundExceeded {
                requested,
                available,
            },
            other => AnalysisError::Spectrum(other),
        }
    }
}

/// `points` equally spaced radii from `r_min` to `r_max`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self, AnalysisError> {
        let grid = GridSpec {
            r_min,
            r_max,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.points < 2 {
            return Err(AnalysisError::InvalidGrid(self.points));
        }
        if !(self.r_min.is_finite() && self.r_max.is_finite() && self.r_min < self.r_max) {
            return Err(AnalysisError::InvalidInterval {
                a: self.r_min,
                b: self.r_max,
            });
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == last {
                    self.r_max
                } else {
                    let t = k as f64 / last as f64;
                    self.r_min + (self.r_max - self.r_min) * t
                }
            })
            .collect()
    }
}

pub(crate) fn check_tolerance(name: &'static str, value: f64) -> Result<(), AnalysisError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::InvalidTolerance { name, value })
    }
}

/// Width of the degeneracy band around `x`.
pub(crate) fn band(tol: f64, x: f64) -> f64 {
    tol * x.abs().max(1.0)
}

/// `h` at every radius, evaluated in parallel and merged in input order.
pub(crate) fn sample_h(model: &WarpedModel, radii: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    radii
        .par_iter()
        .map(|&r| model.stability_h(r).map_err(AnalysisError::from))
        .collect()
}

/// Nonzero fiber levels with running multiplicity totals.
#[derive(Debug, Clone)]
pub(crate) struct LevelTable {
    levels: Vec<SpectralLevel>,
    cumulative: Vec<u64>,
}

impl LevelTable {
    /// All nonzero levels `≤ bound` (nothing when `bound < 0`).
    pub(crate) fn up_to(spec: &FiberSpectrum, bound: f64) -> Result<Self, AnalysisError> {
        let levels: Vec<SpectralLevel> = if bound > 0.0 {
            spec.levels_up_to(bound)?
                .into_iter()
                .filter(|l| l.value > 0.0)
                .collect()
        } else {
            Vec::new()
        };
        let mut total = 0;
        let cumulative = levels
            .iter()
            .map(|l| {
                total += l.multiplicity;
                total
            })
            .collect();
        Ok(LevelTable { levels, cumulative })
    }

    pub(crate) fn levels(&self) -> &[SpectralLevel] {
        &self.levels
    }

    /// Morse index for stability value `h`, or the offending level if `h` is
    /// within `tol` (relative) of one. Valid only for `h` below the table
    /// bound.
    pub(crate) fn index(&self, h: f64, tol: f64) -> Result<u64, SpectralLevel> {
        let width = band(tol, h);
        let below = self.levels.partition_point(|l| l.value < h);
        for candidate in [below.checked_sub(1), Some(below)].into_iter().flatten() {
            if let Some(l) = self.levels.get(candidate) {
                if (l.value - h).abs() <= width {
                    return Err(*l);
                }
            }
        }
        Ok(if below == 0 {
            0
        } else {
            self.cumulative[below - 1]
        })
    }
}

/// `μ̄ = (μ̂ - h(r)) / α²(r)` for a distinct nonzero fiber eigenvalue `μ̂`.
pub fn shifted_eigenvalue(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    value: f64,
    r: f64,
) -> Result<f64, AnalysisError> {
    if value == 0.0 {
        return Err(AnalysisError::ZeroModeQueried);
    }
    let known = value.is_finite()
        && value > 0.0
        && spec
            .levels_up_to(value)?
            .iter()
            .any(|l| (l.value - value).abs() <= 1e-12 * value);
    if !known {
        return Err(AnalysisError::NotInSpectrum { value });
    }
    let jet = model.stability_jet(r)?;
    let h = (model.n() - 1) as f64 * jet.defect();
    Ok((value - h) / jet.alpha_sq)
}

/// Number of negative Jacobi eigenvalues at `r`, with multiplicity.
///
/// Fails with [`AnalysisError::DegeneratePoint`] when some nonzero `μ̂` lies
/// within `degeneracy_tol · max(1, |h|)` of `h(r)`.
pub fn morse_index(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    r: f64,
    degeneracy_tol: f64,
) -> Result<u64, AnalysisError> {
    check_tolerance("degeneracy_tol", degeneracy_tol)?;
    let h = model.stability_h(r)?;
    let table = LevelTable::up_to(spec, h + band(degeneracy_tol, h))?;
    table
        .index(h, degeneracy_tol)
        .map_err(|l| AnalysisError::DegeneratePoint {
            r,
            h,
            eigenvalue: l.value,
        })
}

/// A fiber eigenvalue whose shifted eigenvalue changes sign between two
/// nondegenerate radii, with the Morse indices at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexWitness {
    pub eigenvalue: f64,
    pub index_a: u64,
    pub index_b: u64,
}

/// Checks the index-change test between `r_a < r_b`: both ends must be
/// nondegenerate, and if their Morse indices differ the smallest fiber
/// eigenvalue strictly between `h(r_a)` and `h(r_b)` is returned as witness.
/// A witness guarantees a bifurcation point in `(r_a, r_b)`.
pub fn index_witness(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    r_a: f64,
    r_b: f64,
    degeneracy_tol: f64,
) -> Result<Option<IndexWitness>, AnalysisError> {
    if r_a.is_nan() || r_b.is_nan() || r_a >= r_b {
        return Err(AnalysisError::InvalidInterval { a: r_a, b: r_b });
    }
    let endpoint = |r: f64| {
        morse_index(model, spec, r, degeneracy_tol).map_err(|e| match e {
            AnalysisError::DegeneratePoint { r, h, eigenvalue } => {
                AnalysisError::DegenerateEndpoint { r, h, eigenvalue }
            }
            other => other,
        })
    };
    let index_a = endpoint(r_a)?;
    let index_b = endpoint(r_b)?;
    if index_a == index_b {
        return Ok(None);
    }
    let (h_a, h_b) = (model.stability_h(r_a)?, model.stability_h(r_b)?);
    let (lo, hi) = if h_a < h_b { (h_a, h_b) } else { (h_b, h_a) };
    let witness = LevelTable::up_to(spec, hi)?
        .levels()
        .iter()
        .find(|l| l.value > lo && l.value < hi)
        .map(|l| IndexWitness {
            eigenvalue: l.value,
            index_a,
            index_b,
        });
    Ok(witness)
}
