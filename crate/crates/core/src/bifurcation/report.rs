//! The full pipeline: scan, crossings, certificates and endpoint behaviour.

use serde::{Deserialize, Serialize};

use super::{
    band, certify_corsc, certify_no_bifurcation, check_tolerance, divergence_test,
    find_crossings_banded, sample_h, AnalysisError, CrossingEvent, DivergenceClass,
    DivergenceConfig, DivergenceResult, Endpoint, GridSpec, LevelTable, RigidityCertificate,
    TouchEvent, Verdict, DEFAULT_CROSSING_TOL, DEFAULT_DEGENERACY_TOL,
};
use crate::spectra::{FiberSpectrum, SpectralLevel};
use crate::warpcore::WarpedModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSettings {
    pub samples: usize,
    pub growth_factor: f64,
    /// Defaults to `10³ · μ̂₁` when absent.
    pub threshold: Option<f64>,
}

impl Default for DivergenceSettings {
    fn default() -> Self {
        DivergenceSettings {
            samples: DivergenceConfig::DEFAULT_SAMPLES,
            growth_factor: DivergenceConfig::DEFAULT_GROWTH_FACTOR,
            threshold: None,
        }
    }
}

impl DivergenceSettings {
    pub fn resolve(&self, mu1: f64) -> DivergenceConfig {
        DivergenceConfig {
            samples: self.samples,
            growth_factor: self.growth_factor,
            threshold: self.threshold.unwrap_or(1e3 * mu1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub grid: GridSpec,
    pub tol: f64,
    pub degeneracy_tol: f64,
    pub divergence: DivergenceSettings,
}

impl AnalysisConfig {
    pub fn new(grid: GridSpec) -> Self {
        AnalysisConfig {
            grid,
            tol: DEFAULT_CROSSING_TOL,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            divergence: DivergenceSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        self.grid.validate()?;
        check_tolerance("tol", self.tol)?;
        check_tolerance("degeneracy_tol", self.degeneracy_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub r: f64,
    pub h: f64,
    pub alpha_sq: f64,
    /// `None` where `h` sits inside the degeneracy band of a level.
    pub morse_index: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanProfile {
    pub samples: Vec<ScanSample>,
    /// Nonzero fiber levels up to the largest sampled `h`.
    pub levels: Vec<SpectralLevel>,
}

impl ScanProfile {
    pub fn degenerate_samples(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.morse_index.is_none())
            .count()
    }
}

/// `h`, `α²` and the Morse index at every grid node.
pub fn scan(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    grid: GridSpec,
    degeneracy_tol: f64,
) -> Result<ScanProfile, AnalysisError> {
    check_tolerance("degeneracy_tol", degeneracy_tol)?;
    grid.validate()?;
    model.check_radius(grid.r_min)?;
    model.check_radius(grid.r_max)?;
    let nodes = grid.nodes();
    let hs = sample_h(model, &nodes)?;
    let h_max = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let table = LevelTable::up_to(spec, h_max + band(degeneracy_tol, h_max))?;

    let samples = nodes
        .iter()
        .zip(&hs)
        .map(|(&r, &h)| {
            Ok(ScanSample {
                r,
                h,
                alpha_sq: model.stability_jet(r)?.alpha_sq,
                morse_index: table.index(h, degeneracy_tol).ok(),
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let levels = table
        .levels()
        .iter()
        .copied()
        .filter(|l| l.value <= h_max)
        .collect();
    Ok(ScanProfile { samples, levels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryVerdict {
    RigidCertified,
    BifurcationFound,
    Degenerate,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Ok,
    /// The second variation is singular somewhere in the scan.
    Degenerate,
    /// At least one step failed; its error is recorded.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepError {
    pub step: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSummary {
    pub lower: Option<DivergenceResult>,
    pub upper: Option<DivergenceResult>,
}

impl DivergenceSummary {
    pub fn any_divergent(&self) -> bool {
        [&self.lower, &self.upper]
            .into_iter()
            .flatten()
            .any(|d| d.class == DivergenceClass::Divergent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationReport {
    pub status: ReportStatus,
    pub label: String,
    pub n: usize,
    pub domain: (f64, f64),
    pub warnings: Vec<String>,
    pub config: AnalysisConfig,
    pub scan: Vec<ScanSample>,
    pub levels: Vec<SpectralLevel>,
    pub crossings: Vec<CrossingEvent>,
    pub touches: Vec<TouchEvent>,
    pub certificates: Vec<RigidityCertificate>,
    pub divergence: DivergenceSummary,
    pub verdict: SummaryVerdict,
    pub notes: Vec<String>,
    pub errors: Vec<StepError>,
}

/// Runs every step, recording failures instead of aborting.
pub fn analyze(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    config: &AnalysisConfig,
) -> BifurcationReport {
    let mut errors = Vec::new();
    let mut record = |step: &str, e: AnalysisError| {
        errors.push(StepError {
            step: step.to_string(),
            message: e.to_string(),
        });
    };
    if let Err(e) = config.validate() {
        record("config", e);
    }
    let grid = config.grid;
    let tol = config.degeneracy_tol;

    let profile = scan(model, spec, grid, tol)
        .map_err(|e| record("scan", e))
        .ok();
    let crossings = find_crossings_banded(
        model,
        spec,
        (grid.r_min, grid.r_max),
        grid.points,
        config.tol,
        tol,
    )
    .map_err(|e| record("crossings", e))
    .ok()
    .unwrap_or_default();

    let mut certificates = Vec::new();
    let mut notes = Vec::new();
    match certify_no_bifurcation(model, spec, grid, tol) {
        Ok(c) => certificates.push(c),
        Err(e) => record("certify_spectral_gap", e),
    }
    match certify_corsc(model, spec, grid, tol) {
        Ok(c) => certificates.push(c),
        Err(AnalysisError::MissingFiberCurvature) => notes
            .push("scalar-curvature certificate skipped: no fiber curvature bounds".to_string()),
        Err(e) => record("certify_scalar_curvature", e),
    }

    let mut divergence = DivergenceSummary {
        lower: None,
        upper: None,
    };
    match spec.first_nonzero() {
        Ok(mu1) => {
            let cfg = config.divergence.resolve(mu1.value);
            for end in [Endpoint::Lower, Endpoint::Upper] {
                match divergence_test(model, end, &cfg) {
                    Ok(d) if end == Endpoint::Lower => divergence.lower = Some(d),
                    Ok(d) => divergence.upper = Some(d),
                    Err(e) => record(
                        if end == Endpoint::Lower {
                            "divergence_lower"
                        } else {
                            "divergence_upper"
                        },
                        e,
                    ),
                }
            }
        }
        Err(e) => record("divergence", e.into()),
    }

    let degenerate_samples = profile.as_ref().map_or(0, |p| p.degenerate_samples());
    let certified = certificates.iter().any(|c| c.verdict == Verdict::Certified);
    let inconclusive = certificates
        .iter()
        .any(|c| c.verdict == Verdict::InconclusiveDegenerate);
    let verdict = if !crossings.crossings.is_empty() {
        SummaryVerdict::BifurcationFound
    } else if certified {
        SummaryVerdict::RigidCertified
    } else if inconclusive || degenerate_samples > 0 || !crossings.touches.is_empty() {
        SummaryVerdict::Degenerate
    } else {
        SummaryVerdict::Inconclusive
    };

    if certified {
        notes.push(
            "rigidity certificates hold at the sampled grid nodes, not over the continuum"
                .to_string(),
        );
    }
    if degenerate_samples > 0 {
        notes.push(format!(
            "{degenerate_samples} scan samples have a singular second variation"
        ));
    }
    if !crossings.touches.is_empty() {
        notes.push(format!(
            "{} tangencies of h with fiber levels: existence of bifurcation there is undecided",
            crossings.touches.len()
        ));
    }
    for d in [&divergence.lower, &divergence.upper].into_iter().flatten() {
        if d.class == DivergenceClass::Divergent {
            let end = if d.end == Endpoint::Lower {
                "lower"
            } else {
                "upper"
            };
            notes.push(format!(
                "α̇² - α̈α grows without bound toward the {end} end: infinitely many bifurcation points accumulate there"
            ));
        }
    }

    let status = if !errors.is_empty() {
        ReportStatus::Failed
    } else if verdict == SummaryVerdict::Degenerate {
        ReportStatus::Degenerate
    } else {
        ReportStatus::Ok
    };
    let domain = model.domain();
    BifurcationReport {
        status,
        label: model.label().to_string(),
        n: model.n(),
        domain: (domain.lo, domain.hi),
        warnings: model.warnings().to_vec(),
        config: *config,
        scan: profile
            .as_ref()
            .map(|p| p.samples.clone())
            .unwrap_or_default(),
        levels: profile.map(|p| p.levels).unwrap_or_default(),
        crossings: crossings.crossings,
        touches: crossings.touches,
        certificates,
        divergence,
        verdict,
        notes,
        errors,
    }
}
