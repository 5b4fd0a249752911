//! TOML run configuration.
//!
//! ```toml
//! [model]
//! kind = "schwarzschild"      # or a catalog name
//! mass = 1.0                  # K
//! cosmological = -1.0         # E
//!
//! [fiber]                     # optional, defaults to the model's fiber
//! kind = "sphere"             # sphere | torus | explicit
//!
//! [scan]
//! r_min = -1.45
//! r_max = -0.21
//! points = 2000
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json"]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::bifurcation::{AnalysisConfig, AnalysisError, DivergenceSettings, GridSpec};
use crate::models::{
    catalog_model, schwarzschild_model, CaseStudy, CatalogParams, ModelError, SchwarzschildParams,
};
use crate::spectra::{DualLatticeBasis, FiberSpectrum, SpectrumError};
use crate::warpcore::{CurvatureBounds, GeometryError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("invalid fiber: {0}")]
    Fiber(#[from] SpectrumError),
    #[error("invalid model: {0}")]
    Geometry(#[from] GeometryError),
    #[error("invalid scan: {0}")]
    Scan(#[from] AnalysisError),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelSection,
    pub fiber: Option<FiberSection>,
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: String,
    #[serde(alias = "K")]
    pub mass: Option<f64>,
    #[serde(alias = "E")]
    pub cosmological: Option<f64>,
    pub n: Option<usize>,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub coefficient: Option<f64>,
    pub exponent: Option<f64>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum CurvatureSpec {
    Constant(f64),
    Range([f64; 2]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub kind: String,
    pub dim: Option<usize>,
    pub basis: Option<Vec<Vec<f64>>>,
    pub values: Option<Vec<f64>>,
    pub multiplicities: Option<Vec<u64>>,
    pub scalar_curvature: Option<CurvatureSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Distance kept from the domain ends.
    pub epsilon: Option<f64>,
    pub tol: Option<f64>,
    pub degeneracy_tol: Option<f64>,
    pub divergence_samples: Option<usize>,
    pub growth_factor: Option<f64>,
    pub divergence_threshold: Option<f64>,
    /// Upper bound for the `spectrum` command.
    pub spectrum_bound: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

/// A validated run: the model, its fiber, the scan setup and where to write.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseStudy,
    pub analysis: Option<AnalysisConfig>,
    pub spectrum_bound: Option<f64>,
    pub output_dir: PathBuf,
    pub formats: Formats,
}

impl RunConfig {
    pub fn analysis(&self) -> Result<&AnalysisConfig, ConfigError> {
        self.analysis
            .as_ref()
            .ok_or_else(|| invalid("this command needs a [scan] section"))
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ConfigFile = toml::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build(file, base)
}

/// Relative output directories are resolved against `base`, normally the
/// directory holding the config file.
pub fn build(file: ConfigFile, base: &Path) -> Result<RunConfig, ConfigError> {
    let mut case = build_model(&file.model, file.fiber.as_ref())?;
    if let Some(fiber) = &file.fiber {
        apply_fiber(&mut case, fiber)?;
    }
    if let Some(label) = &file.model.label {
        case.model = case.model.clone().with_label(label.clone());
    }

    let (analysis, spectrum_bound) = match &file.scan {
        Some(scan) => {
            if let Some(eps) = scan.epsilon {
                case.model = case.model.clone().with_endpoint_margin(eps)?;
            }
            let cfg = build_analysis(scan)?;
            case.model.check_radius(cfg.grid.r_min)?;
            case.model.check_radius(cfg.grid.r_max)?;
            (Some(cfg), scan.spectrum_bound)
        }
        None => (None, None),
    };
    if let Some(b) = spectrum_bound {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(invalid(format!(
                "spectrum_bound must be non-negative, got {b}"
            )));
        }
    }

    let formats = match &file.output.formats {
        None => Formats {
            csv: true,
            json: true,
        },
        Some(list) => {
            let mut f = Formats {
                csv: false,
                json: false,
            };
            for name in list {
                match name.as_str() {
                    "csv" => f.csv = true,
                    "json" => f.json = true,
                    other => return Err(invalid(format!("unknown output format {other:?}"))),
                }
            }
            f
        }
    };
    let dir = file
        .output
        .directory
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let output_dir = if dir.is_absolute() {
        dir
    } else {
        base.join(dir)
    };
    Ok(RunConfig {
        case,
        analysis,
        spectrum_bound,
        output_dir,
        formats,
    })
}

fn build_model(m: &ModelSection, fiber: Option<&FiberSection>) -> Result<CaseStudy, ConfigError> {
    if m.kind == "schwarzschild" {
        if let Some(n) = m.n.filter(|&n| n != 3) {
            return Err(invalid(format!(
                "the schwarzschild model is 3-dimensional, got n = {n}"
            )));
        }
        if m.r_lo.is_some() || m.r_hi.is_some() || m.coefficient.is_some() || m.exponent.is_some() {
            return Err(invalid("schwarzschild takes only mass and cosmological"));
        }
        let mass = m.mass.ok_or_else(|| invalid("schwarzschild needs mass"))?;
        let params = SchwarzschildParams::new(mass, m.cosmological.unwrap_or(0.0));
        return Ok(schwarzschild_model(params)?);
    }

    if m.mass.is_some() || m.cosmological.is_some() {
        return Err(invalid(format!(
            "{} takes no mass or cosmological constant",
            m.kind
        )));
    }
    let lo = m.r_lo.ok_or_else(|| invalid("catalog models need r_lo"))?;
    let hi = m.r_hi.ok_or_else(|| invalid("catalog models need r_hi"))?;
    let mut params = CatalogParams::new(m.n.unwrap_or(3), lo, hi);
    params.coefficient = m.coefficient;
    params.exponent = m.exponent;
    // The cusp builds its torus fiber from the lattice.
    if let Some(f) = fiber.filter(|f| f.kind == "torus") {
        if let Some(rows) = &f.basis {
            params.dual_basis = Some(DualLatticeBasis::new(rows.clone())?);
        }
    }
    Ok(catalog_model(&m.kind, &params)?)
}

fn apply_fiber(case: &mut CaseStudy, f: &FiberSection) -> Result<(), ConfigError> {
    let m = case.model.n() - 1;
    let (fiber, default_curvature) = match f.kind.as_str() {
        "sphere" => {
            let dim = f.dim.unwrap_or(m);
            if dim != m {
                return Err(invalid(format!(
                    "sphere fiber must have dimension n - 1 = {m}, got {dim}"
                )));
            }
            (
                FiberSpectrum::sphere(dim)?,
                Some(CurvatureBounds::constant((m * (m - 1)) as f64)),
            )
        }
        "torus" => {
            let dual = match &f.basis {
                Some(rows) => DualLatticeBasis::new(rows.clone())?,
                None => DualLatticeBasis::identity(f.dim.unwrap_or(m)),
            };
            if dual.dim() != m {
                return Err(invalid(format!(
                    "torus fiber must have dimension n - 1 = {m}, got {}",
                    dual.dim()
                )));
            }
            (
                FiberSpectrum::torus(dual),
                Some(CurvatureBounds::constant(0.0)),
            )
        }
        "explicit" => {
            let values = f
                .values
                .as_ref()
                .ok_or_else(|| invalid("explicit fiber needs values"))?;
            let mults = match &f.multiplicities {
                Some(mults) if mults.len() == values.len() => mults.clone(),
                Some(mults) => {
                    return Err(invalid(format!(
                        "{} values but {} multiplicities",
                        values.len(),
                        mults.len()
                    )))
                }
                None => vec![1; values.len()],
            };
            let pairs: Vec<(f64, u64)> = values.iter().copied().zip(mults).collect();
            (FiberSpectrum::explicit(&pairs)?, None)
        }
        other => return Err(invalid(format!("unknown fiber kind {other:?}"))),
    };
    let curvature = match f.scalar_curvature {
        Some(CurvatureSpec::Constant(v)) => Some(CurvatureBounds::constant(v)),
        Some(CurvatureSpec::Range([lo, hi])) => {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(invalid(format!(
                    "scalar_curvature range [{lo}, {hi}] is reversed"
                )));
            }
            Some(CurvatureBounds { min: lo, max: hi })
        }
        None => default_curvature,
    };
    case.fiber = fiber;
    let model = case.model.clone().without_fiber_scalar_curvature();
    case.model = match curvature {
        Some(c) => model.with_fiber_scalar_curvature(c),
        None => model,
    };
    Ok(())
}

fn build_analysis(s: &ScanSection) -> Result<AnalysisConfig, ConfigError> {
    let mut cfg = AnalysisConfig::new(GridSpec::new(s.r_min, s.r_max, s.points)?);
    if let Some(t) = s.tol {
        cfg.tol = t;
    }
    if let Some(t) = s.degeneracy_tol {
        cfg.degeneracy_tol = t;
    }
    let d = DivergenceSettings::default();
    cfg.divergence = DivergenceSettings {
        samples: s.divergence_samples.unwrap_or(d.samples),
        growth_factor: s.growth_factor.unwrap_or(d.growth_factor),
        threshold: s.divergence_threshold,
    };
    cfg.validate()?;
    Ok(cfg)
}
