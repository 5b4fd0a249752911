//! Heuristic classification of `α̇² - α̈α` near an endpoint.
//!
//! If it tends to `+∞` at an end of the domain, `h` eventually exceeds every
//! fiber eigenvalue and the family has infinitely many bifurcation points.
//! A limit cannot be verified from finitely many samples, so monotone escape
//! past a threshold is used as the proxy.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::warpcore::WarpedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceClass {
    Divergent,
    Bounded,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    pub samples: usize,
    /// Ratio between successive distances to the endpoint, in `(0, 1)`.
    pub growth_factor: f64,
    pub threshold: f64,
}

impl DivergenceConfig {
    pub const DEFAULT_SAMPLES: usize = 24;
    pub const DEFAULT_GROWTH_FACTOR: f64 = 0.5;
    pub const MIN_SAMPLES: usize = 8;

    /// Defaults with threshold `10³ · μ̂₁`.
    pub fn for_first_eigenvalue(mu1: f64) -> Self {
        DivergenceConfig {
            samples: Self::DEFAULT_SAMPLES,
            growth_factor: Self::DEFAULT_GROWTH_FACTOR,
            threshold: 1e3 * mu1,
        }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if self.samples < Self::MIN_SAMPLES {
            return Err(AnalysisError::InvalidConfig(format!(
                "divergence test needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                self.samples
            )));
        }
        if !(self.growth_factor > 0.0 && self.growth_factor < 1.0) {
            return Err(AnalysisError::InvalidConfig(format!(
                "growth_factor must lie in (0, 1), got {}",
                self.growth_factor
            )));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(AnalysisError::InvalidConfig(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub end: Endpoint,
    pub class: DivergenceClass,
    /// `(r, α̇² - α̈α)` in order of approach.
    pub samples: Vec<(f64, f64)>,
}

/// Radii approaching `end` of the usable range: distances to a finite end
/// shrink by `growth_factor`, distances to an infinite end grow by its
/// reciprocal.
fn approach(model: &WarpedModel, end: Endpoint, config: &DivergenceConfig) -> Vec<f64> {
    let (lo, hi) = model.usable_range();
    let g = config.growth_factor;
    let steps = 0..config.samples as i32;
    match (end, lo.is_finite(), hi.is_finite()) {
        (Endpoint::Lower, true, _) | (Endpoint::Upper, _, true) => {
            let (e, toward) = if end == Endpoint::Lower {
                (lo, 1.0)
            } else {
                (hi, -1.0)
            };
            let d0 = if lo.is_finite() && hi.is_finite() {
                0.5 * (hi - lo)
            } else {
                e.abs().max(1.0)
            };
            steps.map(|k| e + toward * d0 * g.powi(k)).collect()
        }
        _ => {
            // Infinite end: march away from a finite anchor.
            let (anchor, away) = match end {
                Endpoint::Lower => (if hi.is_finite() { hi } else { 0.0 }, -1.0),
                Endpoint::Upper => (if lo.is_finite() { lo } else { 0.0 }, 1.0),
            };
            let d0 = anchor.abs().max(1.0);
            steps.map(|k| anchor + away * d0 * g.powi(-k)).collect()
        }
    }
}

pub fn divergence_test(
    model: &WarpedModel,
    end: Endpoint,
    config: &DivergenceConfig,
) -> Result<DivergenceResult, AnalysisError> {
    config.validate()?;
    let mut samples = Vec::with_capacity(config.samples);
    for r in approach(model, end, config) {
        let v = model.stability_jet(r)?.defect();
        if !v.is_finite() {
            break;
        }
        samples.push((r, v));
    }
    let class = classify(&samples, config.threshold);
    Ok(DivergenceResult {
        end,
        class,
        samples,
    })
}

fn classify(samples: &[(f64, f64)], threshold: f64) -> DivergenceClass {
    if samples.len() < DivergenceConfig::MIN_SAMPLES {
        return DivergenceClass::Undetermined;
    }
    let tail = &samples[samples.len() / 2..];
    let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    let last = tail[tail.len() - 1].1;
    if increasing && last > threshold {
        DivergenceClass::Divergent
    } else if samples.iter().all(|s| s.1.abs() <= threshold) {
        DivergenceClass::Bounded
    } else {
        DivergenceClass::Undetermined
    }
}
