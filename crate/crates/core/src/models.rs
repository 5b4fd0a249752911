//! Named warped products: the Schwarzschild-type spatial slices
//! `ψ⁻² dr² + r² g^{S²}` with `ψ² = 1 - 2K/r + E r²`, and a small catalog of
//! geodesic-form examples.

use serde::Serialize;
use thiserror::Error;

use crate::roots::{self, RootError, Stop};
use crate::spectra::{DualLatticeBasis, FiberSpectrum, SpectrumError};
use crate::warpcore::{CurvatureBounds, GeometryError, WarpedModel, WarpingFunction};

/// Relative width at which horizon brackets stop shrinking.
pub const HORIZON_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("black hole mass K must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("cosmological constant E must be finite, got {0}")]
    InvalidCosmologicalConstant(f64),
    #[error("could not bracket the horizon radius for K = {mass}, E = {cosmological}")]
    RootNotFound { mass: f64, cosmological: f64 },
    #[error("unknown catalog model {0:?}")]
    UnknownModel(String),
    #[error("invalid catalog parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// A model together with its fiber spectrum.
#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub model: WarpedModel,
    pub fiber: FiberSpectrum,
}

/// Mass `K > 0` and cosmological constant `E` of the 3-dimensional
/// Schwarzschild-type slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzschildParams {
    pub mass: f64,
    pub cosmological: f64,
}

impl SchwarzschildParams {
    pub fn new(mass: f64, cosmological: f64) -> Self {
        SchwarzschildParams { mass, cosmological }
    }

    pub fn psi_sq(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.mass / r + self.cosmological * r * r
    }

    pub fn dpsi_sq(&self, r: f64) -> f64 {
        2.0 * self.mass / (r * r) + 2.0 * self.cosmological * r
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(ModelError::InvalidMass(self.mass));
        }
        if !self.cosmological.is_finite() {
            return Err(ModelError::InvalidCosmologicalConstant(self.cosmological));
        }
        Ok(())
    }
}

/// The horizon `r̂`, a zero of `ψ²` bounding the maximal domain: the unique
/// positive root when `E ≥ 0`, the unique negative root when `E < 0`.
///
/// Bisection runs on `r ψ²(r) = E r³ + r - 2K`, which has the same roots and
/// no pole.
pub fn horizon_radius(p: &SchwarzschildParams) -> Result<f64, ModelError> {
    p.validate()?;
    let (k, e) = (p.mass, p.cosmological);
    let cubic = |r: f64| Ok::<_, RootError>(e * r * r * r + r - 2.0 * k);
    let not_found = || ModelError::RootNotFound {
        mass: k,
        cosmological: e,
    };

    let (lo, hi) = if e == 0.0 {
        (k, 4.0 * k)
    } else if e > 0.0 {
        // Increasing for r > 0 with value -2K at 0; expand until positive.
        let mut hi = (4.0 * k).max((2.0 * k / e).sqrt() + 1.0);
        let mut tries = 0;
        while cubic(hi)? <= 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 2000 {
                return Err(not_found());
            }
        }
        (f64::MIN_POSITIVE, hi)
    } else {
        // Negative side: +∞ as r → -∞, -2K at 0 and a single sign change,
        // left of the local minimum at -1/√(3|E|).
        let mut lo = -(1.0 / (3.0 * e.abs()).sqrt()).max(1.0);
        let mut tries = 0;
        while cubic(lo)? <= 0.0 {
            lo *= 2.0;
            tries += 1;
            if tries > 2000 {
                return Err(not_found());
            }
        }
        (lo, -f64::MIN_POSITIVE)
    };

    let bracket = roots::bisect(cubic, lo, hi, Stop::Relative(HORIZON_REL_TOL))?;
    Ok(bracket.midpoint())
}

/// The spatial Schwarzschild-type slice in graph form on its maximal domain,
/// with the unit 2-sphere as fiber (`R(x) = 2`).
///
/// For `E < 0` the domain is `(r̂, 0)` with `r̂ < 0`, taken literally; the
/// model carries a warning saying so.
pub fn schwarzschild_model(p: SchwarzschildParams) -> Result<CaseStudy, ModelError> {
    let horizon = horizon_radius(&p)?;
    let (lo, hi) = if p.cosmological >= 0.0 {
        (horizon, f64::INFINITY)
    } else {
        (horizon, 0.0)
    };
    let warp = WarpingFunction::graph(move |r| p.psi_sq(r), move |r| p.dpsi_sq(r), lo, hi)?;
    let label = format!("schwarzschild K={} E={}", p.mass, p.cosmological);
    let mut model = WarpedModel::new(3, warp, label)?
        .with_fiber_scalar_curvature(CurvatureBounds::constant(2.0));
    if p.cosmological < 0.0 {
        model = model.with_warning(format!(
            "negative radial coordinate: domain ({horizon}, 0) is used as given, with alpha = |r|"
        ));
    }
    Ok(CaseStudy {
        model,
        fiber: FiberSpectrum::sphere(2)?,
    })
}

/// Parameters for [`catalog_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogParams {
    pub n: usize,
    pub domain: (f64, f64),
    /// Dual lattice of the torus fiber (`desitter_cusp`); defaults to `Z^{n-1}`.
    pub dual_basis: Option<DualLatticeBasis>,
    /// `C` in `α = C r^k` (`power_law`).
    pub coefficient: Option<f64>,
    /// `k` in `α = C r^k` (`power_law`).
    pub exponent: Option<f64>,
}

impl CatalogParams {
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        CatalogParams {
            n,
            domain: (lo, hi),
            dual_basis: None,
            coefficient: None,
            exponent: None,
        }
    }
}

pub const CATALOG_NAMES: [&str; 4] = [
    "pseudo_hyperbolic",
    "hyperbolic_sinh",
    "desitter_cusp",
    "power_law",
];

/// Geodesic-form catalog examples:
///
/// | name                | α        | fiber       |
/// |---------------------|----------|-------------|
/// | `pseudo_hyperbolic` | `e^r`    | `S^{n-1}`   |
/// | `hyperbolic_sinh`   | `sinh r` | `S^{n-1}`   |
/// | `desitter_cusp`     | `e^r`    | flat torus  |
/// | `power_law`         | `C r^k`  | `S^{n-1}`   |
pub fn catalog_model(name: &str, params: &CatalogParams) -> Result<CaseStudy, ModelError> {
    let n = params.n;
    if n < 2 {
        return Err(ModelError::InvalidParams(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let (lo, hi) = params.domain;
    let m = n - 1;
    let sphere_curvature = CurvatureBounds::constant((m * (m.saturating_sub(1))) as f64);

    let (warp, fiber, curvature) = match name {
        "pseudo_hyperbolic" => (
            WarpingFunction::geodesic(f64::exp, f64::exp, f64::exp, lo, hi)?,
            FiberSpectrum::sphere(m)?,
            sphere_curvature,
        ),
        "hyperbolic_sinh" => {
            if lo < 0.0 {
                return Err(ModelError::InvalidParams(
                    "sinh r needs a domain inside (0, ∞)".into(),
                ));
            }
            (
                WarpingFunction::geodesic(f64::sinh, f64::cosh, f64::sinh, lo, hi)?,
                FiberSpectrum::sphere(m)?,
                sphere_curvature,
            )
        }
        "desitter_cusp" => {
            let dual = params
                .dual_basis
                .clone()
                .unwrap_or_else(|| DualLatticeBasis::identity(m));
            if dual.dim() != m {
                return Err(ModelError::InvalidParams(format!(
                    "torus fiber must have dimension n - 1 = {m}, basis has {}",
                    dual.dim()
                )));
            }
            (
                WarpingFunction::geodesic(f64::exp, f64::exp, f64::exp, lo, hi)?,
                FiberSpectrum::torus(dual),
                CurvatureBounds::constant(0.0),
            )
        }
        "power_law" => {
            let c = params.coefficient.unwrap_or(1.0);
            let k = params
                .exponent
                .ok_or_else(|| ModelError::InvalidParams("power_law needs an exponent k".into()))?;
            if c == 0.0 || !c.is_finite() {
                return Err(ModelError::InvalidParams(format!(
                    "coefficient C must be nonzero, got {c}"
                )));
            }
            if !(k > 1.0 && k.is_finite()) {
                return Err(ModelError::InvalidParams(format!(
                    "exponent k must exceed 1, got {k}"
                )));
            }
            if lo < 0.0 {
                return Err(ModelError::InvalidParams(
                    "C r^k needs a domain inside (0, ∞)".into(),
                ));
            }
            // Only α² enters the metric, so the sign of C is dropped.
            let c = c.abs();
            (
                WarpingFunction::geodesic(
                    move |r: f64| c * r.powf(k),
                    move |r: f64| c * k * r.powf(k - 1.0),
                    move |r: f64| c * k * (k - 1.0) * r.powf(k - 2.0),
                    lo,
                    hi,
                )?,
                FiberSpectrum::sphere(m)?,
                sphere_curvature,
            )
        }
        other => return Err(ModelError::UnknownModel(other.to_string())),
    };
    let model = WarpedModel::new(n, warp, name)?.with_fiber_scalar_curvature(curvature);
    Ok(CaseStudy { model, fiber })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classical_horizon() {
        let r = horizon_radius(&SchwarzschildParams::new(1.0, 0.0)).unwrap();
        assert!((r - 2.0).abs() <= 4e-14);
        let case = schwarzschild_model(SchwarzschildParams::new(1.0, 0.0)).unwrap();
        assert_eq!(case.model.domain().hi, f64::INFINITY);
    }

    #[test]
    fn ads_horizon_factors_exactly() {
        // r³ + r - 2 = (r - 1)(r² + r + 2)
        let r = horizon_radius(&SchwarzschildParams::new(1.0, 1.0)).unwrap();
        assert!((r - 1.0).abs() <= 2e-14, "{r}");
    }

    #[test]
    fn ds_horizon_is_negative_root() {
        let p = SchwarzschildParams::new(1.0, -1.0);
        let r = horizon_radius(&p).unwrap();
        // f(r) = -r³ + r - 2 changes sign between -1.6 and -1.5.
        assert!(r > -1.6 && r < -1.5);
        assert!((r + 1.5214).abs() < 1e-4);
        assert!(p.psi_sq(r).abs() <= 1e-12 * (1.0f64).max(r * r));
        let case = schwarzschild_model(p).unwrap();
        assert_eq!(case.model.domain().hi, 0.0);
        assert_eq!(case.model.warnings().len(), 1);
    }

    #[test]
    fn horizon_residual_and_inside_positivity() {
        for k in [0.01, 0.5, 1.0, 2.0, 37.0] {
            for e in [-3.0, -1.0, -1e-4, 0.0, 1e-4, 1.0, 5.0] {
                let p = SchwarzschildParams::new(k, e);
                let r = horizon_radius(&p).unwrap();
                let scale = 1.0f64.max(e.abs() * r * r);
                // ψ² has a pole at 0, so measure the residual through r ψ².
                assert!(
                    (p.psi_sq(r) * r).abs() <= 1e-12 * scale * r.abs().max(1.0),
                    "K={k} E={e}"
                );
                let inside = if e >= 0.0 {
                    r * (1.0 + 1e-6)
                } else {
                    r * (1.0 - 1e-6)
                };
                assert!(p.psi_sq(inside) > 0.0, "K={k} E={e}");
            }
        }
    }

    #[test]
    fn invalid_mass() {
        for k in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                schwarzschild_model(SchwarzschildParams::new(k, 0.0)),
                Err(ModelError::InvalidMass(_))
            ));
        }
    }

    #[test]
    fn catalog_examples() {
        let case = catalog_model("pseudo_hyperbolic", &CatalogParams::new(3, 0.0, 5.0)).unwrap();
        assert_eq!(case.fiber.first_nonzero().unwrap().value, 2.0);

        let case = catalog_model("desitter_cusp", &CatalogParams::new(3, -2.0, 2.0)).unwrap();
        assert_eq!(case.fiber.first_nonzero().unwrap().value, 4.0 * PI * PI);
        assert_eq!(
            case.model.fiber_scalar_curvature(),
            Some(CurvatureBounds::constant(0.0))
        );

        let mut p = CatalogParams::new(3, 1.0, 50.0);
        p.coefficient = Some(1.0);
        p.exponent = Some(2.0);
        let case = catalog_model("power_law", &p).unwrap();
        for r in [1.5, 7.0, 30.0] {
            let h = case.model.stability_h(r).unwrap();
            assert!((h - 4.0 * r * r).abs() <= 1e-12 * h);
        }
    }

    #[test]
    fn catalog_errors() {
        let p = CatalogParams::new(3, 0.0, 5.0);
        assert!(matches!(
            catalog_model("kerr", &p),
            Err(ModelError::UnknownModel(_))
        ));
        let mut bad = CatalogParams::new(3, 1.0, 5.0);
        bad.exponent = Some(1.0);
        assert!(matches!(
            catalog_model("power_law", &bad),
            Err(ModelError::InvalidParams(_))
        ));
        bad.exponent = Some(2.0);
        bad.coefficient = Some(0.0);
        assert!(matches!(
            catalog_model("power_law", &bad),
            Err(ModelError::InvalidParams(_))
        ));
        let mut torus = CatalogParams::new(4, 0.0, 1.0);
        torus.dual_basis = Some(DualLatticeBasis::identity(2));
        assert!(matches!(
            catalog_model("desitter_cusp", &torus),
            Err(ModelError::InvalidParams(_))
        ));
    }
}
