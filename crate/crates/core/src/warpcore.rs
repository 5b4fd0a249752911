//! Warped product models `dr² + α²(r) g^P` and the pointwise geometry of the
//! slices `{r} × P`.
//!
//! A warping function comes in one of two forms:
//!
//! * **geodesic**: `α`, `α'`, `α''` in the arc-length coordinate;
//! * **graph**: a metric `ψ(r)⁻² dr² + r² g^P` given through `ψ²` and
//!   `(ψ²)'`. Here `α = |r|` and the arc-length coordinate is `ds = -ψ⁻¹ dr`.
//!
//! Everything downstream only needs the [`StabilityJet`] `(α², α̇², α̈α)`. For
//! the graph form the chain rule gives it in closed form,
//! `(r², ψ², (r/2)(ψ²)')`, so no ODE is ever integrated on the analysis path.
//! [`WarpedModel::geodesic_coordinate`] exists for reporting and cross-checks.

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::{self, QuadratureError};

/// A real function of the radial coordinate.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative tolerance for supplied derivatives against centered differences.
pub const DERIVATIVE_REL_TOL: f64 = 1e-6;

/// Number of interior points checked when a model is built.
pub const DERIVATIVE_SAMPLES: usize = 64;

const DERIVATIVE_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid domain ({lo}, {hi})")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("graph-form domain ({lo}, {hi}) contains r = 0 where α = |r| vanishes")]
    GraphDomainContainsZero { lo: f64, hi: f64 },
    #[error("ambient dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("endpoint margin must be positive and finite, got {0}")]
    InvalidMargin(f64),
    #[error("r = {r} is outside the usable domain [{lo}, {hi}]")]
    OutsideDomain { r: f64, lo: f64, hi: f64 },
    #[error("warping data is not positive at r = {r} ({quantity} = {value})")]
    NonPositiveWarp {
        r: f64,
        quantity: &'static str,
        value: f64,
    },
    #[error("warping data is not finite at r = {r}")]
    NonFinite { r: f64 },
    #[error(
        "supplied {derivative} disagrees with centered differences at r = {r}: \
         supplied {supplied}, estimated {estimated}"
    )]
    DerivativeMismatch {
        derivative: &'static str,
        r: f64,
        supplied: f64,
        estimated: f64,
    },
    #[error("the geodesic coordinate is only defined for graph-form models")]
    NotGraphForm,
    #[error("scale factor must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Open interval `(lo, hi)` of the radial coordinate; either end may be
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(GeometryError::InvalidDomain { lo, hi });
        }
        Ok(Domain { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Default distance kept from each endpoint: `1e-6` of the width with an
    /// absolute floor of `1e-12`. For unbounded domains the width is replaced
    /// by the magnitude of the finite end (at least one).
    pub fn default_margin(&self) -> f64 {
        let w = self.width();
        let scale = if w.is_finite() {
            w
        } else if self.lo.is_finite() {
            self.lo.abs().max(1.0)
        } else if self.hi.is_finite() {
            self.hi.abs().max(1.0)
        } else {
            1.0
        };
        (1e-6 * scale).max(1e-12)
    }
}

/// How the warping function is supplied.
#[derive(Clone)]
pub enum WarpForm {
    Geodesic {
        alpha: RealFn,
        dalpha: RealFn,
        ddalpha: RealFn,
    },
    Graph {
        psi_sq: RealFn,
        dpsi_sq: RealFn,
    },
}

/// The warping function of `dr² + α²(r) g^P`, possibly multiplied by a
/// constant factor `c` (metric `dr² + c²α² g^P`).
#[derive(Clone)]
pub struct WarpingFunction {
    form: WarpForm,
    domain: Domain,
    scale: f64,
}

impl fmt::Debug for WarpingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match self.form {
            WarpForm::Geodesic { .. } => "Geodesic",
            WarpForm::Graph { .. } => "Graph",
        };
        f.debug_struct("WarpingFunction")
            .field("form", &form)
            .field("domain", &self.domain)
            .field("scale", &self.scale)
            .finish()
    }
}

impl WarpingFunction {
    pub fn geodesic<A, D, DD>(
        alpha: A,
        dalpha: D,
        ddalpha: DD,
        lo: f64,
        hi: f64,
    ) -> Result<Self, GeometryError>
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        DD: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Ok(WarpingFunction {
            form: WarpForm::Geodesic {
                alpha: Arc::new(alpha),
                dalpha: Arc::new(dalpha),
                ddalpha: Arc::new(ddalpha),
            },
            domain: Domain::new(lo, hi)?,
            scale: 1.0,
        })
    }

    /// Graph form `ψ⁻² dr² + r² g^P`. The domain must not contain `0`.
    pub fn graph<P, DP>(psi_sq: P, dpsi_sq: DP, lo: f64, hi: f64) -> Result<Self, GeometryError>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        DP: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let domain = Domain::new(lo, hi)?;
        if domain.lo < 0.0 && domain.hi > 0.0 {
            return Err(GeometryError::GraphDomainContainsZero { lo, hi });
        }
        Ok(WarpingFunction {
            form: WarpForm::Graph {
                psi_sq: Arc::new(psi_sq),
                dpsi_sq: Arc::new(dpsi_sq),
            },
            domain,
            scale: 1.0,
        })
    }

    /// The same warping function multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(GeometryError::InvalidScale(factor));
        }
        Ok(WarpingFunction {
            scale: self.scale * factor,
            ..self.clone()
        })
    }

    pub fn form(&self) -> &WarpForm {
        &self.form
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.form, WarpForm::Graph { .. })
    }

    /// Checks positivity and the supplied derivatives at `samples` random
    /// interior points against centered differences.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<(), GeometryError> {
        let (a, b) = self.sampling_window();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..samples {
            let r = rng.gen_range(a..b);
            self.validate_at(r)?;
        }
        Ok(())
    }

    fn sampling_window(&self) -> (f64, f64) {
        let Domain { lo, hi } = self.domain;
        let margin = self.domain.default_margin();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let pad = (0.01 * (hi - lo)).max(margin);
                (lo + pad, hi - pad)
            }
            (true, false) => {
                let span = 100.0 * lo.abs().max(1.0);
                (lo + (0.01 * span).max(margin), lo + span)
            }
            (false, true) => {
                let span = 100.0 * hi.abs().max(1.0);
                (hi - span, hi - (0.01 * span).max(margin))
            }
            (false, false) => (-100.0, 100.0),
        }
    }

    fn validate_at(&self, r: f64) -> Result<(), GeometryError> {
        let room = (r - self.domain.lo).min(self.domain.hi - r);
        match &self.form {
            WarpForm::Geodesic {
                alpha,
                dalpha,
                ddalpha,
            } => {
                let a = alpha(r);
                if !a.is_finite() {
                    return Err(GeometryError::NonFinite { r });
                }
                if a <= 0.0 {
                    return Err(GeometryError::NonPositiveWarp {
                        r,
                        quantity: "alpha",
                        value: a,
                    });
                }
                check_derivative("dalpha", r, room, dalpha(r), a, |h| {
                    (alpha(r + h) - alpha(r - h)) / (2.0 * h)
                })?;
                check_derivative("ddalpha", r, room, ddalpha(r), a, |h| {
                    (alpha(r + h) - 2.0 * a + alpha(r - h)) / (h * h)
                })?;
            }
            WarpForm::Graph { psi_sq, dpsi_sq } => {
                let p = psi_sq(r);
                if !p.is_finite() {
                    return Err(GeometryError::NonFinite { r });
                }
                if p <= 0.0 {
                    return Err(GeometryError::NonPositiveWarp {
                        r,
                        quantity: "psi_sq",
                        value: p,
                    });
                }
                check_derivative("dpsi_sq", r, room, dpsi_sq(r), p, |h| {
                    (psi_sq(r + h) - psi_sq(r - h)) / (2.0 * h)
                })?;
            }
        }
        Ok(())
    }
}

/// Compares a supplied derivative with Richardson-extrapolated centered
/// differences over a ladder of steps; any rung within tolerance passes.
fn check_derivative(
    derivative: &'static str,
    r: f64,
    room: f64,
    supplied: f64,
    value: f64,
    difference: impl Fn(f64) -> f64,
) -> Result<(), GeometryError> {
    let mut best = f64::NAN;
    let mut h = (0.1 * r.abs().max(1.0)).min(0.2 * room);
    for _ in 0..12 {
        let estimate = (4.0 * difference(0.5 * h) - difference(h)) / 3.0;
        let scale = supplied.abs().max(estimate.abs()).max(value.abs());
        if supplied.is_finite() && (supplied - estimate).abs() <= DERIVATIVE_REL_TOL * scale {
            return Ok(());
        }
        if best.is_nan() || (estimate - supplied).abs() < (best - supplied).abs() {
            best = estimate;
        }
        h *= 0.25;
    }
    Err(GeometryError::DerivativeMismatch {
        derivative,
        r,
        supplied,
        estimated: best,
    })
}

/// `(α², α̇², α̈α)` at a slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityJet {
    pub alpha_sq: f64,
    pub alpha_dot_sq: f64,
    pub alpha_ddot_alpha: f64,
}

impl StabilityJet {
    /// `α̇² - α̈α`.
    pub fn defect(&self) -> f64 {
        self.alpha_dot_sq - self.alpha_ddot_alpha
    }
}

/// Curvature data of a slice, with the mean curvature taken against the
/// inward normal `-∂r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricInvariants {
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    pub lagrange_multiplier: f64,
    pub sff_norm_sq: f64,
    pub normal_ricci: f64,
    #[serde(rename = "Q")]
    pub potential: f64,
}

/// Lower and upper bound of the scalar curvature of the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureBounds {
    pub min: f64,
    pub max: f64,
}

impl CurvatureBounds {
    pub fn constant(value: f64) -> Self {
        CurvatureBounds {
            min: value,
            max: value,
        }
    }
}

/// A warped product `(r_lo, r_hi) × P` of dimension `n`.
#[derive(Debug, Clone)]
pub struct WarpedModel {
    n: usize,
    warp: WarpingFunction,
    fiber_scalar_curvature: Option<CurvatureBounds>,
    label: String,
    margin: f64,
    warnings: Vec<String>,
}

impl WarpedModel {
    /// Builds a model, validating the warping function at
    /// [`DERIVATIVE_SAMPLES`] interior points.
    pub fn new(
        n: usize,
        warp: WarpingFunction,
        label: impl Into<String>,
    ) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::InvalidDimension(n));
        }
        warp.validate(DERIVATIVE_SAMPLES, DERIVATIVE_SEED)?;
        let margin = warp.domain().default_margin();
        Ok(WarpedModel {
            n,
            warp,
            fiber_scalar_curvature: None,
            label: label.into(),
            margin,
            warnings: Vec::new(),
        })
    }

    pub fn with_fiber_scalar_curvature(mut self, bounds: CurvatureBounds) -> Self {
        self.fiber_scalar_curvature = Some(bounds);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Forgets the fiber curvature bounds, e.g. after swapping the fiber.
    pub fn without_fiber_scalar_curvature(mut self) -> Self {
        self.fiber_scalar_curvature = None;
        self
    }

    pub fn with_endpoint_margin(mut self, margin: f64) -> Result<Self, GeometryError> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(GeometryError::InvalidMargin(margin));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    /// The same model with `α` multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self, GeometryError> {
        Ok(WarpedModel {
            warp: self.warp.rescaled(factor)?,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn warp(&self) -> &WarpingFunction {
        &self.warp
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.warp.domain()
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn fiber_scalar_curvature(&self) -> Option<CurvatureBounds> {
        self.fiber_scalar_curvature
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `[lo + ε, hi - ε]`, the closed range where evaluation is allowed.
    pub fn usable_range(&self) -> (f64, f64) {
        let d = self.domain();
        (d.lo + self.margin, d.hi - self.margin)
    }

    pub fn check_radius(&self, r: f64) -> Result<(), GeometryError> {
        let (lo, hi) = self.usable_range();
        if r.is_finite() && r >= lo && r <= hi {
            Ok(())
        } else {
            Err(GeometryError::OutsideDomain { r, lo, hi })
        }
    }

    pub fn stability_jet(&self, r: f64) -> Result<StabilityJet, GeometryError> {
        self.check_radius(r)?;
        let c2 = self.warp.scale * self.warp.scale;
        let jet = match &self.warp.form {
            WarpForm::Geodesic {
                alpha,
                dalpha,
                ddalpha,
            } => {
                let a = alpha(r);
                if a.is_finite() && a <= 0.0 {
                    return Err(GeometryError::NonPositiveWarp {
                        r,
                        quantity: "alpha",
                        value: a,
                    });
                }
                let da = dalpha(r);
                StabilityJet {
                    alpha_sq: c2 * a * a,
                    alpha_dot_sq: c2 * da * da,
                    alpha_ddot_alpha: c2 * ddalpha(r) * a,
                }
            }
            WarpForm::Graph { psi_sq, dpsi_sq } => {
                let p = psi_sq(r);
                if p.is_finite() && p <= 0.0 {
                    return Err(GeometryError::NonPositiveWarp {
                        r,
                        quantity: "psi_sq",
                        value: p,
                    });
                }
                StabilityJet {
                    alpha_sq: c2 * r * r,
                    alpha_dot_sq: c2 * p,
                    alpha_ddot_alpha: c2 * 0.5 * r * dpsi_sq(r),
                }
            }
        };
        if jet.alpha_sq.is_finite()
            && jet.alpha_dot_sq.is_finite()
            && jet.alpha_ddot_alpha.is_finite()
        {
            Ok(jet)
        } else {
            Err(GeometryError::NonFinite { r })
        }
    }

    /// `h(r) = (n-1)(α̇² - α̈α)`.
    pub fn stability_h(&self, r: f64) -> Result<f64, GeometryError> {
        let jet = self.stability_jet(r)?;
        Ok((self.n - 1) as f64 * jet.defect())
    }

    pub fn geometric_invariants(&self, r: f64) -> Result<GeometricInvariants, GeometryError> {
        let jet = self.stability_jet(r)?;
        let m = (self.n - 1) as f64;
        // α̇/α carries the sign that the jet squares away.
        let slope = match &self.warp.form {
            WarpForm::Geodesic { alpha, dalpha, .. } => dalpha(r) / alpha(r),
            // Graph form reports H = (n-1)ψ/|r| for either sign of r.
            WarpForm::Graph { .. } => -jet.alpha_dot_sq.sqrt() / r.abs(),
        };
        let mean_curvature = -m * slope;
        let h = m * jet.defect();
        Ok(GeometricInvariants {
            mean_curvature,
            lagrange_multiplier: m * mean_curvature,
            sff_norm_sq: m * jet.alpha_dot_sq / jet.alpha_sq,
            normal_ricci: -jet.alpha_ddot_alpha / jet.alpha_sq,
            potential: h / jet.alpha_sq,
        })
    }

    /// Ambient scalar curvature at `(r, x)` given the fiber scalar curvature
    /// `R(x)`.
    pub fn scalar_curvature(&self, r: f64, fiber_scalar: f64) -> Result<f64, GeometryError> {
        let jet = self.stability_jet(r)?;
        let n = self.n as f64;
        let weighted =
            fiber_scalar - (n - 1.0) * ((n - 2.0) * jet.alpha_dot_sq + 2.0 * jet.alpha_ddot_alpha);
        Ok(weighted / jet.alpha_sq)
    }

    /// Arc-length coordinate `s(r) = -∫_{r_ref}^{r} ψ(u)⁻¹ du` of a graph
    /// model, integrated to absolute error `tol`.
    pub fn geodesic_coordinate(&self, r_ref: f64, r: f64, tol: f64) -> Result<f64, GeometryError> {
        let psi_sq = match &self.warp.form {
            WarpForm::Graph { psi_sq, .. } => Arc::clone(psi_sq),
            WarpForm::Geodesic { .. } => return Err(GeometryError::NotGraphForm),
        };
        self.check_radius(r_ref)?;
        self.check_radius(r)?;
        let integral = quadrature::integrate(
            |u| 1.0 / psi_sq(u).sqrt(),
            r_ref,
            r,
            tol,
            quadrature::DEFAULT_MAX_EVALUATIONS,
        )?;
        Ok(-integral.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_model(n: usize) -> WarpedModel {
        let w = WarpingFunction::geodesic(f64::exp, f64::exp, f64::exp, -5.0, 5.0).unwrap();
        WarpedModel::new(n, w, "exp").unwrap()
    }

    fn schwarzschild(k: f64, e: f64, lo: f64, hi: f64) -> WarpedModel {
        let w = WarpingFunction::graph(
            move |r| 1.0 - 2.0 * k / r + e * r * r,
            move |r| 2.0 * k / (r * r) + 2.0 * e * r,
            lo,
            hi,
        )
        .unwrap();
        WarpedModel::new(3, w, "schwarzschild").unwrap()
    }

    #[test]
    fn exp_jet_at_origin() {
        let jet = exp_model(3).stability_jet(0.0).unwrap();
        assert_eq!(
            (jet.alpha_sq, jet.alpha_dot_sq, jet.alpha_ddot_alpha),
            (1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn graph_jet_examples() {
        let ads = schwarzschild(1.0, 1.0, 1.0, f64::INFINITY);
        let jet = ads.stability_jet(2.0).unwrap();
        assert_eq!(
            (jet.alpha_sq, jet.alpha_dot_sq, jet.alpha_ddot_alpha),
            (4.0, 4.0, 4.5)
        );

        let ds = schwarzschild(1.0, -1.0, -1.52, 0.0);
        let jet = ds.stability_jet(-1.0).unwrap();
        assert_eq!(
            (jet.alpha_sq, jet.alpha_dot_sq, jet.alpha_ddot_alpha),
            (1.0, 2.0, -2.0)
        );
    }

    #[test]
    fn stability_h_examples() {
        for n in 3..6 {
            for r in [-2.0, 0.0, 1.5] {
                assert!(exp_model(n).stability_h(r).unwrap().abs() < 1e-12);
            }
        }
        let ads = schwarzschild(1.0, 0.3, 1.0, f64::INFINITY);
        assert!(ads.stability_h(3.0).unwrap().abs() < 1e-14);

        let w = WarpingFunction::geodesic(|r| r * r, |r| 2.0 * r, |_| 2.0, 0.5, 10.0).unwrap();
        let m = WarpedModel::new(3, w, "r^2").unwrap();
        assert_eq!(m.stability_h(2.0).unwrap(), 16.0);
    }

    #[test]
    fn invariants_at_ads_point() {
        let ads = schwarzschild(1.0, 1.0, 1.0, f64::INFINITY);
        let inv = ads.geometric_invariants(2.0).unwrap();
        assert!((inv.mean_curvature.powi(2) - 4.0).abs() < 1e-14);
        assert!(inv.mean_curvature > 0.0);
        assert_eq!(inv.lagrange_multiplier, 2.0 * inv.mean_curvature);
        assert_eq!(inv.potential, -0.25);
        assert_eq!(inv.sff_norm_sq, 2.0);
        assert_eq!(inv.normal_ricci, -1.125);
        assert_eq!(inv.sff_norm_sq + 2.0 * inv.normal_ricci, inv.potential);
    }

    #[test]
    fn constant_warp_is_flat() {
        let w = WarpingFunction::geodesic(|_| 2.5, |_| 0.0, |_| 0.0, 0.0, 1.0).unwrap();
        let m = WarpedModel::new(4, w, "const").unwrap();
        let inv = m.geometric_invariants(0.5).unwrap();
        assert_eq!(inv.mean_curvature, 0.0);
        assert_eq!(inv.sff_norm_sq, 0.0);
        assert_eq!(inv.normal_ricci, 0.0);
        assert_eq!(inv.potential, 0.0);

        let w = WarpingFunction::geodesic(|_| 1.0, |_| 0.0, |_| 0.0, 0.0, 1.0).unwrap();
        let m = WarpedModel::new(3, w, "unit").unwrap();
        assert_eq!(m.scalar_curvature(0.3, 1.75).unwrap(), 1.75);
    }

    #[test]
    fn hyperbolic_and_cusp_scalar_curvature() {
        let w = WarpingFunction::geodesic(f64::sinh, f64::cosh, f64::sinh, 0.0, 4.0).unwrap();
        let hyp = WarpedModel::new(3, w, "sinh").unwrap();
        for r in [0.1, 0.7, 2.0, 3.5] {
            assert!((hyp.scalar_curvature(r, 2.0).unwrap() + 6.0).abs() < 1e-11);
        }
        let cusp = exp_model(3);
        for r in [-3.0, 0.0, 2.0] {
            assert!((cusp.scalar_curvature(r, 0.0).unwrap() + 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_and_positivity_errors() {
        let ads = schwarzschild(1.0, 1.0, 1.0, f64::INFINITY);
        assert!(matches!(
            ads.stability_jet(0.5),
            Err(GeometryError::OutsideDomain { .. })
        ));
        assert!(matches!(
            ads.stability_jet(1.0),
            Err(GeometryError::OutsideDomain { .. })
        ));
        assert!(matches!(
            ads.stability_jet(f64::NAN),
            Err(GeometryError::OutsideDomain { .. })
        ));

        // ψ² < 0 inside a user domain that overshoots the horizon.
        let w = WarpingFunction::graph(|r| 1.0 - 2.0 / r, |r| 2.0 / (r * r), 1.0, 3.0).unwrap();
        let m = WarpedModel {
            n: 3,
            warp: w,
            fiber_scalar_curvature: None,
            label: String::new(),
            margin: 1e-9,
            warnings: vec![],
        };
        assert!(matches!(
            m.stability_jet(1.5),
            Err(GeometryError::NonPositiveWarp { .. })
        ));

        assert!(matches!(
            WarpingFunction::graph(|_| 1.0, |_| 0.0, -1.0, 1.0),
            Err(GeometryError::GraphDomainContainsZero { .. })
        ));
    }

    #[test]
    fn wrong_derivative_is_caught() {
        let w = WarpingFunction::geodesic(f64::exp, f64::exp, |r: f64| 1.01 * r.exp(), -1.0, 1.0)
            .unwrap();
        assert!(matches!(
            WarpedModel::new(3, w, "bad"),
            Err(GeometryError::DerivativeMismatch {
                derivative: "ddalpha",
                ..
            })
        ));
        let w = WarpingFunction::graph(|r| 1.0 - 2.0 / r, |r| 2.1 / (r * r), 2.0, 50.0).unwrap();
        assert!(matches!(
            WarpedModel::new(3, w, "bad"),
            Err(GeometryError::DerivativeMismatch {
                derivative: "dpsi_sq",
                ..
            })
        ));
    }

    #[test]
    fn geodesic_coordinate_examples() {
        let w = WarpingFunction::graph(|_| 1.0, |_| 0.0, 0.0, 10.0).unwrap();
        let flat = WarpedModel::new(3, w, "flat").unwrap();
        assert!((flat.geodesic_coordinate(1.0, 3.0, 1e-12).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(flat.geodesic_coordinate(2.5, 2.5, 1e-12).unwrap(), 0.0);

        let schw = schwarzschild(1.0, 0.0, 2.0, f64::INFINITY);
        let antiderivative =
            |r: f64| (r * (r - 2.0)).sqrt() + 2.0 * (r.sqrt() + (r - 2.0).sqrt()).ln();
        let exact = -(antiderivative(4.0) - antiderivative(3.0));
        let s = schw.geodesic_coordinate(3.0, 4.0, 1e-12).unwrap();
        assert!((s - exact).abs() <= 1e-12, "{s} vs {exact}");
        assert!((exact + 1.542_165_594_291_58).abs() < 1e-13);

        let s_far = schw.geodesic_coordinate(3.0, 5.0, 1e-10).unwrap();
        assert!(s_far < s);

        assert!(matches!(
            exp_model(3).geodesic_coordinate(0.0, 1.0, 1e-9),
            Err(GeometryError::NotGraphForm)
        ));
    }

    #[test]
    fn geodesic_coordinate_matches_jet() {
        // Finite-difference α(s) = r(s) along the integrated coordinate and
        // compare with the closed-form jet (r², ψ², r ψψ').
        let m = schwarzschild(1.0, 1.0, 1.0, f64::INFINITY);
        let r0 = 2.0;
        let s_of = |r: f64| m.geodesic_coordinate(r0, r, 1e-13).unwrap();
        // Invert s(r) near r0 by Newton with ds/dr = -1/ψ.
        let r_of = |s: f64| {
            let mut r = r0;
            for _ in 0..50 {
                let psi = (1.0 - 2.0 / r + r * r).sqrt();
                r -= (s_of(r) - s) * (-psi);
            }
            r
        };
        let ds = 1e-3;
        let (rm, rc, rp) = (r_of(-ds), r_of(0.0), r_of(ds));
        let alpha_dot = (rp - rm) / (2.0 * ds);
        let alpha_ddot = (rp - 2.0 * rc + rm) / (ds * ds);
        let jet = m.stability_jet(2.0).unwrap();
        assert!((alpha_dot * alpha_dot - jet.alpha_dot_sq).abs() < 1e-5);
        assert!((alpha_ddot * rc - jet.alpha_ddot_alpha).abs() < 1e-4);
    }

    #[test]
    fn rescaling_scales_jet() {
        let m = schwarzschild(1.0, -1.0, -1.52, 0.0);
        let scaled = m.rescaled(0.5).unwrap();
        let a = m.stability_jet(-0.7).unwrap();
        let b = scaled.stability_jet(-0.7).unwrap();
        assert_eq!(b.alpha_sq, 0.25 * a.alpha_sq);
        assert_eq!(b.alpha_dot_sq, 0.25 * a.alpha_dot_sq);
        assert_eq!(b.alpha_ddot_alpha, 0.25 * a.alpha_ddot_alpha);
    }
}
