//! Sufficient conditions for local rigidity.

use serde::{Deserialize, Serialize};

use super::{check_tolerance, sample_h, AnalysisError, GridSpec};
use crate::spectra::FiberSpectrum;
use crate::warpcore::WarpedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityCriterion {
    /// `μ₁ > Q` for a family with constant potential.
    SpectralGap,
    /// Convex slices with non-positive Ricci curvature.
    ConvexNonPositiveRicci,
    /// `Ric(N, N) ≤ -‖II‖² / (n - 1)`.
    RicciDominatesSff,
    /// Ricci-flat slices with `μ₁ ≥ ‖II‖²`.
    RicciFlatSpectralBound,
    /// `α̇² - α̈α < μ̂₁ / (n - 1)` along a warped product.
    WarpedSpectralGap,
    /// `α²(R + n H² / (n - 1)) < 2μ̂₁ + R_fiber` along a warped product.
    ScalarCurvatureBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
    InconclusiveDegenerate,
}

/// What a certificate actually checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateScope {
    /// The inequality holds at the grid nodes only; it is not a proof over
    /// the continuum.
    SampledGrid,
    /// The inequality was applied to caller-supplied data as given.
    SuppliedData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityCertificate {
    pub criterion: RigidityCriterion,
    pub verdict: Verdict,
    /// Smallest slack of the inequality; `None` for purely qualitative
    /// criteria.
    pub margin: Option<f64>,
    /// Grid node where the margin was attained.
    pub worst_r: Option<f64>,
    pub grid: Option<GridSpec>,
    pub scope: CertificateScope,
}

fn grid_verdict(margin: f64, degeneracy_tol: f64) -> Verdict {
    if margin.abs() <= degeneracy_tol {
        Verdict::InconclusiveDegenerate
    } else if margin > 0.0 {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    }
}

fn grid_certificate(
    criterion: RigidityCriterion,
    grid: GridSpec,
    nodes: &[f64],
    slack: &[f64],
    degeneracy_tol: f64,
) -> RigidityCertificate {
    let (worst, margin) = slack
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid has at least two nodes");
    RigidityCertificate {
        criterion,
        verdict: grid_verdict(margin, degeneracy_tol),
        margin: Some(margin),
        worst_r: Some(nodes[worst]),
        grid: Some(grid),
        scope: CertificateScope::SampledGrid,
    }
}

fn prepare(
    model: &WarpedModel,
    grid: &GridSpec,
    degeneracy_tol: f64,
) -> Result<Vec<f64>, AnalysisError> {
    check_tolerance("degeneracy_tol", degeneracy_tol)?;
    grid.validate()?;
    model.check_radius(grid.r_min)?;
    model.check_radius(grid.r_max)?;
    Ok(grid.nodes())
}

/// Checks `α̇² - α̈α < μ̂₁ / (n - 1)` at every grid node. The margin is the
/// minimum slack; `|margin| ≤ degeneracy_tol` is inconclusive because the
/// first Jacobi eigenvalue then (nearly) vanishes.
pub fn certify_no_bifurcation(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    grid: GridSpec,
    degeneracy_tol: f64,
) -> Result<RigidityCertificate, AnalysisError> {
    let nodes = prepare(model, &grid, degeneracy_tol)?;
    let mu1 = spec.first_nonzero()?.value;
    let m = (model.n() - 1) as f64;
    let slack: Vec<f64> = sample_h(model, &nodes)?
        .into_iter()
        .map(|h| (mu1 - h) / m)
        .collect();
    Ok(grid_certificate(
        RigidityCriterion::WarpedSpectralGap,
        grid,
        &nodes,
        &slack,
        degeneracy_tol,
    ))
}

/// The same rigidity test phrased through the ambient scalar curvature:
/// `2μ̂₁ + R_min - α²(R(r) + n H²/(n-1))` at every node, where `R(r)` uses
/// the largest fiber scalar curvature and the right side the smallest.
pub fn certify_corsc(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    grid: GridSpec,
    degeneracy_tol: f64,
) -> Result<RigidityCertificate, AnalysisError> {
    let bounds = model
        .fiber_scalar_curvature()
        .ok_or(AnalysisError::MissingFiberCurvature)?;
    let nodes = prepare(model, &grid, degeneracy_tol)?;
    let mu1 = spec.first_nonzero()?.value;
    let n = model.n() as f64;
    let slack = nodes
        .iter()
        .map(|&r| {
            let alpha_sq = model.stability_jet(r)?.alpha_sq;
            let big_r = model.scalar_curvature(r, bounds.max)?;
            let h_mean = model.geometric_invariants(r)?.mean_curvature;
            let lhs = alpha_sq * (big_r + n / (n - 1.0) * h_mean * h_mean);
            Ok(2.0 * mu1 + bounds.min - lhs)
        })
        .collect::<Result<Vec<f64>, AnalysisError>>()?;
    Ok(grid_certificate(
        RigidityCriterion::ScalarCurvatureBound,
        grid,
        &nodes,
        &slack,
        degeneracy_tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypersurfaceRicci {
    NonPositive,
    Flat,
    Other,
}

/// Data of a CMC family whose Jacobi potential is constant on each
/// hypersurface. Nothing here is re-derived: the caller vouches for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralRigidityData {
    /// Dimension of the ambient manifold.
    pub n: usize,
    /// First nonzero Laplace eigenvalue of the hypersurface.
    pub mu1: f64,
    #[serde(rename = "Q")]
    pub potential: f64,
    pub sff_norm_sq: f64,
    pub normal_ricci: f64,
    pub hypersurface_convex: bool,
    pub hypersurface_ricci: HypersurfaceRicci,
}

impl GeneralRigidityData {
    fn validate(&self) -> Result<(), AnalysisError> {
        let finite = [
            self.mu1,
            self.potential,
            self.sff_norm_sq,
            self.normal_ricci,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(AnalysisError::InvalidData(
                "all quantities must be finite".into(),
            ));
        }
        if self.n < 2 {
            return Err(AnalysisError::InvalidData(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.mu1 <= 0.0 {
            return Err(AnalysisError::InvalidData(format!(
                "mu1 must be positive, got {}",
                self.mu1
            )));
        }
        if self.sff_norm_sq < 0.0 {
            return Err(AnalysisError::InvalidData(format!(
                "sff_norm_sq must be non-negative, got {}",
                self.sff_norm_sq
            )));
        }
        Ok(())
    }
}

/// Tries the data-level criteria in order and returns the first that holds.
/// If none does, the spectral-gap certificate is returned as not certified
/// with its (non-positive) margin.
pub fn check_general_rigidity(
    data: &GeneralRigidityData,
) -> Result<RigidityCertificate, AnalysisError> {
    data.validate()?;
    let cert = |criterion, verdict, margin| RigidityCertificate {
        criterion,
        verdict,
        margin,
        worst_r: None,
        grid: None,
        scope: CertificateScope::SuppliedData,
    };

    let gap = data.mu1 - data.potential;
    if gap > 0.0 {
        return Ok(cert(
            RigidityCriterion::SpectralGap,
            Verdict::Certified,
            Some(gap),
        ));
    }
    if data.hypersurface_convex && data.hypersurface_ricci == HypersurfaceRicci::NonPositive {
        return Ok(cert(
            RigidityCriterion::ConvexNonPositiveRicci,
            Verdict::Certified,
            None,
        ));
    }
    let ricci_slack = -data.sff_norm_sq / (data.n - 1) as f64 - data.normal_ricci;
    if ricci_slack >= 0.0 {
        return Ok(cert(
            RigidityCriterion::RicciDominatesSff,
            Verdict::Certified,
            Some(ricci_slack),
        ));
    }
    // Non-strict as stated; a zero margin still certifies.
    let flat_slack = data.mu1 - data.sff_norm_sq;
    if data.hypersurface_ricci == HypersurfaceRicci::Flat && flat_slack >= 0.0 {
        return Ok(cert(
            RigidityCriterion::RicciFlatSpectralBound,
            Verdict::Certified,
            Some(flat_slack),
        ));
    }
    Ok(cert(
        RigidityCriterion::SpectralGap,
        Verdict::NotCertified,
        Some(gap),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{catalog_model, schwarzschild_model, CatalogParams, SchwarzschildParams};
    use std::f64::consts::PI;

    #[test]
    fn ads_is_certified_with_margin_3k_over_r() {
        let case = schwarzschild_model(SchwarzschildParams::new(1.0, 1.0)).unwrap();
        let grid = GridSpec::new(1.001, 100.0, 10_000).unwrap();
        let c = certify_no_bifurcation(&case.model, &case.fiber, grid, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.worst_r, Some(100.0));
        assert!((c.margin.unwrap() - 0.03).abs() < 1e-12);
        assert_eq!(c.scope, CertificateScope::SampledGrid);

        let s = certify_corsc(&case.model, &case.fiber, grid, 1e-9).unwrap();
        assert_eq!(s.verdict, Verdict::Certified);
        assert!((s.margin.unwrap() - 2.0 * 2.0 * 0.03).abs() < 1e-10);
    }

    #[test]
    fn sinh_is_degenerate_for_both_routes() {
        let case = catalog_model("hyperbolic_sinh", &CatalogParams::new(3, 0.0, 6.0)).unwrap();
        let grid = GridSpec::new(0.1, 5.0, 200).unwrap();
        for c in [
            certify_no_bifurcation(&case.model, &case.fiber, grid, 1e-9).unwrap(),
            certify_corsc(&case.model, &case.fiber, grid, 1e-9).unwrap(),
        ] {
            assert_eq!(c.verdict, Verdict::InconclusiveDegenerate);
            assert!(c.margin.unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn cusp_and_pseudo_hyperbolic_margins() {
        let cusp = catalog_model("desitter_cusp", &CatalogParams::new(3, -2.0, 2.0)).unwrap();
        let grid = GridSpec::new(-1.5, 1.5, 101).unwrap();
        let p = certify_no_bifurcation(&cusp.model, &cusp.fiber, grid, 1e-9).unwrap();
        assert!((p.margin.unwrap() - 2.0 * PI * PI).abs() < 1e-10);
        let s = certify_corsc(&cusp.model, &cusp.fiber, grid, 1e-9).unwrap();
        assert_eq!(s.verdict, Verdict::Certified);
        assert!((s.margin.unwrap() - 8.0 * PI * PI).abs() < 1e-9);

        let ph = catalog_model("pseudo_hyperbolic", &CatalogParams::new(3, -2.0, 2.0)).unwrap();
        let p = certify_no_bifurcation(&ph.model, &ph.fiber, grid, 1e-9).unwrap();
        assert_eq!(p.verdict, Verdict::Certified);
        assert!((p.margin.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn de_sitter_is_not_certified() {
        let case = schwarzschild_model(SchwarzschildParams::new(1.0, -1.0)).unwrap();
        let grid = GridSpec::new(-1.45, -0.21, 100).unwrap();
        let c = certify_no_bifurcation(&case.model, &case.fiber, grid, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert_eq!(c.worst_r, Some(-0.21));
    }

    #[test]
    fn corsc_needs_fiber_curvature() {
        use crate::warpcore::{WarpedModel, WarpingFunction};
        let warp = WarpingFunction::geodesic(|_| 1.0, |_| 0.0, |_| 0.0, 0.0, 1.0).unwrap();
        let model = WarpedModel::new(3, warp, "product").unwrap();
        let spec = FiberSpectrum::sphere(2).unwrap();
        let grid = GridSpec::new(0.1, 0.9, 10).unwrap();
        assert_eq!(
            certify_corsc(&model, &spec, grid, 1e-9),
            Err(AnalysisError::MissingFiberCurvature)
        );
        let flat =
            model.with_fiber_scalar_curvature(crate::warpcore::CurvatureBounds::constant(0.0));
        let c = certify_corsc(&flat, &spec, grid, 1e-9).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.margin, Some(4.0));
    }

    fn data(mu1: f64, potential: f64) -> GeneralRigidityData {
        GeneralRigidityData {
            n: 3,
            mu1,
            potential,
            sff_norm_sq: 1.0,
            normal_ricci: 0.0,
            hypersurface_convex: false,
            hypersurface_ricci: HypersurfaceRicci::Other,
        }
    }

    #[test]
    fn general_rigidity_examples() {
        let c = check_general_rigidity(&data(3.0, 1.0)).unwrap();
        assert_eq!(
            (c.criterion, c.verdict, c.margin),
            (
                RigidityCriterion::SpectralGap,
                Verdict::Certified,
                Some(2.0)
            )
        );

        let c = check_general_rigidity(&data(2.0, 8.0)).unwrap();
        assert_eq!((c.verdict, c.margin), (Verdict::NotCertified, Some(-6.0)));

        let convex = GeneralRigidityData {
            hypersurface_convex: true,
            hypersurface_ricci: HypersurfaceRicci::NonPositive,
            ..data(1.0, 2.0)
        };
        let c = check_general_rigidity(&convex).unwrap();
        assert_eq!(
            (c.criterion, c.margin),
            (RigidityCriterion::ConvexNonPositiveRicci, None)
        );

        let ricci = GeneralRigidityData {
            normal_ricci: -0.5,
            ..data(1.0, 2.0)
        };
        let c = check_general_rigidity(&ricci).unwrap();
        assert_eq!(
            (c.criterion, c.margin),
            (RigidityCriterion::RicciDominatesSff, Some(0.0))
        );

        let flat = GeneralRigidityData {
            hypersurface_ricci: HypersurfaceRicci::Flat,
            normal_ricci: 1.0,
            ..data(1.0, 2.0)
        };
        let c = check_general_rigidity(&flat).unwrap();
        assert_eq!(
            (c.criterion, c.verdict, c.margin),
            (
                RigidityCriterion::RicciFlatSpectralBound,
                Verdict::Certified,
                Some(0.0)
            )
        );

        assert!(check_general_rigidity(&data(0.0, -1.0)).is_err());
    }
}
