//! Rigidity and bifurcation analysis for the constant-mean-curvature slices
//! `{r} × P` of a warped product `((r_lo, r_hi) × P, dr² + α²(r) g^P)`.
//!
//! The pipeline is:
//!
//! * [`warpcore`] evaluates the slice geometry (mean curvature, second
//!   fundamental form, normal Ricci curvature, Jacobi potential) and the
//!   stability function `h(r) = (n-1)(α̇² - α̈α)`.
//! * [`spectra`] supplies the Laplace spectrum of the fiber `P` (round
//!   spheres, flat tori, explicit lists) together with a finite-difference
//!   oracle for the sphere.
//! * [`bifurcation`] turns `h` and the fiber spectrum into shifted Jacobi
//!   eigenvalues, Morse indices, eigenvalue crossings and rigidity
//!   certificates.
//! * [`models`] builds the Schwarzschild-type spatial slices and the catalog
//!   of warped products used as case studies.
//! * [`cli`] is the config-driven front end behind the `cmcb` binary.

pub mod bifurcation;
pub mod cli;
pub mod models;
pub mod quadrature;
pub mod roots;
pub mod spectra;
pub mod warpcore;

pub use bifurcation::{
    analyze, certify_corsc, certify_no_bifurcation, check_general_rigidity, divergence_test,
    find_crossings, index_witness, morse_index, scan, shifted_eigenvalue, AnalysisConfig,
    AnalysisError, BifurcationReport, CrossingEvent, Direction, DivergenceClass, DivergenceConfig,
    Endpoint, GeneralRigidityData, GridSpec, RigidityCertificate, RigidityCriterion,
    SummaryVerdict, Verdict,
};
pub use models::{
    catalog_model, schwarzschild_model, CaseStudy, CatalogParams, SchwarzschildParams,
};
pub use spectra::{FiberSpectrum, SpectralLevel, SpectrumError};
pub use warpcore::{
    GeometricInvariants, GeometryError, StabilityJet, WarpedModel, WarpingFunction,
};
