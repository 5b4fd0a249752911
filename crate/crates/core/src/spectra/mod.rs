//! Laplace–Beltrami spectra of the fiber `(P, g^P)`.
//!
//! A spectrum is kept as distinct eigenvalues with multiplicities,
//! `0 = μ̂₀ < μ̂₁ < μ̂₂ < …`. The repeated-eigenvalue indexing is recovered by
//! cumulative multiplicity. Round spheres use unit radius and flat tori use
//! the dual lattice exactly as given; any other scaling of the fiber has to be
//! carried by the warping function or an explicit list.

mod legendre;
mod sphere;
mod torus;
pub mod tridiag;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use legendre::{legendre_fd_lowest, legendre_fd_oracle, MIN_GRID_POINTS};
pub use sphere::{sphere_multiplicity, sphere_spectrum};
pub use torus::{torus_spectrum, DualLatticeBasis, TIE_REL_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("sphere dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("spectral bound must be a finite number ≥ 0, got {0}")]
    InvalidBound(f64),
    #[error("dual lattice basis must be a nonempty square matrix")]
    MalformedBasis,
    #[error("dual lattice basis is singular")]
    SingularBasis,
    #[error("explicit spectrum is empty")]
    Empty,
    #[error("explicit spectrum must start with the simple zero mode (0, 1)")]
    MissingZeroMode,
    #[error("explicit spectrum values must be finite and strictly increasing (at entry {index})")]
    NonMonotone { index: usize },
    #[error("multiplicity must be at least 1 (at entry {index})")]
    InvalidMultiplicity { index: usize },
    #[error("eigenvalues up to {requested} requested but the explicit list ends at {available}")]
    BoundExceedsData { requested: f64, available: f64 },
    #[error("the spectrum has no nonzero eigenvalue")]
    NoNonzeroEigenvalue,
    #[error("multiplicity overflows 64 bits at degree {degree}")]
    MultiplicityOverflow { degree: u64 },
    #[error("lattice enumeration box is too large ({points} points)")]
    EnumerationTooLarge { points: f64 },
    #[error("finite-difference grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("bisection failed to isolate eigenvalue #{index} within {iterations} iterations")]
    ConvergenceFailure { index: usize, iterations: usize },
}

/// A distinct eigenvalue and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub value: f64,
    pub multiplicity: u64,
}

/// Where the eigenvalues come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    /// Unit round sphere `S^dim`.
    Sphere { dim: usize },
    /// Flat torus `R^d / Γ`, given through a basis of the dual lattice `Γ*`.
    Torus { dual: DualLatticeBasis },
    /// A finite, user-supplied head of the spectrum.
    Explicit { levels: Vec<SpectralLevel> },
}

/// The fiber spectrum, enumerable up to any bound its source supports.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpectrum {
    source: SpectrumSource,
}

impl FiberSpectrum {
    pub fn sphere(dim: usize) -> Result<Self, SpectrumError> {
        if dim < 1 {
            return Err(SpectrumError::InvalidDimension(dim));
        }
        Ok(FiberSpectrum {
            source: SpectrumSource::Sphere { dim },
        })
    }

    pub fn torus(dual: DualLatticeBasis) -> Self {
        FiberSpectrum {
            source: SpectrumSource::Torus { dual },
        }
    }

    /// Validates an explicit list of `(value, multiplicity)` pairs.
    pub fn explicit(pairs: &[(f64, u64)]) -> Result<Self, SpectrumError> {
        let levels = explicit_spectrum(pairs)?;
        Ok(FiberSpectrum {
            source: SpectrumSource::Explicit { levels },
        })
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    /// Every distinct eigenvalue `≤ bound`, ascending, zero mode first.
    pub fn levels_up_to(&self, bound: f64) -> Result<Vec<SpectralLevel>, SpectrumError> {
        match &self.source {
            SpectrumSource::Sphere { dim } => sphere_spectrum(*dim, bound),
            SpectrumSource::Torus { dual } => torus_spectrum(dual, bound),
            SpectrumSource::Explicit { levels } => {
                check_bound(bound)?;
                let last = levels.last().expect("validated nonempty").value;
                if bound > last {
                    return Err(SpectrumError::BoundExceedsData {
                        requested: bound,
                        available: last,
                    });
                }
                Ok(levels
                    .iter()
                    .copied()
                    .filter(|l| l.value <= bound)
                    .collect())
            }
        }
    }

    /// The first nonzero eigenvalue `μ̂₁` with its multiplicity.
    pub fn first_nonzero(&self) -> Result<SpectralLevel, SpectrumError> {
        let bound = match &self.source {
            // i = 1 gives i(i + m - 1) = m.
            SpectrumSource::Sphere { dim } => *dim as f64,
            // The shortest nonzero dual vector is no longer than the shortest
            // basis row.
            SpectrumSource::Torus { dual } => dual.shortest_row_eigenvalue(),
            SpectrumSource::Explicit { levels } => {
                return levels
                    .get(1)
                    .copied()
                    .ok_or(SpectrumError::NoNonzeroEigenvalue)
            }
        };
        self.levels_up_to(bound)?
            .into_iter()
            .find(|l| l.value > 0.0)
            .ok_or(SpectrumError::NoNonzeroEigenvalue)
    }

    /// The largest bound this spectrum can be enumerated to.
    pub fn max_bound(&self) -> f64 {
        match &self.source {
            SpectrumSource::Explicit { levels } => levels.last().map_or(0.0, |l| l.value),
            _ => f64::INFINITY,
        }
    }
}

/// Validates explicit `(value, multiplicity)` pairs: a leading simple zero
/// mode, strictly increasing finite values and positive multiplicities.
pub fn explicit_spectrum(pairs: &[(f64, u64)]) -> Result<Vec<SpectralLevel>, SpectrumError> {
    let first = pairs.first().ok_or(SpectrumError::Empty)?;
    if *first != (0.0, 1) {
        return Err(SpectrumError::MissingZeroMode);
    }
    for (index, w) in pairs.windows(2).enumerate() {
        if !(w[1].0.is_finite() && w[1].0 > w[0].0) {
            return Err(SpectrumError::NonMonotone { index: index + 1 });
        }
    }
    if let Some(index) = pairs.iter().position(|&(_, m)| m == 0) {
        return Err(SpectrumError::InvalidMultiplicity { index });
    }
    Ok(pairs
        .iter()
        .map(|&(value, multiplicity)| SpectralLevel {
            value,
            multiplicity,
        })
        .collect())
}

pub(crate) fn check_bound(bound: f64) -> Result<(), SpectrumError> {
    if bound >= 0.0 && bound.is_finite() {
        Ok(())
    } else {
        Err(SpectrumError::InvalidBound(bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_examples() {
        let s = FiberSpectrum::explicit(&[(0.0, 1), (2.0, 3), (6.0, 5)]).unwrap();
        assert_eq!(s.levels_up_to(6.0).unwrap().len(), 3);
        assert_eq!(
            s.first_nonzero().unwrap(),
            SpectralLevel {
                value: 2.0,
                multiplicity: 3
            }
        );
        assert!(matches!(
            s.levels_up_to(6.5),
            Err(SpectrumError::BoundExceedsData { .. })
        ));

        assert_eq!(
            FiberSpectrum::explicit(&[(1.0, 2), (4.0, 2)]),
            Err(SpectrumError::MissingZeroMode)
        );
        assert_eq!(
            FiberSpectrum::explicit(&[(0.0, 1), (5.0, 2), (3.0, 1)]),
            Err(SpectrumError::NonMonotone { index: 2 })
        );
        assert_eq!(
            FiberSpectrum::explicit(&[(0.0, 1), (5.0, 0)]),
            Err(SpectrumError::InvalidMultiplicity { index: 1 })
        );
        assert_eq!(FiberSpectrum::explicit(&[]), Err(SpectrumError::Empty));
        assert_eq!(
            FiberSpectrum::explicit(&[(0.0, 2)]),
            Err(SpectrumError::MissingZeroMode)
        );
    }

    #[test]
    fn first_nonzero_of_generated_spectra() {
        for m in 1..6 {
            let s = FiberSpectrum::sphere(m).unwrap();
            assert_eq!(s.first_nonzero().unwrap().value, m as f64);
        }
        let torus = FiberSpectrum::torus(DualLatticeBasis::identity(2));
        let mu1 = torus.first_nonzero().unwrap();
        assert_eq!(mu1.value, 4.0 * std::f64::consts::PI.powi(2));
        assert_eq!(mu1.multiplicity, 4);

        // A skew basis whose shortest vector is not a basis row.
        let skew = DualLatticeBasis::new(vec![vec![1.0, 0.0], vec![0.9, 0.1]]).unwrap();
        let mu1 = FiberSpectrum::torus(skew).first_nonzero().unwrap();
        let y2 = 0.1f64 * 0.1 + 0.1 * 0.1;
        assert!((mu1.value - 4.0 * std::f64::consts::PI.powi(2) * y2).abs() < 1e-12);
    }

    #[test]
    fn invalid_bounds() {
        let s = FiberSpectrum::sphere(2).unwrap();
        assert!(matches!(
            s.levels_up_to(-1.0),
            Err(SpectrumError::InvalidBound(_))
        ));
        assert!(matches!(
            s.levels_up_to(f64::NAN),
            Err(SpectrumError::InvalidBound(_))
        ));
        assert_eq!(
            FiberSpectrum::sphere(0),
            Err(SpectrumError::InvalidDimension(0))
        );
    }
}
