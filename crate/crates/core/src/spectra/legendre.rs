//! Finite-difference oracle for the Laplace spectrum of the unit 2-sphere.
//!
//! Separating `e^{imφ}` reduces `Δ` to the associated Legendre operator
//! `-(1/sinθ)(sinθ f')' + m²/sin²θ f` on `(0, π)`. It is discretized on `N`
//! cell centres `θ_j = (j - ½)π/N`; the fluxes through the poles vanish
//! because `sin 0 = sin π = 0`, so no boundary condition is imposed. The
//! scheme is the generalized problem `K f = λ W f` with `W = diag(sinθ_j)`,
//! symmetrized as `W^{-1/2} K W^{-1/2}`, and is second-order accurate.

use std::f64::consts::PI;

use super::tridiag::SymTridiagonal;
use super::SpectrumError;

/// Smallest accepted grid.
pub const MIN_GRID_POINTS: usize = 16;

fn legendre_matrix(n: usize, m: usize) -> SymTridiagonal {
    let h = PI / n as f64;
    let centre_sin: Vec<f64> = (0..n).map(|j| ((j as f64 + 0.5) * h).sin()).collect();
    // face j + 1/2 between cells j and j + 1
    let face_sin: Vec<f64> = (0..=n).map(|j| (j as f64 * h).sin().max(0.0)).collect();
    let m_sq = (m * m) as f64;
    let h_sq = h * h;

    let diag = (0..n)
        .map(|j| {
            let s = centre_sin[j];
            let stiffness = (face_sin[j] + face_sin[j + 1]) / h_sq + m_sq / s;
            stiffness / s
        })
        .collect();
    let off = (0..n.saturating_sub(1))
        .map(|j| -face_sin[j + 1] / h_sq / (centre_sin[j] * centre_sin[j + 1]).sqrt())
        .collect();
    SymTridiagonal::new(diag, off)
}

/// Every eigenvalue of the discretized operator for azimuthal modes
/// `0..=max_mode`, merged and sorted. Modes `m ≥ 1` appear twice (`cos mφ`
/// and `sin mφ`), so clusters near `i(i+1)` have `2i + 1` members for
/// `i ≤ max_mode`.
pub fn legendre_fd_oracle(n: usize, max_mode: usize) -> Result<Vec<f64>, SpectrumError> {
    legendre_fd_lowest(n, max_mode, n)
}

/// Like [`legendre_fd_oracle`] but keeps only the `per_mode` smallest
/// eigenvalues of each azimuthal mode.
pub fn legendre_fd_lowest(
    n: usize,
    max_mode: usize,
    per_mode: usize,
) -> Result<Vec<f64>, SpectrumError> {
    if n < MIN_GRID_POINTS {
        return Err(SpectrumError::GridTooSmall {
            min: MIN_GRID_POINTS,
            got: n,
        });
    }
    let mut all = Vec::new();
    for m in 0..=max_mode {
        let values = legendre_matrix(n, m).lowest(per_mode)?;
        let copies = if m == 0 { 1 } else { 2 };
        for _ in 0..copies {
            all.extend_from_slice(&values);
        }
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}
