use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{check_bound, SpectralLevel, SpectrumError};

/// Relative tolerance under which two floating eigenvalues are the same level.
pub const TIE_REL_TOL: f64 = 1e-9;

// Enumeration boxes above this many points are refused.
const MAX_BOX_POINTS: f64 = 5e8;

/// A basis of the dual lattice `Γ*`, one generator per row (units 1/length).
#[derive(Debug, Clone, PartialEq)]
pub struct DualLatticeBasis {
    rows: Vec<Vec<f64>>,
}

impl DualLatticeBasis {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SpectrumError> {
        let dim = rows.len();
        if dim == 0
            || rows
                .iter()
                .any(|r| r.len() != dim || r.iter().any(|x| !x.is_finite()))
        {
            return Err(SpectrumError::MalformedBasis);
        }
        let basis = DualLatticeBasis { rows };
        let det = basis.matrix().determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(SpectrumError::SingularBasis);
        }
        Ok(basis)
    }

    /// `Z^dim`, the dual of the unit square (cubic) lattice.
    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        DualLatticeBasis { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.rows[i][j])
    }

    fn gram(&self) -> DMatrix<f64> {
        let b = self.matrix();
        &b * b.transpose()
    }

    fn integral_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| (x.fract() == 0.0 && x.abs() < 1e6).then_some(x as i64))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn shortest_row_eigenvalue(&self) -> f64 {
        let min_sq = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        4.0 * PI * PI * min_sq
    }

    /// Per-coordinate half-widths of a box containing every coefficient
    /// vector `c` with `|Σ cᵢ bᵢ|² ≤ radius_sq`: `|cᵢ| ≤ √(radius_sq · (G⁻¹)ᵢᵢ)`.
    pub fn coefficient_box(&self, radius_sq: f64) -> Result<Vec<i64>, SpectrumError> {
        let inverse = self
            .gram()
            .try_inverse()
            .ok_or(SpectrumError::SingularBasis)?;
        let mut points = 1.0;
        let half_widths: Vec<i64> = (0..self.dim())
            .map(|i| {
                let w = (radius_sq * inverse[(i, i)].max(0.0)).sqrt();
                // Slack against rounding in the inverse.
                (w * (1.0 + 1e-9) + 1e-9).floor() as i64
            })
            .collect();
        for &w in &half_widths {
            points *= (2 * w + 1) as f64;
        }
        if points > MAX_BOX_POINTS {
            return Err(SpectrumError::EnumerationTooLarge { points });
        }
        Ok(half_widths)
    }
}

/// Visits every integer vector in `[-w₀, w₀] × … × [-w_{d-1}, w_{d-1}]`.
pub(crate) fn for_each_in_box(half_widths: &[i64], mut visit: impl FnMut(&[i64])) {
    let mut c: Vec<i64> = half_widths.iter().map(|w| -w).collect();
    loop {
        visit(&c);
        let mut k = 0;
        loop {
            if k == c.len() {
                return;
            }
            if c[k] < half_widths[k] {
                c[k] += 1;
                break;
            }
            c[k] = -half_widths[k];
            k += 1;
        }
    }
}

/// Laplace eigenvalues `4π²|y|²`, `y ∈ Γ*`, of the flat torus up to `bound`.
///
/// Integral bases compare squared norms exactly; otherwise values within
/// [`TIE_REL_TOL`] of the smallest member of a group are merged.
pub fn torus_spectrum(
    dual: &DualLatticeBasis,
    bound: f64,
) -> Result<Vec<SpectralLevel>, SpectrumError> {
    check_bound(bound)?;
    let scale = 4.0 * PI * PI;
    let radius_sq = bound / scale;
    let half_widths = dual.coefficient_box(radius_sq)?;
    let d = dual.dim();

    if let Some(int_rows) = dual.integral_rows() {
        let mut norms: Vec<i128> = Vec::new();
        let mut y = vec![0i128; d];
        for_each_in_box(&half_widths, |c| {
            y.iter_mut().for_each(|v| *v = 0);
            for (ci, row) in c.iter().zip(&int_rows) {
                for (yj, bj) in y.iter_mut().zip(row) {
                    *yj += (*ci as i128) * (*bj as i128);
                }
            }
            let q: i128 = y.iter().map(|v| v * v).sum();
            if scale * q as f64 <= bound {
                norms.push(q);
            }
        });
        norms.sort_unstable();
        let mut levels: Vec<SpectralLevel> = Vec::new();
        let mut last: Option<i128> = None;
        for q in norms {
            if last == Some(q) {
                levels.last_mut().expect("nonempty").multiplicity += 1;
            } else {
                levels.push(SpectralLevel {
                    value: scale * q as f64,
                    multiplicity: 1,
                });
                last = Some(q);
            }
        }
        return Ok(levels);
    }

    let mut values: Vec<f64> = Vec::new();
    let mut y = vec![0.0; d];
    for_each_in_box(&half_widths, |c| {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (ci, row) in c.iter().zip(dual.rows()) {
            for (yj, bj) in y.iter_mut().zip(row) {
                *yj += *ci as f64 * bj;
            }
        }
        let value = if c.iter().all(|&ci| ci == 0) {
            0.0
        } else {
            scale * y.iter().map(|v| v * v).sum::<f64>()
        };
        if value <= bound {
            values.push(value);
        }
    });
    values.sort_by(f64::total_cmp);
    Ok(group_levels(&values, TIE_REL_TOL))
}

/// Groups sorted values whose distance to the group's first member is within
/// `rel_tol` of that member.
pub(crate) fn group_levels(sorted: &[f64], rel_tol: f64) -> Vec<SpectralLevel> {
    let mut levels: Vec<SpectralLevel> = Vec::new();
    for &v in sorted {
        match levels.last_mut() {
            Some(l) if v - l.value <= rel_tol * l.value.abs() => l.multiplicity += 1,
            _ => levels.push(SpectralLevel {
                value: v,
                multiplicity: 1,
            }),
        }
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_head() {
        let levels = torus_spectrum(&DualLatticeBasis::identity(2), 4.0 * PI * PI * 2.5).unwrap();
        let pairs: Vec<_> = levels.iter().map(|l| (l.value, l.multiplicity)).collect();
        assert_eq!(
            pairs,
            vec![(0.0, 1), (4.0 * PI * PI, 4), (8.0 * PI * PI, 4)]
        );
    }

    #[test]
    fn zero_bound_gives_zero_mode_only() {
        let skew = DualLatticeBasis::new(vec![vec![1.3, 0.2], vec![-0.4, 0.7]]).unwrap();
        for basis in [DualLatticeBasis::identity(3), skew] {
            let levels = torus_spectrum(&basis, 0.0).unwrap();
            assert_eq!(
                levels,
                vec![SpectralLevel {
                    value: 0.0,
                    multiplicity: 1
                }]
            );
        }
    }

    #[test]
    fn singular_and_malformed_bases() {
        assert_eq!(
            DualLatticeBasis::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(SpectrumError::SingularBasis)
        );
        assert_eq!(
            DualLatticeBasis::new(vec![vec![1.0, 2.0]]),
            Err(SpectrumError::MalformedBasis)
        );
        assert_eq!(
            DualLatticeBasis::new(vec![]),
            Err(SpectrumError::MalformedBasis)
        );
    }

    #[test]
    fn rectangular_torus_splits_levels() {
        // Γ* = Z × 2Z: |y|² = a² + 4b².
        let basis = DualLatticeBasis::new(vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let levels = torus_spectrum(&basis, 4.0 * PI * PI * 5.0).unwrap();
        let pairs: Vec<_> = levels
            .iter()
            .map(|l| (l.value / (4.0 * PI * PI), l.multiplicity))
            .collect();
        // 0; a=±1; a=±2 or b=±1 (4); a=±1,b=±1 (4)
        assert_eq!(pairs, vec![(0.0, 1), (1.0, 2), (4.0, 4), (5.0, 4)]);
    }

    #[test]
    fn float_path_groups_symmetric_vectors() {
        let basis = DualLatticeBasis::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let levels = torus_spectrum(&basis, 4.0 * PI * PI * 0.5).unwrap();
        let mults: Vec<_> = levels.iter().map(|l| l.multiplicity).collect();
        assert_eq!(mults, vec![1, 4, 4]);
    }

    #[test]
    fn group_levels_merges_within_tolerance() {
        let g = group_levels(&[0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0 + 1e-6], 1e-9);
        let mults: Vec<_> = g.iter().map(|l| l.multiplicity).collect();
        assert_eq!(mults, vec![1, 2, 1, 1]);
    }
}
