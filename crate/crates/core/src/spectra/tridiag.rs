//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.

use super::SpectrumError;

/// Bisection steps allowed per eigenvalue. A double needs well under 1100
/// halvings to go from the Gershgorin interval to adjacent floats.
pub const MAX_BISECTION_STEPS: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off` holds the `len(diag) - 1` sub-diagonal entries.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "off-diagonal length must be n - 1"
        );
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues below `x`: the negative pivots of the `LDLᵀ`
    /// factorization of `T - x I`. A zero pivot is nudged to `-pivmin`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 {
                d - x
            } else {
                let e = self.off[i - 1];
                (d - x) - e * e / q
            };
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> Result<f64, SpectrumError> {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut a, mut b) = self.gershgorin();
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return Ok(mid);
            }
            if self.sturm_count(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        Err(SpectrumError::ConvergenceFailure {
            index: k,
            iterations: MAX_BISECTION_STEPS,
        })
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>, SpectrumError> {
        (0..count.min(self.len()))
            .map(|k| self.eigenvalue(k))
            .collect()
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, SpectrumError> {
        self.lowest(self.len())
    }
}
