use super::{check_bound, SpectralLevel, SpectrumError};

/// Multiplicity of the eigenvalue `i(i + m - 1)` on the unit sphere `S^m`:
/// `(2i + m - 1) (i + m - 2)! / (i! (m - 1)!)`, and `1` for `i = 0`.
pub fn sphere_multiplicity(degree: u64, m: usize) -> Result<u64, SpectrumError> {
    if m < 1 {
        return Err(SpectrumError::InvalidDimension(m));
    }
    if degree == 0 {
        return Ok(1);
    }
    let overflow = SpectrumError::MultiplicityOverflow { degree };
    let m = m as u128;
    let i = degree as u128;
    // (i + m - 2)! / (i! (m - 1)!) = C(i + m - 1, i) / (i + m - 1).
    let top = i + m - 1;
    let choose = binomial(top, i).ok_or(overflow.clone())?;
    let numerator = (2 * i + m - 1)
        .checked_mul(choose)
        .ok_or(overflow.clone())?;
    u64::try_from(numerator / top).map_err(|_| overflow)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) is divisible by (j + 1) at every step.
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}

/// Distinct eigenvalues `i(i + m - 1)` of the unit sphere `S^m` up to
/// `bound`, with multiplicities.
pub fn sphere_spectrum(m: usize, bound: f64) -> Result<Vec<SpectralLevel>, SpectrumError> {
    if m < 1 {
        return Err(SpectrumError::InvalidDimension(m));
    }
    check_bound(bound)?;
    let mut levels = Vec::new();
    for degree in 0u64.. {
        let value = (degree as f64) * ((degree + m as u64 - 1) as f64);
        if value > bound {
            break;
        }
        levels.push(SpectralLevel {
            value,
            multiplicity: sphere_multiplicity(degree, m)?,
        });
    }
    Ok(levels)
}
