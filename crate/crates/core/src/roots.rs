//! Bracketing bisection for scalar roots.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RootError {
    #[error("bracket [{lo}, {hi}] does not straddle a sign change (f = {f_lo}, {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function is not finite at {x}")]
    NonFinite { x: f64 },
}

/// An interval together with the function values at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// When to stop shrinking a bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Width at most the given absolute length.
    Absolute(f64),
    /// Width at most `rel * max(|lo|, |hi|)`.
    Relative(f64),
}

impl Stop {
    fn done(&self, b: &Bracket) -> bool {
        match *self {
            Stop::Absolute(tol) => b.width() <= tol,
            Stop::Relative(rel) => b.width() <= rel * b.lo.abs().max(b.hi.abs()),
        }
    }
}

/// Bisects `f` on `[lo, hi]` until `stop` is met or the interval cannot be
/// split further in floating point.
///
/// `f` may fail; its error type must absorb [`RootError`]. A midpoint where
/// `f` vanishes exactly collapses the bracket onto that point.
pub fn bisect<F, E>(mut f: F, lo: f64, hi: f64, stop: Stop) -> Result<Bracket, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<RootError>,
{
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = finite(lo, f(lo)?)?;
    let f_hi = finite(hi, f(hi)?)?;
    if f_lo == 0.0 {
        return Ok(Bracket {
            lo,
            hi: lo,
            f_lo,
            f_hi: f_lo,
        });
    }
    if f_hi == 0.0 {
        return Ok(Bracket {
            lo: hi,
            hi,
            f_lo: f_hi,
            f_hi,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi }.into());
    }
    bisect_bracket(f, Bracket { lo, hi, f_lo, f_hi }, stop)
}

/// Same as [`bisect`] for a bracket whose end values are already known.
pub fn bisect_bracket<F, E>(mut f: F, mut b: Bracket, stop: Stop) -> Result<Bracket, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<RootError>,
{
    while !stop.done(&b) {
        let mid = b.midpoint();
        if mid <= b.lo || mid >= b.hi {
            break;
        }
        let f_mid = finite(mid, f(mid)?)?;
        if f_mid == 0.0 {
            return Ok(Bracket {
                lo: mid,
                hi: mid,
                f_lo: 0.0,
                f_hi: 0.0,
            });
        }
        if f_mid.signum() == b.f_lo.signum() {
            b.lo = mid;
            b.f_lo = f_mid;
        } else {
            b.hi = mid;
            b.f_hi = f_mid;
        }
    }
    Ok(b)
}

fn finite(x: f64, v: f64) -> Result<f64, RootError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(RootError::NonFinite { x })
    }
}
