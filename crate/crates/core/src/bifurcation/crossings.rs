//! Locating the radii where `h(r)` passes through a fiber eigenvalue.

use serde::{Deserialize, Serialize};

use super::{
    band, check_tolerance, sample_h, AnalysisError, GridSpec, LevelTable, DEFAULT_DEGENERACY_TOL,
};
use crate::roots::{bisect_bracket, Bracket, Stop};
use crate::spectra::{FiberSpectrum, SpectralLevel};
use crate::warpcore::WarpedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `h` increases through the eigenvalue: the index grows.
    Up,
    Down,
}

/// A transversal crossing `h(r*) = μ̂` inside a bracket of width `≤ tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub r_star: f64,
    pub bracket: (f64, f64),
    pub eigenvalue: f64,
    pub multiplicity: u64,
    pub direction: Direction,
    pub index_jump: i64,
}

/// `h - μ̂` reaches zero on `window` without a detectable sign change.
/// Nothing can be concluded about bifurcation there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchEvent {
    pub r_approx: f64,
    pub window: (f64, f64),
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossingSet {
    pub crossings: Vec<CrossingEvent>,
    pub touches: Vec<TouchEvent>,
}

impl CrossingSet {
    /// Net change of the Morse index across the scanned interval.
    pub fn net_index_change(&self) -> i64 {
        self.crossings.iter().map(|c| c.index_jump).sum()
    }
}

/// [`find_crossings_banded`] with the default degeneracy band.
pub fn find_crossings(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    interval: (f64, f64),
    grid_points: usize,
    tol: f64,
) -> Result<CrossingSet, AnalysisError> {
    find_crossings_banded(
        model,
        spec,
        interval,
        grid_points,
        tol,
        DEFAULT_DEGENERACY_TOL,
    )
}

/// Samples `h` on `grid_points` equally spaced nodes of `interval`, detects
/// sign changes of `h - μ̂` for every nonzero fiber level and bisects each one
/// to a bracket of width `≤ tol`.
///
/// Nodes with `|h - μ̂| ≤ degeneracy_tol · max(1, |μ̂|)` count as zero. A run
/// of such nodes between opposite signs is still a crossing; between equal
/// signs, or at either end of the interval, it is a touch. A sub-grid dip of
/// `|h - μ̂|` whose parabolic fit reaches the band is also reported as a
/// touch. Crossings are sorted by `r_star`, touches by `r_approx`.
pub fn find_crossings_banded(
    model: &WarpedModel,
    spec: &FiberSpectrum,
    interval: (f64, f64),
    grid_points: usize,
    tol: f64,
    degeneracy_tol: f64,
) -> Result<CrossingSet, AnalysisError> {
    check_tolerance("tol", tol)?;
    check_tolerance("degeneracy_tol", degeneracy_tol)?;
    let grid = GridSpec::new(interval.0, interval.1, grid_points)?;
    model.check_radius(grid.r_min)?;
    model.check_radius(grid.r_max)?;

    let nodes = grid.nodes();
    let hs = sample_h(model, &nodes)?;
    let h_min = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let h_max = sampled_peak(&hs);
    let table = LevelTable::up_to(spec, h_max + band(degeneracy_tol, h_max))?;

    let mut out = CrossingSet::default();
    for level in table.levels() {
        let width = band(degeneracy_tol, level.value);
        if level.value < h_min - width {
            continue;
        }
        scan_level(model, &nodes, &hs, *level, width, tol, &mut out)?;
    }
    out.crossings.sort_by(|a, b| {
        a.r_star
            .total_cmp(&b.r_star)
            .then(a.eigenvalue.total_cmp(&b.eigenvalue))
    });
    out.touches.sort_by(|a, b| {
        a.r_approx
            .total_cmp(&b.r_approx)
            .then(a.eigenvalue.total_cmp(&b.eigenvalue))
    });
    Ok(out)
}

/// Largest sampled `h`, raised to the vertex of the parabola through any
/// interior local maximum so that levels just above the samples are scanned
/// for sub-grid dips too.
fn sampled_peak(hs: &[f64]) -> f64 {
    let mut peak = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for w in hs.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let curvature = a - 2.0 * b + c;
        if b >= a && b >= c && curvature < 0.0 {
            peak = peak.max(b - (a - c).powi(2) / (8.0 * curvature));
        }
    }
    peak
}

fn sign(g: f64, width: f64) -> i8 {
    if g > width {
        1
    } else if g < -width {
        -1
    } else {
        0
    }
}

fn scan_level(
    model: &WarpedModel,
    nodes: &[f64],
    hs: &[f64],
    level: SpectralLevel,
    width: f64,
    tol: f64,
    out: &mut CrossingSet,
) -> Result<(), AnalysisError> {
    let mu = level.value;
    let g: Vec<f64> = hs.iter().map(|h| h - mu).collect();
    let s: Vec<i8> = g.iter().map(|&v| sign(v, width)).collect();
    let touch = |a: usize, b: usize, r_approx: f64| TouchEvent {
        r_approx,
        window: (nodes[a], nodes[b]),
        eigenvalue: mu,
        multiplicity: level.multiplicity,
    };

    // Walk maximal runs of zero-classified nodes between signed nodes.
    let mut last_signed: Option<usize> = None;
    let mut k = 0;
    while k < nodes.len() {
        if s[k] == 0 {
            let start = k;
            while k < nodes.len() && s[k] == 0 {
                k += 1;
            }
            let end = k - 1;
            match (last_signed, nodes.get(k)) {
                (Some(p), Some(_)) if s[p] != s[k] => {
                    out.crossings
                        .push(refine(model, nodes, &g, p, k, level, tol)?);
                    last_signed = Some(k);
                }
                (Some(p), Some(_)) => {
                    out.touches
                        .push(touch(p, k, 0.5 * (nodes[start] + nodes[end])));
                    last_signed = Some(k);
                }
                (p, next) => {
                    let a = p.unwrap_or(start);
                    let b = if next.is_some() { k } else { end };
                    out.touches
                        .push(touch(a, b, 0.5 * (nodes[start] + nodes[end])));
                    if next.is_some() {
                        last_signed = Some(k);
                    }
                }
            }
            k += 1;
            continue;
        }
        if let Some(p) = last_signed {
            if p + 1 == k && s[p] != s[k] {
                out.crossings
                    .push(refine(model, nodes, &g, p, k, level, tol)?);
            }
        }
        last_signed = Some(k);
        k += 1;
    }

    // Sub-grid dips: a strict local minimum of |g| among three signed nodes of
    // one sign whose parabola reaches the band.
    for k in 1..nodes.len().saturating_sub(1) {
        let (a, b, c) = (k - 1, k, k + 1);
        if s[a] == 0 || s[a] != s[b] || s[b] != s[c] {
            continue;
        }
        if !(g[b].abs() < g[a].abs() && g[b].abs() <= g[c].abs()) {
            continue;
        }
        let curvature = g[a] - 2.0 * g[b] + g[c];
        if curvature == 0.0 || !curvature.is_finite() {
            continue;
        }
        let step = 0.5 * (nodes[c] - nodes[a]);
        let offset = step * (g[a] - g[c]) / (2.0 * curvature);
        if offset.abs() > step {
            continue;
        }
        let vertex = g[b] - (g[a] - g[c]).powi(2) / (8.0 * curvature);
        if sign(vertex, width) != s[b] {
            out.touches.push(touch(a, c, nodes[b] + offset));
        }
    }
    Ok(())
}

fn refine(
    model: &WarpedModel,
    nodes: &[f64],
    g: &[f64],
    p: usize,
    k: usize,
    level: SpectralLevel,
    tol: f64,
) -> Result<CrossingEvent, AnalysisError> {
    let mu = level.value;
    let start = Bracket {
        lo: nodes[p],
        hi: nodes[k],
        f_lo: g[p],
        f_hi: g[k],
    };
    let f = |r: f64| -> Result<f64, AnalysisError> { Ok(model.stability_h(r)? - mu) };
    let b = bisect_bracket(f, start, Stop::Absolute(tol))?;
    let up = g[p] < 0.0;
    let jump = i64::try_from(level.multiplicity).unwrap_or(i64::MAX);
    Ok(CrossingEvent {
        r_star: b.midpoint(),
        bracket: (b.lo, b.hi),
        eigenvalue: mu,
        multiplicity: level.multiplicity,
        direction: if up { Direction::Up } else { Direction::Down },
        index_jump: if up { jump } else { -jump },
    })
}
