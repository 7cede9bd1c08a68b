//! Numerical extraction of the planar basin boundary.
//!
//! Along each vertical line `x1 = const` the orthant splits into initial
//! points that decay to the origin (below) and points that escape (above).
//! The boundary is bracketed by doubling the upper end, probed for a single
//! fate flip, then bisected.

use rayon::prelude::*;
use serde::Serialize;

use super::fate::{classify_fate_with, Fate, FateConfig};
use crate::error::{QdynError, Result};
use crate::model::{State, ThetaParams};

/// Upper-bracket doublings attempted before giving up.
pub const MAX_DOUBLINGS: usize = 60;

/// Why a sample cannot be trusted as a boundary bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFlag {
    /// `(x1, 0)` does not decay; the boundary meets the axis at or before
    /// this `x1`. The bracket is reported as `[0, 0]`.
    LowerNotOrigin,
    /// No escaping point found within the doubling limit.
    UpperNotFound,
    /// A probe or bisection point exhausted its iteration budget.
    Undetermined,
    /// An escaping probe lies below a decaying one.
    MultipleFlips,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySample {
    pub x1: f64,
    /// Highest point known to decay.
    pub x2_low: f64,
    /// Lowest point known to escape.
    pub x2_high: f64,
    pub width: f64,
    pub flag: Option<BoundaryFlag>,
}

impl BoundarySample {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x2_low + self.x2_high)
    }

    pub fn is_flagged(&self) -> bool {
        self.flag.is_some()
    }
}

/// One bracketed boundary point per entry of `x1_grid`, in grid order.
/// Grid points are processed in parallel.
pub fn basin_boundary(params: &ThetaParams, x1_grid: &[f64], tol: f64, budget: usize) -> Result<Vec<BoundarySample>> {
    if params.dim() != 2 {
        return Err(QdynError::Precondition(format!(
            "basin boundary requires n = 2 (got {})",
            params.dim()
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QdynError::Precondition(format!("tol must be finite and > 0 (got {tol})")));
    }
    if budget == 0 {
        return Err(QdynError::Precondition("budget must be ≥ 1".into()));
    }
    if let Some(&bad) = x1_grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(QdynError::Precondition(format!("x1 grid values must be finite and ≥ 0 (got {bad})")));
    }
    let cfg = FateConfig { fixed_point_tol: None, ..FateConfig::default() };
    x1_grid
        .par_iter()
        .map(|&x1| boundary_at(params, x1, tol, budget, &cfg))
        .collect()
}

fn boundary_at(params: &ThetaParams, x1: f64, tol: f64, budget: usize, cfg: &FateConfig) -> Result<BoundarySample> {
    let fate = |x2: f64| -> Result<Fate> {
        let x = State::new(vec![x1, x2])?;
        Ok(classify_fate_with(params, &x, budget, cfg)?.outcome)
    };
    let sample = |lo: f64, hi: f64, flag: Option<BoundaryFlag>| BoundarySample {
        x1,
        x2_low: lo,
        x2_high: hi,
        width: hi - lo,
        flag,
    };

    match fate(0.0)? {
        Fate::ToOrigin => {}
        Fate::Undetermined => return Ok(sample(0.0, 0.0, Some(BoundaryFlag::Undetermined))),
        _ => return Ok(sample(0.0, 0.0, Some(BoundaryFlag::LowerNotOrigin))),
    }

    let mut lo = 0.0;
    // (0, 2/θ₂) is a fixed point on the boundary; start off it so no dyadic
    // probe lands there exactly
    let mut hi = 1.5 * (2.0 / params.as_slice()[1]).max(1.0);
    let mut found = false;
    for _ in 0..=MAX_DOUBLINGS {
        match fate(hi)? {
            Fate::ToInfinity => {
                found = true;
                break;
            }
            Fate::ToOrigin => lo = hi,
            _ => {}
        }
        hi *= 2.0;
    }
    if !found {
        return Ok(sample(lo, hi, Some(BoundaryFlag::UpperNotFound)));
    }

    // Probe the bracket: fates must read origin…origin, infinity…infinity.
    let mut flag = None;
    let probes = [0.25, 0.5, 0.75].map(|f| lo + f * (hi - lo));
    let mut seen_infinity = false;
    let (mut new_lo, mut new_hi) = (lo, hi);
    for &p in &probes {
        match fate(p)? {
            Fate::ToOrigin if seen_infinity => flag = Some(BoundaryFlag::MultipleFlips),
            Fate::ToOrigin => new_lo = p,
            Fate::ToInfinity => {
                if !seen_infinity {
                    new_hi = p;
                }
                seen_infinity = true;
            }
            _ => flag = flag.or(Some(BoundaryFlag::Undetermined)),
        }
    }
    if flag.is_none() {
        lo = new_lo;
        hi = new_hi;
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match fate(mid)? {
            Fate::ToOrigin => lo = mid,
            Fate::ToInfinity => hi = mid,
            _ => {
                flag = flag.or(Some(BoundaryFlag::Undetermined));
                break;
            }
        }
    }
    Ok(sample(lo, hi, flag))
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}
