//! Polyhedral invariant regions.
//!
//! With `g_k(x) = x_k + 2 Σ_{i≠k} x_i`, the general regions are
//! `M̄₁ = {g_k(x) ≤ 2/θ_k ∀k}` (trajectories decay to the origin) and
//! `M̄₂ = {g_k(x) ≥ 2/θ_k ∀k}` (trajectories escape). For `n = 2` the planar
//! sets `M1`–`M6` refine these under conditions on `θ₁, θ₂`.

use std::fmt;

use serde::Serialize;

use crate::error::{QdynError, Result};
use crate::model::{State, ThetaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionKind {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    Mbar1,
    Mbar2,
}

impl RegionKind {
    pub const ALL: [RegionKind; 8] = [
        Self::M1,
        Self::M2,
        Self::M3,
        Self::M4,
        Self::M5,
        Self::M6,
        Self::Mbar1,
        Self::Mbar2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::M1 => "M1",
            Self::M2 => "M2",
            Self::M3 => "M3",
            Self::M4 => "M4",
            Self::M5 => "M5",
            Self::M6 => "M6",
            Self::Mbar1 => "Mbar1",
            Self::Mbar2 => "Mbar2",
        }
    }

    /// Whether trajectories starting inside decay to the origin (as opposed
    /// to escaping).
    pub fn decays(self) -> bool {
        matches!(self, Self::M1 | Self::M3 | Self::M5 | Self::Mbar1)
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A region together with the rate condition under which it is invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
}

impl RegionSpec {
    pub fn new(kind: RegionKind) -> Self {
        Self { kind }
    }

    /// Human-readable applicability condition.
    pub fn applicability(&self) -> &'static str {
        match self.kind {
            RegionKind::M1 | RegionKind::M2 => "n = 2, θ₁ < 2θ₂ and θ₂ < 2θ₁",
            RegionKind::M3 | RegionKind::M4 => "n = 2, θ₁ > 2θ₂",
            RegionKind::M5 | RegionKind::M6 => "n = 2, θ₂ > 2θ₁",
            RegionKind::Mbar1 | RegionKind::Mbar2 => "any n",
        }
    }

    pub fn check_applicable(&self, params: &ThetaParams) -> Result<()> {
        let kind = self.kind;
        if matches!(kind, RegionKind::Mbar1 | RegionKind::Mbar2) {
            return Ok(());
        }
        let not_applicable = |reason: String| QdynError::RegionNotApplicable { region: kind.name(), reason };
        let &[t1, t2] = params.as_slice() else {
            return Err(not_applicable(format!("requires n = 2, got n = {}", params.dim())));
        };
        let ok = match kind {
            RegionKind::M1 | RegionKind::M2 => t1 < 2.0 * t2 && t2 < 2.0 * t1,
            RegionKind::M3 | RegionKind::M4 => t1 > 2.0 * t2,
            _ => t2 > 2.0 * t1,
        };
        if ok {
            Ok(())
        } else {
            Err(not_applicable(format!("requires {}, got θ = ({t1}, {t2})", self.applicability())))
        }
    }
}

/// `g_k(x) = x_k + 2 Σ_{i≠k} x_i` for every `k`.
pub(crate) fn weighted_sums(x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    x.iter().map(|xk| 2.0 * total - xk).collect()
}

/// Relative slack on the closed inequalities, so that points solving the
/// equalities (up to rounding) belong to both closed regions.
pub const MEMBERSHIP_SLACK: f64 = 1e-14;

/// Closed (non-strict) membership, as the regions are defined.
pub fn region_membership(params: &ThetaParams, x: &State, region: RegionSpec) -> Result<bool> {
    params.check_dim(x.dim())?;
    region.check_applicable(params)?;
    let theta = params.as_slice();
    let g = weighted_sums(x.as_slice());
    let below = |k: usize| g[k] <= 2.0 / theta[k] * (1.0 + MEMBERSHIP_SLACK);
    let above = |k: usize| g[k] >= 2.0 / theta[k] * (1.0 - MEMBERSHIP_SLACK);
    Ok(match region.kind {
        RegionKind::M1 => below(0) && below(1),
        RegionKind::M2 => above(0) && above(1),
        RegionKind::M3 => below(0),
        RegionKind::M4 => above(1),
        RegionKind::M5 => below(1),
        RegionKind::M6 => above(0),
        RegionKind::Mbar1 => (0..g.len()).all(below),
        RegionKind::Mbar2 => (0..g.len()).all(above),
    })
}

/// Which general region `x` lies strictly inside, by relative `margin`.
/// Points on the bounding hyperplanes (for example the interior fixed point,
/// which satisfies every equality) belong to neither.
pub(crate) fn strict_general_region(theta: &[f64], x: &[f64], margin: f64) -> Option<RegionKind> {
    let g = weighted_sums(x);
    let mut below = true;
    let mut above = true;
    for (gk, t) in g.iter().zip(theta) {
        let bound = 2.0 / t;
        below &= *gk < bound * (1.0 - margin);
        above &= *gk > bound * (1.0 + margin);
        if !below && !above {
            return None;
        }
    }
    if below {
        Some(RegionKind::Mbar1)
    } else if above {
        Some(RegionKind::Mbar2)
    } else {
        None
    }
}
