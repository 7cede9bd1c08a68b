//! Trajectory iteration and fate classification.

use std::fmt;

use serde::Serialize;

use super::regions::{strict_general_region, RegionKind};
use crate::error::{QdynError, Result};
use crate::fixed_points::{fixed_point_for_support, SupportMask};
use crate::model::{self, State, ThetaParams};

pub const DEFAULT_EPS_CONV: f64 = 1e-12;
pub const DEFAULT_R_ESCAPE: f64 = 1e8;
pub const DEFAULT_BUDGET: usize = 100_000;
/// Relative distance at which a starting point counts as a fixed point.
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-6;
/// Relative margin for strict region containment.
pub const DEFAULT_REGION_MARGIN: f64 = 1e-12;

/// Stopping thresholds shared by [`iterate_with`] and [`classify_fate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FateConfig {
    /// Converged once `‖x‖∞` drops below this.
    pub eps_conv: f64,
    /// Escaped once `‖x‖∞` exceeds this.
    pub r_escape: f64,
    /// Proximity test applied to the starting point; `None` disables it.
    pub fixed_point_tol: Option<f64>,
    pub region_margin: f64,
}

impl Default for FateConfig {
    fn default() -> Self {
        Self {
            eps_conv: DEFAULT_EPS_CONV,
            r_escape: DEFAULT_R_ESCAPE,
            fixed_point_tol: Some(DEFAULT_FIXED_POINT_TOL),
            region_margin: DEFAULT_REGION_MARGIN,
        }
    }
}

impl FateConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(QdynError::Precondition(format!("{name} must be finite and > 0 (got {v})")))
            }
        };
        positive("eps_conv", self.eps_conv)?;
        positive("r_escape", self.r_escape)?;
        if let Some(tol) = self.fixed_point_tol {
            positive("fixed_point_tol", tol)?;
        }
        if !(self.region_margin >= 0.0 && self.region_margin < 1.0) {
            return Err(QdynError::Precondition(format!(
                "region_margin must lie in [0, 1) (got {})",
                self.region_margin
            )));
        }
        Ok(())
    }
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// All requested steps were taken.
    Completed,
    /// `‖x‖∞ < eps_conv`.
    Converged,
    /// `‖x‖∞ > r_escape`.
    Escaped,
    /// The next iterate was not finite; it is not included.
    Overflow { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// `x0, H(x0), H²(x0), …`
    pub states: Vec<State>,
    pub termination: Termination,
}

/// Iterates with default thresholds.
pub fn iterate(params: &ThetaParams, x0: &State, max_steps: usize) -> Result<Trajectory> {
    iterate_with(params, x0, max_steps, &FateConfig::default())
}

pub fn iterate_with(params: &ThetaParams, x0: &State, max_steps: usize, cfg: &FateConfig) -> Result<Trajectory> {
    params.check_dim(x0.dim())?;
    cfg.validate()?;
    let theta = params.as_slice();
    let mut states = vec![x0.clone()];
    let termination = 'run: {
        for step in 0..=max_steps {
            let x = states.last().expect("nonempty").as_slice();
            let norm = model::norm_inf(x);
            if norm < cfg.eps_conv {
                break 'run Termination::Converged;
            }
            if norm > cfg.r_escape {
                break 'run Termination::Escaped;
            }
            if step == max_steps {
                break;
            }
            let next = model::eval_map(theta, x);
            if next.iter().any(|v| !v.is_finite()) {
                break 'run Termination::Overflow { step: step + 1 };
            }
            states.push(State::from_trusted(next));
        }
        Termination::Completed
    };
    Ok(Trajectory { states, termination })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fate {
    ToOrigin,
    ToInfinity,
    /// Index into the mask-ordered fixed-point enumeration (the support mask
    /// read as a binary number).
    ToFixedPoint { index: usize },
    Undetermined,
}

impl Fate {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ToOrigin => "to_origin",
            Self::ToInfinity => "to_infinity",
            Self::ToFixedPoint { .. } => "to_fixed_point",
            Self::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ToFixedPoint { index } => write!(f, "to_fixed_point({index})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Which stopping rule decided the fate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Evidence {
    RegionContainment { region: RegionKind },
    NormThreshold,
    FixedPointProximity,
    IterationCap,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RegionContainment { region } => write!(f, "region_containment({region})"),
            Self::NormThreshold => f.write_str("norm_threshold"),
            Self::FixedPointProximity => f.write_str("fixed_point_proximity"),
            Self::IterationCap => f.write_str("iteration_cap"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FateReport {
    pub outcome: Fate,
    /// Applications of the operator performed.
    pub steps_used: usize,
    pub final_state: State,
    pub evidence: Evidence,
}

pub fn classify_fate(params: &ThetaParams, x0: &State, budget: usize) -> Result<FateReport> {
    classify_fate_with(params, x0, budget, &FateConfig::default())
}

/// Decides where `x0` goes. A starting point that is a fixed point (within
/// `cfg.fixed_point_tol`) is reported as such; otherwise every iterate is
/// tested for strict containment in the decay or escape region and against
/// the norm thresholds, until `budget` applications are spent.
pub fn classify_fate_with(params: &ThetaParams, x0: &State, budget: usize, cfg: &FateConfig) -> Result<FateReport> {
    params.check_dim(x0.dim())?;
    cfg.validate()?;
    if budget == 0 {
        return Err(QdynError::Precondition("budget must be ≥ 1".into()));
    }
    if let Some(tol) = cfg.fixed_point_tol {
        if let Some(index) = matching_fixed_point(params, x0, tol)? {
            return Ok(FateReport {
                outcome: Fate::ToFixedPoint { index },
                steps_used: 0,
                final_state: x0.clone(),
                evidence: Evidence::FixedPointProximity,
            });
        }
    }

    let theta = params.as_slice();
    let mut x = x0.as_slice().to_vec();
    let mut steps = 0;
    loop {
        let decided = match strict_general_region(theta, &x, cfg.region_margin) {
            Some(region) => {
                let outcome = if region.decays() { Fate::ToOrigin } else { Fate::ToInfinity };
                Some((outcome, Evidence::RegionContainment { region }))
            }
            None => {
                let norm = model::norm_inf(&x);
                if norm < cfg.eps_conv {
                    Some((Fate::ToOrigin, Evidence::NormThreshold))
                } else if norm.is_nan() || norm > cfg.r_escape {
                    Some((Fate::ToInfinity, Evidence::NormThreshold))
                } else {
                    None
                }
            }
        };
        if let Some((outcome, evidence)) = decided {
            return Ok(FateReport { outcome, steps_used: steps, final_state: finite_state(x), evidence });
        }
        if steps == budget {
            return Ok(FateReport {
                outcome: Fate::Undetermined,
                steps_used: steps,
                final_state: State::from_trusted(x),
                evidence: Evidence::IterationCap,
            });
        }
        x = model::eval_map(theta, &x);
        steps += 1;
    }
}

fn finite_state(x: Vec<f64>) -> State {
    State::from_trusted(x.into_iter().map(|v| if v.is_nan() { f64::INFINITY } else { v }).collect())
}

/// Index of the feasible fixed point within relative distance `tol` of `x`.
///
/// Only one candidate can match: the support is read off `x` by discarding
/// coordinates below `tol·max(1, ‖x‖∞)`.
fn matching_fixed_point(params: &ThetaParams, x: &State, tol: f64) -> Result<Option<usize>> {
    let scale = x.norm_inf().max(1.0);
    let flags: Vec<bool> = x.as_slice().iter().map(|v| *v > tol * scale).collect();
    let support = SupportMask::from_flags(&flags);
    let Some(index) = support.bits() else {
        return Ok(None);
    };
    let candidate = fixed_point_for_support(params, &support)?;
    if !candidate.feasible {
        return Ok(None);
    }
    let dist = candidate
        .coords
        .iter()
        .zip(x.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((dist <= tol * candidate.norm_inf().max(1.0)).then_some(index as usize))
}
