//! Trajectories, invariant regions, the planar basin boundary and the
//! invariant lines through the interior fixed point.

mod boundary;
mod fate;
mod manifold;
mod regions;

pub use boundary::{basin_boundary, linspace, BoundaryFlag, BoundarySample, MAX_DOUBLINGS};
pub use fate::{
    classify_fate, classify_fate_with, iterate, iterate_with, Evidence, Fate, FateConfig, FateReport, Termination,
    Trajectory, DEFAULT_BUDGET, DEFAULT_EPS_CONV, DEFAULT_FIXED_POINT_TOL, DEFAULT_REGION_MARGIN, DEFAULT_R_ESCAPE,
};
pub use manifold::{stable_tangent_n2, unstable_line_slope, unstable_ray, RayDirection};
pub use regions::{region_membership, RegionKind, RegionSpec, MEMBERSHIP_SLACK};
