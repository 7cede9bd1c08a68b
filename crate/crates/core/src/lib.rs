//! Discrete-time quadratic population map on the nonnegative orthant,
//!
//! ```text
//! x'_k = (θ_k x_k / 2) (x_k + 2 Σ_{i≠k} x_i),   θ_k > 0
//! ```
//!
//! with its fixed points, their local stability, trajectory fates, invariant
//! regions and the planar basin boundary.

pub mod cli;
pub mod dynamics;
mod error;
pub mod fixed_points;
pub mod linalg;
pub mod model;
pub mod sampling;
pub mod stability;

pub use error::{QdynError, Result};
pub use num_complex::Complex64;
pub use fixed_points::{
    coefficient_determinant, enumerate_fixed_points, fixed_point_for_support, interior_fixed_point, FixedPoint,
    SupportMask,
};
pub use model::{apply, jacobian, SquareMatrix, State, ThetaParams};
pub use stability::{classify, spectrum_at, Spectrum, StabilityClass, StabilityTag};
