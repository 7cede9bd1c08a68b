//! Invariant lines through the interior fixed point.
//!
//! The ray from the origin through the interior fixed point `x̄` is invariant:
//! every `x_p / x_q` along it equals `x̄_p / x̄_q`, and the map preserves those
//! ratios because `x̄` solves `x_k + 2Σ_{i≠k} x_i = 2/θ_k`. Points on the
//! ray before `x̄` decay, points past it escape.

use serde::Serialize;

use crate::error::{QdynError, Result};
use crate::fixed_points::interior_fixed_point;
use crate::model::{State, ThetaParams};

/// Slope of the planar unstable line `x2 = slope · x1`,
/// `(2θ₂ − θ₁) / (2θ₁ − θ₂)`.
pub fn unstable_line_slope(params: &ThetaParams) -> Result<f64> {
    let [t1, t2] = planar(params)?;
    let denom = 2.0 * t1 - t2;
    if denom == 0.0 {
        return Err(QdynError::VerticalLine);
    }
    Ok((2.0 * t2 - t1) / denom)
}

/// Direction of the invariant ray, scaled to unit ∞-norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayDirection {
    direction: Vec<f64>,
    /// Ray parameter at which the interior fixed point sits,
    /// `x̄ = anchor · direction`.
    anchor: f64,
}

impl RayDirection {
    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn fixed_point_parameter(&self) -> f64 {
        self.anchor
    }

    /// `t · direction`, for `t ≥ 0`.
    pub fn point_at(&self, t: f64) -> Result<State> {
        State::new(self.direction.iter().map(|d| t * d).collect())
    }

    /// The point at `s` times the interior fixed point.
    pub fn relative_point(&self, s: f64) -> Result<State> {
        self.point_at(s * self.anchor)
    }
}

pub fn unstable_ray(params: &ThetaParams) -> Result<RayDirection> {
    let fp = interior_fixed_point(params);
    if !fp.feasible {
        return Err(QdynError::InfeasibleInterior);
    }
    let anchor = fp.norm_inf();
    Ok(RayDirection { direction: fp.coords.iter().map(|v| v / anchor).collect(), anchor })
}

/// Tangent `(1, −θ₂/θ₁)` of the stable curve at the planar interior saddle.
/// It is the eigenvector of the Jacobian there for the eigenvalue other
/// than 2.
pub fn stable_tangent_n2(params: &ThetaParams) -> Result<[f64; 2]> {
    let [t1, t2] = planar(params)?;
    if !(2.0 * t1 > t2 && 2.0 * t2 > t1) {
        return Err(QdynError::InfeasibleInterior);
    }
    Ok([1.0, -t2 / t1])
}

fn planar(params: &ThetaParams) -> Result<[f64; 2]> {
    match *params.as_slice() {
        [t1, t2] => Ok([t1, t2]),
        _ => Err(QdynError::Precondition(format!("n must be 2 (got {})", params.dim()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply, eval_jacobian};
    use crate::stability::planar_interior_second_eigenvalue;
    use approx::assert_relative_eq;

    fn theta(v: &[f64]) -> ThetaParams {
        ThetaParams::new(v.to_vec()).unwrap()
    }

    #[test]
    fn slopes() {
        assert_relative_eq!(unstable_line_slope(&theta(&[0.4, 0.6])).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(unstable_line_slope(&theta(&[1.0, 1.0])).unwrap(), 1.0);
        assert_relative_eq!(unstable_line_slope(&theta(&[0.6, 0.4])).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(unstable_line_slope(&theta(&[1.0, 2.0])), Err(QdynError::VerticalLine));
        assert!(unstable_line_slope(&theta(&[1.0, 2.0, 3.0])).is_err());
        // the slope is the coordinate ratio of the interior point
        let fp = interior_fixed_point(&theta(&[0.4, 0.6]));
        assert_relative_eq!(fp.coords[1] / fp.coords[0], 4.0, epsilon = 1e-14);
    }

    #[test]
    fn rays() {
        let r = unstable_ray(&theta(&[1.0, 1.0, 1.0])).unwrap();
        for d in r.direction() {
            assert_relative_eq!(*d, 1.0, epsilon = 1e-15);
        }
        let r = unstable_ray(&theta(&[0.4, 0.6])).unwrap();
        assert_relative_eq!(r.direction()[0], 0.25, epsilon = 1e-15);
        assert_eq!(r.direction()[1], 1.0);
        assert_eq!(unstable_ray(&theta(&[0.8, 0.2])), Err(QdynError::InfeasibleInterior));
    }

    #[test]
    fn ray_ratios_survive_one_step() {
        let p = theta(&[1.0, 1.0, 1.5]);
        let r = unstable_ray(&p).unwrap();
        let x = r.point_at(0.3).unwrap();
        let y = apply(&p, &x).unwrap();
        for k in 1..3 {
            let before = x[k] / x[0];
            let after = y[k] / y[0];
            assert!((after - before).abs() <= 1e-12 * before.abs());
        }
    }

    #[test]
    fn tangents() {
        for (t, slope) in [([0.4, 0.6], -1.5), ([1.0, 1.0], -1.0), ([0.5, 0.8], -1.6)] {
            let v = stable_tangent_n2(&theta(&t)).unwrap();
            assert_eq!(v[0], 1.0);
            assert_relative_eq!(v[1], slope, epsilon = 1e-15);
        }
        assert!(stable_tangent_n2(&theta(&[0.8, 0.2])).is_err());
        assert!(stable_tangent_n2(&theta(&[0.8, 0.2, 1.0])).is_err());
        for t in [[0.4, 0.6], [1.0, 1.0], [0.5, 0.8]] {
            let p = theta(&t);
            let v = stable_tangent_n2(&p).unwrap();
            let j = eval_jacobian(p.as_slice(), &interior_fixed_point(&p).coords);
            let lambda = planar_interior_second_eigenvalue(&p).unwrap();
            let jv = j.mul_vec(&v);
            for k in 0..2 {
                assert!((jv[k] - lambda * v[k]).abs() <= 1e-10, "{t:?}");
            }
        }
        assert_relative_eq!(
            planar_interior_second_eigenvalue(&theta(&[0.4, 0.6])).unwrap(),
            7.0 / 9.0,
            epsilon = 1e-15
        );
    }
}
