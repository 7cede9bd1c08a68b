//! The quadratic operator
//!
//! ```text
//! x'_k = (θ_k x_k / 2) · (x_k + 2 Σ_{i≠k} x_i),   k = 1..n
//! ```
//!
//! on the nonnegative orthant, together with its Jacobian and the
//! validated parameter and state types everything else builds on.

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{QdynError, Result};
use crate::fixed_points::SupportMask;

/// Strictly positive per-coordinate rates `θ_1, …, θ_n` with `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ThetaParams {
    theta: Vec<f64>,
}

impl ThetaParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.len() < 2 {
            return Err(QdynError::DimensionTooSmall { n: theta.len() });
        }
        if let Some((index, &value)) = theta
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(QdynError::NonPositiveRate { index, value });
        }
        Ok(Self { theta })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    /// `Σ_j 1/θ_j` over all coordinates.
    pub fn reciprocal_sum(&self) -> f64 {
        self.theta.iter().map(|t| t.recip()).sum()
    }

    /// `Σ_{j ∈ support} 1/θ_j`, the reciprocal sum restricted to a support.
    pub fn restricted_reciprocal_sum(&self, support: &SupportMask) -> Result<f64> {
        self.check_support(support)?;
        Ok(support.indices().iter().map(|&j| self.theta[j].recip()).sum())
    }

    /// The rates indexed by `support`, in ascending coordinate order.
    pub fn restrict(&self, support: &SupportMask) -> Result<Vec<f64>> {
        self.check_support(support)?;
        Ok(support.indices().iter().map(|&j| self.theta[j]).collect())
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(QdynError::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    fn check_support(&self, support: &SupportMask) -> Result<()> {
        self.check_dim(support.dim())
    }
}

/// A point of the nonnegative orthant: finite, every coordinate `≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct State {
    x: Vec<f64>,
}

impl State {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(QdynError::InvalidState { index, value });
        }
        Ok(Self { x })
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.x
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.x)
    }

    /// Scales every coordinate by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.x.iter().map(|v| c * v).collect())
    }

    /// Wraps values already known to satisfy the invariant.
    pub(crate) fn from_trusted(x: Vec<f64>) -> Self {
        debug_assert!(x.iter().all(|v| !v.is_nan() && *v >= 0.0));
        Self { x }
    }
}

impl Index<usize> for State {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.x[k]
    }
}

/// Dense row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data; the length must be a perfect square
    /// and every entry finite.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(QdynError::DimensionMismatch { expected: n * n, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(QdynError::Precondition("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `self − s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= s;
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// One application of the operator to a point of the orthant.
pub fn apply(params: &ThetaParams, x: &State) -> Result<State> {
    params.check_dim(x.dim())?;
    Ok(State::from_trusted(eval_map(params.as_slice(), x.as_slice())))
}

/// The Jacobian: row `k` holds `θ_k x_k` off the diagonal and `θ_k Σ_i x_i`
/// on it.
pub fn jacobian(params: &ThetaParams, x: &State) -> Result<SquareMatrix> {
    params.check_dim(x.dim())?;
    Ok(eval_jacobian(params.as_slice(), x.as_slice()))
}

/// The operator as a polynomial map on all of ℝⁿ. Algebraic fixed points
/// with negative coordinates are evaluated through this path.
pub(crate) fn eval_map(theta: &[f64], x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    theta
        .iter()
        .zip(x)
        .map(|(&t, &xk)| {
            // x_k + 2 Σ_{i≠k} x_i = 2·total − x_k
            0.5 * t * xk * (2.0 * total - xk)
        })
        .collect()
}

pub(crate) fn eval_jacobian(theta: &[f64], x: &[f64]) -> SquareMatrix {
    let n = x.len();
    let total: f64 = x.iter().sum();
    let mut j = SquareMatrix::zeros(n);
    for k in 0..n {
        let off = theta[k] * x[k];
        for c in 0..n {
            j[(k, c)] = if c == k { theta[k] * total } else { off };
        }
    }
    j
}

pub(crate) fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖H(x) − x‖∞` for any real vector.
pub(crate) fn fixed_point_residual(theta: &[f64], x: &[f64]) -> f64 {
    eval_map(theta, x)
        .iter()
        .zip(x)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}
