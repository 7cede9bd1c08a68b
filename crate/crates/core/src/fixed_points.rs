//! Closed-form enumeration of the `2ⁿ` algebraic fixed points.
//!
//! A fixed point is determined by its support `S` (the coordinates that are
//! nonzero). On `S` the fixed-point equations reduce to the linear system
//!
//! ```text
//! x_k + 2 Σ_{i∈S, i≠k} x_i = 2/θ_k,   k ∈ S
//! ```
//!
//! whose coefficient matrix (1 on the diagonal, 2 elsewhere) has determinant
//! `(−1)^{m−1}(2m−1)` with `m = |S|`. Cramer's rule then gives
//!
//! ```text
//! x_i = (4 Σ_{j∈S, j≠i} 1/θ_j − (4m − 6)/θ_i) / (2m − 1).
//! ```

use serde::Serialize;

use crate::error::{QdynError, Result};
use crate::model::{self, SquareMatrix, State, ThetaParams};

/// Largest dimension `enumerate_fixed_points` accepts.
pub const MAX_ENUMERATION_DIM: usize = 20;

/// Residual ceiling a constructed feasible fixed point must meet.
pub const FIXED_POINT_RESIDUAL_TOL: f64 = 1e-10;

/// The set of coordinates on which a fixed point is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SupportMask {
    n: usize,
    nonzero: Vec<usize>,
}

impl SupportMask {
    /// Zero-based indices; duplicates or out-of-range entries are rejected.
    pub fn new(n: usize, mut nonzero: Vec<usize>) -> Result<Self> {
        nonzero.sort_unstable();
        if let Some(&bad) = nonzero.iter().find(|&&i| i >= n) {
            return Err(QdynError::InvalidSupport(format!("index {bad} out of range for n = {n}")));
        }
        if nonzero.windows(2).any(|w| w[0] == w[1]) {
            return Err(QdynError::InvalidSupport("duplicate index".into()));
        }
        Ok(Self { n, nonzero })
    }

    /// One flag per coordinate, `true` where the coordinate is nonzero.
    pub fn from_flags(flags: &[bool]) -> Self {
        Self {
            n: flags.len(),
            nonzero: flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect(),
        }
    }

    /// Bit `k` of `bits` marks coordinate `k` (least significant bit is the
    /// first coordinate).
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n < 64 && bits >> n != 0 {
            return Err(QdynError::InvalidSupport(format!("bits {bits:#b} exceed n = {n}")));
        }
        Ok(Self {
            n,
            nonzero: (0..n.min(64)).filter(|k| bits >> k & 1 == 1).collect(),
        })
    }

    pub fn full(n: usize) -> Self {
        Self { n, nonzero: (0..n).collect() }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, nonzero: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.nonzero
    }

    pub fn len(&self) -> usize {
        self.nonzero.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nonzero.is_empty()
    }

    /// Number of zero coordinates, `r = n − |support|`.
    pub fn zero_count(&self) -> usize {
        self.n - self.nonzero.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.nonzero.binary_search(&k).is_ok()
    }

    pub fn flags(&self) -> Vec<bool> {
        (0..self.n).map(|k| self.contains(k)).collect()
    }

    /// The mask as an integer, `None` if `n ≥ 64`.
    pub fn bits(&self) -> Option<u64> {
        (self.n < 64).then(|| self.nonzero.iter().fold(0u64, |b, &k| b | 1 << k))
    }
}

/// An algebraic fixed point. Coordinates may be negative, in which case the
/// point is outside the orthant and flagged infeasible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub coords: Vec<f64>,
    pub support: SupportMask,
    /// Every coordinate `≥ 0`.
    pub feasible: bool,
    /// `‖H(x) − x‖∞`.
    pub residual: f64,
}

impl FixedPoint {
    fn build(theta: &[f64], coords: Vec<f64>, support: SupportMask) -> Self {
        let feasible = coords.iter().all(|v| *v >= 0.0);
        let residual = model::fixed_point_residual(theta, &coords);
        Self { coords, support, feasible, residual }
    }

    pub fn is_origin(&self) -> bool {
        self.support.is_empty()
    }

    pub fn norm_inf(&self) -> f64 {
        model::norm_inf(&self.coords)
    }

    /// The point as an orthant state, when feasible.
    pub fn to_state(&self) -> Option<State> {
        self.feasible.then(|| State::from_trusted(self.coords.clone()))
    }
}

/// Solves the reduced system for the rates of one support.
fn solve_support(theta: &[f64]) -> Vec<f64> {
    match theta {
        [] => Vec::new(),
        [t] => vec![2.0 / t],
        _ => {
            let m = theta.len() as f64;
            let recips: Vec<f64> = theta.iter().map(|t| t.recip()).collect();
            let total: f64 = recips.iter().sum();
            recips
                .iter()
                .map(|r| (4.0 * (total - r) - (4.0 * m - 6.0) * r) / (2.0 * m - 1.0))
                .collect()
        }
    }
}

/// The fixed point with every coordinate nonzero.
pub fn interior_fixed_point(params: &ThetaParams) -> FixedPoint {
    let coords = solve_support(params.as_slice());
    FixedPoint::build(params.as_slice(), coords, SupportMask::full(params.dim()))
}

/// The fixed point vanishing exactly off `support`.
pub fn fixed_point_for_support(params: &ThetaParams, support: &SupportMask) -> Result<FixedPoint> {
    let reduced = solve_support(&params.restrict(support)?);
    let mut coords = vec![0.0; params.dim()];
    for (&k, v) in support.indices().iter().zip(reduced) {
        coords[k] = v;
    }
    Ok(FixedPoint::build(params.as_slice(), coords, support.clone()))
}

/// All `2ⁿ` fixed points, ordered by support mask read as a binary number
/// with the first coordinate in the least significant bit.
pub fn enumerate_fixed_points(params: &ThetaParams) -> Result<Vec<FixedPoint>> {
    let n = params.dim();
    if n > MAX_ENUMERATION_DIM {
        return Err(QdynError::DimensionOverCap { n, cap: MAX_ENUMERATION_DIM });
    }
    (0..1u64 << n)
        .map(|bits| fixed_point_for_support(params, &SupportMask::from_bits(n, bits)?))
        .collect()
}

/// `(−1)^{n−1}(2n−1)`, the determinant of the `n × n` matrix with ones on the
/// diagonal and twos elsewhere.
pub fn coefficient_determinant(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(QdynError::Precondition("n must be ≥ 1".into()));
    }
    let magnitude = (2 * n - 1) as f64;
    Ok(if n % 2 == 1 { magnitude } else { -magnitude })
}

/// The coefficient matrix itself, for cross-checking the closed form.
pub fn coefficient_matrix(n: usize) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = if r == c { 1.0 } else { 2.0 };
        }
    }
    m
}
