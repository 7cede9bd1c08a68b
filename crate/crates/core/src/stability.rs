//! Jacobian spectra at fixed points and their classification.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QdynError, Result};
use crate::fixed_points::{FixedPoint, SupportMask};
use crate::linalg;
use crate::model::{self, SquareMatrix, ThetaParams};

/// Default half-width of the unit-circle band, relative.
pub const DEFAULT_TAU_UNIT: f64 = 1e-9;

/// Relative tolerance of the nonhyperbolicity certificate.
pub const CERTIFICATE_TOL: f64 = 1e-12;

/// Eigenvalues sorted by descending modulus, then ascending argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| match b.norm().total_cmp(&a.norm()) {
            Ordering::Equal => a.arg().total_cmp(&b.arg()),
            other => other,
        });
        Self { eigenvalues }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Distance from `target` to the nearest eigenvalue.
    pub fn distance_to(&self, target: Complex64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| (e - target).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityTag {
    Attracting,
    Repelling,
    Saddle,
    Nonhyperbolic,
}

impl StabilityTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Attracting => "attracting",
            Self::Repelling => "repelling",
            Self::Saddle => "saddle",
            Self::Nonhyperbolic => "nonhyperbolic",
        }
    }
}

impl fmt::Display for StabilityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification plus the modulus counts it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StabilityClass {
    pub tag: StabilityTag,
    pub inside: usize,
    pub outside: usize,
    pub on_circle: usize,
}

/// Spectrum of any real square matrix.
pub fn spectrum_of(matrix: &SquareMatrix) -> Result<Spectrum> {
    Ok(Spectrum::new(linalg::eigenvalues(matrix)?))
}

/// All eigenvalues of the Jacobian at `point`.
pub fn spectrum_at(params: &ThetaParams, point: &FixedPoint) -> Result<Spectrum> {
    params.check_dim(point.coords.len())?;
    spectrum_of(&model::eval_jacobian(params.as_slice(), &point.coords))
}

/// Counts moduli against the band `[1 − tol, 1 + tol]` and tags the result.
pub fn classify(spectrum: &Spectrum, tol: f64) -> StabilityClass {
    let (mut inside, mut outside, mut on_circle) = (0, 0, 0);
    for e in spectrum.eigenvalues() {
        let m = e.norm();
        if m < 1.0 - tol {
            inside += 1;
        } else if m > 1.0 + tol {
            outside += 1;
        } else {
            on_circle += 1;
        }
    }
    let tag = if on_circle > 0 {
        StabilityTag::Nonhyperbolic
    } else if outside == 0 {
        StabilityTag::Attracting
    } else if inside == 0 {
        StabilityTag::Repelling
    } else {
        StabilityTag::Saddle
    };
    StabilityClass { tag, inside, outside, on_circle }
}

/// Where the roots of `λ² + Bλ + C` sit relative to the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootLocation {
    /// One root in `(1, ∞)`, the other with `|λ| < 1`.
    OneRootAboveOneOtherInsideUnit,
    /// One root in `(1, ∞)`, the other with `|λ| ≥ 1`.
    OneRootAboveOneOtherOutsideUnit,
    /// `F(1) ≥ 0`; nothing is guaranteed.
    NotApplicable,
}

/// If `F(1) < 0` one root exceeds 1, and the other lies strictly inside the
/// unit interval iff `F(−1) > 0`.
pub fn root_location(b: f64, c: f64) -> RootLocation {
    let f_one = 1.0 + b + c;
    if f_one >= 0.0 {
        return RootLocation::NotApplicable;
    }
    if 1.0 - b + c > 0.0 {
        RootLocation::OneRootAboveOneOtherInsideUnit
    } else {
        RootLocation::OneRootAboveOneOtherOutsideUnit
    }
}

/// Characteristic polynomial `λ² + Bλ + C` of the Jacobian at the planar
/// interior fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPolyN2 {
    pub b: f64,
    pub c: f64,
}

impl CharPolyN2 {
    pub fn eval(&self, lambda: f64) -> f64 {
        lambda * lambda + self.b * lambda + self.c
    }

    /// `F(1)` in factored form, `(2θ₁ − θ₂)(θ₁ − 2θ₂) / (3θ₁θ₂)`.
    pub fn f_at_one_factored(t1: f64, t2: f64) -> f64 {
        (2.0 * t1 - t2) * (t1 - 2.0 * t2) / (3.0 * t1 * t2)
    }

    /// `F(−1)` in factored form, `(2θ₁² + 2θ₂² + θ₁θ₂) / (θ₁θ₂)`.
    pub fn f_at_minus_one_factored(t1: f64, t2: f64) -> f64 {
        (2.0 * t1 * t1 + 2.0 * t2 * t2 + t1 * t2) / (t1 * t2)
    }

    pub fn roots(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.b * self.b - 4.0 * self.c, 0.0).sqrt();
        let b = Complex64::new(self.b, 0.0);
        [(-b - disc) / 2.0, (-b + disc) / 2.0]
    }
}

pub fn char_poly_coeffs_n2(params: &ThetaParams) -> Result<CharPolyN2> {
    let [t1, t2] = planar(params)?;
    let sum = t1 + t2;
    let prod = t1 * t2;
    Ok(CharPolyN2 {
        b: -2.0 * sum * sum / (3.0 * prod),
        c: (4.0 * sum * sum - 4.0 * (5.0 * prod - 2.0 * t1 * t1 - 2.0 * t2 * t2)) / (9.0 * prod),
    })
}

/// The non-2 eigenvalue at the planar interior point,
/// `2(θ₁² + θ₂² − θ₁θ₂) / (3θ₁θ₂)`.
pub fn planar_interior_second_eigenvalue(params: &ThetaParams) -> Result<f64> {
    let [t1, t2] = planar(params)?;
    Ok(2.0 * (t1 * t1 + t2 * t2 - t1 * t2) / (3.0 * t1 * t2))
}

/// Closed form of the two non-2 eigenvalues at the interior point for
/// `n = 3`, with `s = Σθ_k`, `p = Σ_{i<j} θ_iθ_j`, `ρ = Σ 1/θ_k`:
///
/// ```text
/// D  = 0.16ρ²s² − 11.2ρs + 1.92ρ²p + 36
/// λ∓ = (0.4ρs − 2 ∓ √D) / 2
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSpectrumN3 {
    pub discriminant: f64,
    pub lambda_minus: Complex64,
    pub lambda_plus: Complex64,
}

pub fn interior_spectrum_n3(params: &ThetaParams) -> Result<InteriorSpectrumN3> {
    let &[t1, t2, t3] = params.as_slice() else {
        return Err(QdynError::Precondition(format!("n must be 3 (got {})", params.dim())));
    };
    let rho = params.reciprocal_sum();
    let s = t1 + t2 + t3;
    let p = t1 * t2 + t1 * t3 + t2 * t3;
    let d = 0.16 * rho * rho * s * s - 11.2 * rho * s + 1.92 * rho * rho * p + 36.0;
    let root = Complex64::new(d, 0.0).sqrt();
    let centre = Complex64::new(0.4 * rho * s - 2.0, 0.0);
    Ok(InteriorSpectrumN3 {
        discriminant: d,
        lambda_minus: (centre - root) / 2.0,
        lambda_plus: (centre + root) / 2.0,
    })
}

/// `|det(J − 2I)| / ‖J‖∞ⁿ` at a non-origin fixed point. Vanishes when 2 is an
/// eigenvalue.
pub fn eigenvalue_two_residual(params: &ThetaParams, point: &FixedPoint) -> Result<f64> {
    params.check_dim(point.coords.len())?;
    if point.coords.iter().all(|v| *v == 0.0) {
        return Err(QdynError::OriginExcluded);
    }
    let j = model::eval_jacobian(params.as_slice(), &point.coords);
    let scale = j.norm_inf().powi(params.dim() as i32);
    Ok(linalg::determinant(&j.shifted(2.0)).abs() / scale)
}

/// Certificate of nonhyperbolicity for the fixed point on `support`: true iff
/// some `i` in the support has `θ_i · ρ̃ = (2m − 1)/2`, where `m = |support|`
/// and `ρ̃ = Σ_{j∈support} 1/θ_j`. At such an `i` the Jacobian row reduces to
/// the unit vector, so 1 is an eigenvalue.
pub fn nonhyperbolic_condition(params: &ThetaParams, support: &SupportMask) -> Result<bool> {
    if support.is_empty() {
        return Err(QdynError::EmptySupport);
    }
    let rho = params.restricted_reciprocal_sum(support)?;
    let target = (2.0 * support.len() as f64 - 1.0) / 2.0;
    Ok(support
        .indices()
        .iter()
        .any(|&i| (params.as_slice()[i] * rho - target).abs() <= CERTIFICATE_TOL * target))
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
    use crate::fixed_points::{enumerate_fixed_points, fixed_point_for_support, interior_fixed_point};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn theta(v: &[f64]) -> ThetaParams {
        ThetaParams::new(v.to_vec()).unwrap()
    }

    fn contains_real(s: &Spectrum, v: f64, tol: f64) -> bool {
        s.distance_to(Complex64::new(v, 0.0)) <= tol
    }

    #[test]
    fn remark_values_n3() {
        let p = theta(&[0.02, 0.02, 0.1]);
        let s = spectrum_at(&p, &interior_fixed_point(&p)).unwrap();
        for v in [2.0, 1.12, 3.04] {
            assert!(contains_real(&s, v, 0.01), "{v} not in {s:?}");
        }
        let p = theta(&[0.3, 0.5, 0.4]);
        let s = spectrum_at(&p, &interior_fixed_point(&p)).unwrap();
        for v in [2.0, 0.64, 1.12] {
            assert!(contains_real(&s, v, 0.01), "{v} not in {s:?}");
        }
    }

    #[test]
    fn origin_spectrum_is_zero() {
        let p = theta(&[0.7, 1.3, 2.2]);
        let s = spectrum_at(&p, &fixed_point_for_support(&p, &SupportMask::empty(3)).unwrap()).unwrap();
        assert!(s.eigenvalues().iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn vertex_spectrum() {
        let p = theta(&[0.4, 0.6]);
        let e1 = fixed_point_for_support(&p, &SupportMask::new(2, vec![0]).unwrap()).unwrap();
        let s = spectrum_at(&p, &e1).unwrap();
        assert_relative_eq!(s.eigenvalues()[0].re, 3.0, epsilon = 1e-12);
        assert_relative_eq!(s.eigenvalues()[1].re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn classify_table() {
        let tol = DEFAULT_TAU_UNIT;
        assert_eq!(classify(&Spectrum::from_real(&[0.0, 0.0]), tol).tag, StabilityTag::Attracting);
        assert_eq!(classify(&Spectrum::from_real(&[2.0, 3.0]), tol).tag, StabilityTag::Repelling);
        assert_eq!(classify(&Spectrum::from_real(&[2.0, 0.5]), tol).tag, StabilityTag::Saddle);
        let c = classify(&Spectrum::from_real(&[2.0, 1.0]), tol);
        assert_eq!(c.tag, StabilityTag::Nonhyperbolic);
        assert_eq!((c.inside, c.outside, c.on_circle), (0, 1, 1));
        assert_eq!(classify(&Spectrum::from_real(&[2.0, -1.0 + 1e-12]), tol).tag, StabilityTag::Nonhyperbolic);
        let pair = Spectrum::new(vec![Complex64::new(0.0, 1.5), Complex64::new(0.0, -1.5)]);
        assert_eq!(classify(&pair, tol).tag, StabilityTag::Repelling);
    }

    #[test]
    fn spectrum_ordering() {
        let s = Spectrum::new(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-3.0, 0.0),
        ]);
        let got: Vec<_> = s.eigenvalues().iter().map(|c| (c.re, c.im)).collect();
        assert_eq!(got, vec![(-3.0, 0.0), (0.0, -2.0), (0.0, 2.0), (0.5, 0.0)]);
    }

    #[test]
    fn root_location_cases() {
        assert_eq!(root_location(-2.5, 1.0), RootLocation::OneRootAboveOneOtherInsideUnit);
        assert_eq!(root_location(-3.0, 1.0), RootLocation::OneRootAboveOneOtherInsideUnit);
        assert_eq!(root_location(0.0, 1.0), RootLocation::NotApplicable);
        // (λ − 2)(λ + 3): F(1) < 0, F(−1) < 0
        assert_eq!(root_location(1.0, -6.0), RootLocation::OneRootAboveOneOtherOutsideUnit);
    }

    #[test]
    fn char_poly_unit_rates() {
        let cp = char_poly_coeffs_n2(&theta(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(cp.b, -8.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(cp.c, 4.0 / 3.0, epsilon = 1e-15);
        // trace and determinant of the explicit Jacobian at (2/3, 2/3)
        let p = theta(&[1.0, 1.0]);
        let j = model::eval_jacobian(p.as_slice(), &interior_fixed_point(&p).coords);
        assert_relative_eq!(-(j[(0, 0)] + j[(1, 1)]), cp.b, epsilon = 1e-14);
        assert_relative_eq!(j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)], cp.c, epsilon = 1e-14);
        assert_eq!(CharPolyN2::f_at_one_factored(1.0, 2.0), 0.0);
        assert!(char_poly_coeffs_n2(&theta(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn char_poly_factored_values_match() {
        let mut rng = SplitMix64::seed_from_u64(17);
        for _ in 0..200 {
            let t1 = rng.gen_range(0.05..3.0);
            let t2 = rng.gen_range(0.05..3.0);
            let cp = char_poly_coeffs_n2(&theta(&[t1, t2])).unwrap();
            assert_relative_eq!(cp.eval(1.0), CharPolyN2::f_at_one_factored(t1, t2), epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(cp.eval(-1.0), CharPolyN2::f_at_minus_one_factored(t1, t2), max_relative = 1e-12);
            // 2 is always a root, the other is the closed-form second eigenvalue
            assert!(cp.eval(2.0).abs() <= 1e-10 * cp.c.abs().max(1.0));
            let second = planar_interior_second_eigenvalue(&theta(&[t1, t2])).unwrap();
            assert_relative_eq!(2.0 * second, cp.c, max_relative = 1e-12);
        }
    }

    #[test]
    fn char_poly_roots_match_solver() {
        let p = theta(&[0.4, 0.6]);
        let s = spectrum_at(&p, &interior_fixed_point(&p)).unwrap();
        for r in char_poly_coeffs_n2(&p).unwrap().roots() {
            assert!(s.distance_to(r) <= 1e-9);
        }
    }

    #[test]
    fn eigenvalue_two_residuals() {
        let p = theta(&[0.4, 0.6]);
        assert!(eigenvalue_two_residual(&p, &interior_fixed_point(&p)).unwrap() <= 1e-10);
        let p = theta(&[1.0, 1.0, 1.0]);
        for fp in enumerate_fixed_points(&p).unwrap().iter().skip(1) {
            assert!(eigenvalue_two_residual(&p, fp).unwrap() <= 1e-10);
        }
        let origin = &enumerate_fixed_points(&p).unwrap()[0];
        assert_eq!(eigenvalue_two_residual(&p, origin), Err(QdynError::OriginExcluded));

        let mut rng = SplitMix64::seed_from_u64(23);
        for _ in 0..50 {
            let t: Vec<f64> = (0..8).map(|_| 3.0 - rng.gen::<f64>() * 2.95).collect();
            let p = theta(&t);
            assert!(eigenvalue_two_residual(&p, &interior_fixed_point(&p)).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn certificate_cases() {
        let full = SupportMask::full(3);
        assert!(!nonhyperbolic_condition(&theta(&[1.0, 1.0, 1.0]), &full).unwrap());
        let p = theta(&[1.0, 1.0, 0.75]);
        assert!(nonhyperbolic_condition(&p, &full).unwrap());
        // the certificate implies an eigenvalue on the unit circle
        let s = spectrum_at(&p, &interior_fixed_point(&p)).unwrap();
        assert!(contains_real(&s, 1.0, 1e-12));
        assert_eq!(classify(&s, DEFAULT_TAU_UNIT).tag, StabilityTag::Nonhyperbolic);
        for i in 0..3 {
            let single = SupportMask::new(3, vec![i]).unwrap();
            assert!(!nonhyperbolic_condition(&theta(&[0.3, 1.7, 2.2]), &single).unwrap());
        }
        assert_eq!(
            nonhyperbolic_condition(&p, &SupportMask::empty(3)),
            Err(QdynError::EmptySupport)
        );
    }

    #[test]
    fn vertex_boundary_case_is_nonhyperbolic() {
        // θ_1 = 2θ_2 exactly: eigenvalue 2θ_2/θ_1 = 1
        let p = theta(&[1.0, 0.5, 0.2]);
        let e1 = fixed_point_for_support(&p, &SupportMask::new(3, vec![0]).unwrap()).unwrap();
        let c = classify(&spectrum_at(&p, &e1).unwrap(), DEFAULT_TAU_UNIT);
        assert_eq!(c.tag, StabilityTag::Nonhyperbolic);
    }

    #[test]
    fn closed_form_n3_requires_three() {
        assert!(interior_spectrum_n3(&theta(&[1.0, 1.0])).is_err());
        let cf = interior_spectrum_n3(&theta(&[0.3, 0.5, 0.4])).unwrap();
        assert_relative_eq!(cf.lambda_minus.re, 0.64, epsilon = 0.01);
        assert_relative_eq!(cf.lambda_plus.re, 1.12, epsilon = 0.01);
    }
}
