//! C ABI over `qdyn-core`.
//!
//! Conventions:
//! - every fallible entry point returns a [`QdynStatus`]; results go through
//!   out-pointers that are written only on `QDYN_STATUS_OK`;
//! - handles are opaque and owned by the caller once created, release them
//!   with the matching `*_free` function;
//! - on failure a message is kept per thread, see
//!   [`qdyn_last_error_message`];
//! - panics never cross the boundary, they surface as `QDYN_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qdyn_core::dynamics::{self, BoundaryFlag, Evidence, Fate, RegionKind};
use qdyn_core::stability::{classify, spectrum_at, StabilityTag};
use qdyn_core::{enumerate_fixed_points, FixedPoint, QdynError, State, ThetaParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynStatus {
    Ok = 0,
    NullPointer = 1,
    /// A rate, state entry or tolerance is out of its domain.
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// Index past the end of a set, or a dimension above a hard cap.
    OutOfRange = 4,
    BufferTooSmall = 5,
    NotConverged = 6,
    /// The operation is undefined for these rates (e.g. basin needs n = 2).
    NotApplicable = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynStability {
    Attracting = 0,
    Repelling = 1,
    Saddle = 2,
    Nonhyperbolic = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynFate {
    ToOrigin = 0,
    ToInfinity = 1,
    ToFixedPoint = 2,
    Undetermined = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynEvidence {
    RegionContainment = 0,
    NormThreshold = 1,
    FixedPointProximity = 2,
    IterationCap = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynRegion {
    None = 0,
    M1 = 1,
    M2 = 2,
    M3 = 3,
    M4 = 4,
    M5 = 5,
    M6 = 6,
    Mbar1 = 7,
    Mbar2 = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdynBoundaryFlag {
    None = 0,
    LowerNotOrigin = 1,
    UpperNotFound = 2,
    Undetermined = 3,
    MultipleFlips = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdynFixedPointInfo {
    /// Support bits, bit k set when coordinate k is nonzero.
    pub mask: u64,
    /// All coordinates ≥ 0.
    pub feasible: bool,
    /// ‖H(x) − x‖∞
    pub residual: f64,
    pub stability: QdynStability,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdynFateReport {
    pub outcome: QdynFate,
    /// Valid when `outcome` is `QDYN_FATE_TO_FIXED_POINT`.
    pub fixed_point_index: u64,
    pub steps_used: u64,
    pub evidence: QdynEvidence,
    /// Valid when `evidence` is `QDYN_EVIDENCE_REGION_CONTAINMENT`.
    pub region: QdynRegion,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdynBoundarySample {
    pub x1: f64,
    pub x2_low: f64,
    pub x2_high: f64,
    pub width: f64,
    pub flag: QdynBoundaryFlag,
}

/// Validated rate vector.
pub struct QdynParams {
    inner: ThetaParams,
}

/// All 2ⁿ fixed points with their spectra, in support-mask order.
pub struct QdynFixedPointSet {
    points: Vec<FixedPoint>,
    eigenvalues: Vec<Vec<[f64; 2]>>,
    tags: Vec<StabilityTag>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QdynStatus, String);

impl From<QdynError> for Failure {
    fn from(e: QdynError) -> Self {
        let status = match &e {
            QdynError::DimensionMismatch { .. } => QdynStatus::DimensionMismatch,
            QdynError::DimensionOverCap { .. } => QdynStatus::OutOfRange,
            QdynError::NotConverged { .. } => QdynStatus::NotConverged,
            QdynError::RegionNotApplicable { .. }
            | QdynError::VerticalLine
            | QdynError::InfeasibleInterior
            | QdynError::OriginExcluded => QdynStatus::NotApplicable,
            _ => QdynStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    });
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            QdynStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            QdynStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QdynStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len < need {
        return Err(Failure(QdynStatus::BufferTooSmall, format!("{what} holds {len}, need {need}")));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

/// Message for the last failed call on this thread, or NULL after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qdyn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, nul-terminated library version.
#[no_mangle]
pub extern "C" fn qdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates `theta[0..n]` (n ≥ 2, all finite and > 0) into a new handle.
///
/// # Safety
/// `theta` must point to `n` readable doubles and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn qdyn_params_new(theta: *const f64, n: usize, out: *mut *mut QdynParams) -> QdynStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let theta = input(theta, n, "theta")?;
        let inner = ThetaParams::new(theta.to_vec())?;
        *out = Box::into_raw(Box::new(QdynParams { inner }));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`qdyn_params_new`] and not be used afterwards.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdyn_params_free(params: *mut QdynParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Dimension n, or 0 for NULL.
///
/// # Safety
/// `params` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdyn_params_dim(params: *const QdynParams) -> usize {
    params.as_ref().map_or(0, |p| p.inner.dim())
}

/// One application of the operator: `out[0..n] = H(x[0..n])`.
///
/// # Safety
/// `x` must hold `n` doubles and `out` room for `n`.
#[no_mangle]
pub unsafe extern "C" fn qdyn_apply(params: *const QdynParams, x: *const f64, n: usize, out: *mut f64) -> QdynStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        let state = State::new(input(x, n, "x")?.to_vec())?;
        let y = qdyn_core::apply(p, &state)?;
        output(out, n, n, "out")?.copy_from_slice(y.as_slice());
        Ok(())
    })
}

/// Jacobian at `x`, row-major into `out[0..n*n]`.
///
/// # Safety
/// `x` must hold `n` doubles and `out` room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn qdyn_jacobian(
    params: *const QdynParams,
    x: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> QdynStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        let state = State::new(input(x, n, "x")?.to_vec())?;
        let j = qdyn_core::jacobian(p, &state)?;
        output(out, out_len, n * n, "out")?.copy_from_slice(j.as_row_major());
        Ok(())
    })
}

/// Enumerates all fixed points, computing each spectrum and classifying it
/// with unit-circle band `tau_unit`. Fails with `QDYN_STATUS_OUT_OF_RANGE`
/// above the enumeration cap.
///
/// # Safety
/// `params` must be a live handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_points_new(
    params: *const QdynParams,
    tau_unit: f64,
    out: *mut *mut QdynFixedPointSet,
) -> QdynStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tau_unit.is_finite() && tau_unit > 0.0) {
            return Err(Failure(QdynStatus::InvalidArgument, format!("tau_unit must be > 0 (got {tau_unit})")));
        }
        let points = enumerate_fixed_points(p)?;
        let mut eigenvalues = Vec::with_capacity(points.len());
        let mut tags = Vec::with_capacity(points.len());
        for fp in &points {
            let s = spectrum_at(p, fp)?;
            tags.push(classify(&s, tau_unit).tag);
            eigenvalues.push(s.eigenvalues().iter().map(|e| [e.re, e.im]).collect());
        }
        *out = Box::into_raw(Box::new(QdynFixedPointSet { points, eigenvalues, tags }));
        Ok(())
    })
}

/// # Safety
/// `set` must come from [`qdyn_fixed_points_new`] and not be used
/// afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_points_free(set: *mut QdynFixedPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of points in the set (2ⁿ), or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_points_len(set: *const QdynFixedPointSet) -> usize {
    set.as_ref().map_or(0, |s| s.points.len())
}

fn entry(set: &QdynFixedPointSet, index: usize) -> Result<usize, Failure> {
    if index < set.points.len() {
        Ok(index)
    } else {
        Err(Failure(
            QdynStatus::OutOfRange,
            format!("index {index} past set of {}", set.points.len()),
        ))
    }
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_point_info(
    set: *const QdynFixedPointSet,
    index: usize,
    out: *mut QdynFixedPointInfo,
) -> QdynStatus {
    guard(|| {
        let s = borrow(set, "set")?;
        let i = entry(s, index)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let fp = &s.points[i];
        *out = QdynFixedPointInfo {
            mask: fp.support.bits().unwrap_or(u64::MAX),
            feasible: fp.feasible,
            residual: fp.residual,
            stability: stability(s.tags[i]),
        };
        Ok(())
    })
}

/// Coordinates of point `index` into `out[0..n]`.
///
/// # Safety
/// `set` must be a live handle and `out` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_point_coords(
    set: *const QdynFixedPointSet,
    index: usize,
    out: *mut f64,
    len: usize,
) -> QdynStatus {
    guard(|| {
        let s = borrow(set, "set")?;
        let coords = &s.points[entry(s, index)?].coords;
        output(out, len, coords.len(), "out")?.copy_from_slice(coords);
        Ok(())
    })
}

/// Eigenvalues of point `index`, by descending modulus, as real and
/// imaginary parts into `re[0..n]` and `im[0..n]`.
///
/// # Safety
/// `set` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qdyn_fixed_point_eigenvalues(
    set: *const QdynFixedPointSet,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QdynStatus {
    guard(|| {
        let s = borrow(set, "set")?;
        let ev = &s.eigenvalues[entry(s, index)?];
        let re = output(re, len, ev.len(), "re")?;
        let im = output(im, len, ev.len(), "im")?;
        for (k, [a, b]) in ev.iter().enumerate() {
            re[k] = *a;
            im[k] = *b;
        }
        Ok(())
    })
}

/// Fate of the trajectory from `x0` with default thresholds and at most
/// `budget` iterations. The last examined state goes to `final_state[0..n]`
/// when that pointer is non-NULL.
///
/// # Safety
/// `x0` must hold `n` doubles, `out` be writable, and `final_state` be NULL
/// or hold `final_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qdyn_classify_fate(
    params: *const QdynParams,
    x0: *const f64,
    n: usize,
    budget: u64,
    out: *mut QdynFateReport,
    final_state: *mut f64,
    final_len: usize,
) -> QdynStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let x0 = State::new(input(x0, n, "x0")?.to_vec())?;
        let budget = usize::try_from(budget).unwrap_or(usize::MAX);
        let report = dynamics::classify_fate(p, &x0, budget)?;
        if !final_state.is_null() {
            output(final_state, final_len, n, "final_state")?.copy_from_slice(report.final_state.as_slice());
        }
        let (outcome, index) = match report.outcome {
            Fate::ToOrigin => (QdynFate::ToOrigin, 0),
            Fate::ToInfinity => (QdynFate::ToInfinity, 0),
            Fate::ToFixedPoint { index } => (QdynFate::ToFixedPoint, index as u64),
            Fate::Undetermined => (QdynFate::Undetermined, 0),
        };
        let (evidence, region) = match report.evidence {
            Evidence::RegionContainment { region } => (QdynEvidence::RegionContainment, region_code(region)),
            Evidence::NormThreshold => (QdynEvidence::NormThreshold, QdynRegion::None),
            Evidence::FixedPointProximity => (QdynEvidence::FixedPointProximity, QdynRegion::None),
            Evidence::IterationCap => (QdynEvidence::IterationCap, QdynRegion::None),
        };
        *out = QdynFateReport {
            outcome,
            fixed_point_index: index,
            steps_used: report.steps_used as u64,
            evidence,
            region,
        };
        Ok(())
    })
}

/// Bisected basin boundary (n = 2 only), one sample per `x1[i]` into
/// `out[i]`.
///
/// # Safety
/// `x1` must hold `count` doubles and `out` room for `count` samples.
#[no_mangle]
pub unsafe extern "C" fn qdyn_basin_boundary(
    params: *const QdynParams,
    x1: *const f64,
    count: usize,
    tol: f64,
    budget: u64,
    out: *mut QdynBoundarySample,
) -> QdynStatus {
    guard(|| {
        let p = &borrow(params, "params")?.inner;
        let grid = input(x1, count, "x1")?;
        if count > 0 && out.is_null() {
            return Err(null("out"));
        }
        if p.dim() != 2 {
            return Err(Failure(
                QdynStatus::NotApplicable,
                format!("basin boundary requires n = 2 (got {})", p.dim()),
            ));
        }
        let budget = usize::try_from(budget).unwrap_or(usize::MAX);
        let samples = dynamics::basin_boundary(p, grid, tol, budget)?;
        for (i, s) in samples.iter().enumerate() {
            *out.add(i) = QdynBoundarySample {
                x1: s.x1,
                x2_low: s.x2_low,
                x2_high: s.x2_high,
                width: s.width,
                flag: match s.flag {
                    None => QdynBoundaryFlag::None,
                    Some(BoundaryFlag::LowerNotOrigin) => QdynBoundaryFlag::LowerNotOrigin,
                    Some(BoundaryFlag::UpperNotFound) => QdynBoundaryFlag::UpperNotFound,
                    Some(BoundaryFlag::Undetermined) => QdynBoundaryFlag::Undetermined,
                    Some(BoundaryFlag::MultipleFlips) => QdynBoundaryFlag::MultipleFlips,
                },
            };
        }
        Ok(())
    })
}

fn stability(tag: StabilityTag) -> QdynStability {
    match tag {
        StabilityTag::Attracting => QdynStability::Attracting,
        StabilityTag::Repelling => QdynStability::Repelling,
        StabilityTag::Saddle => QdynStability::Saddle,
        StabilityTag::Nonhyperbolic => QdynStability::Nonhyperbolic,
    }
}

fn region_code(kind: RegionKind) -> QdynRegion {
    match kind {
        RegionKind::M1 => QdynRegion::M1,
        RegionKind::M2 => QdynRegion::M2,
        RegionKind::M3 => QdynRegion::M3,
        RegionKind::M4 => QdynRegion::M4,
        RegionKind::M5 => QdynRegion::M5,
        RegionKind::M6 => QdynRegion::M6,
        RegionKind::Mbar1 => QdynRegion::Mbar1,
        RegionKind::Mbar2 => QdynRegion::Mbar2,
    }
}
