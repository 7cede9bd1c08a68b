use std::ffi::CStr;
use std::ptr;

use qdyn_ffi::*;

fn params(theta: &[f64]) -> *mut QdynParams {
    let mut p = ptr::null_mut();
    let st = unsafe { qdyn_params_new(theta.as_ptr(), theta.len(), &mut p) };
    assert_eq!(st, QdynStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> Option<String> {
    let m = qdyn_last_error_message();
    (!m.is_null()).then(|| unsafe { CStr::from_ptr(m) }.to_string_lossy().into_owned())
}

#[test]
fn rejects_bad_rates() {
    let mut p = ptr::null_mut();
    let st = unsafe { qdyn_params_new([0.4].as_ptr(), 1, &mut p) };
    assert_eq!(st, QdynStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().unwrap().contains("n must be ≥ 2"));

    let st = unsafe { qdyn_params_new([0.4, -1.0].as_ptr(), 2, &mut p) };
    assert_eq!(st, QdynStatus::InvalidArgument);
    let st = unsafe { qdyn_params_new(ptr::null(), 2, &mut p) };
    assert_eq!(st, QdynStatus::NullPointer);
    let st = unsafe { qdyn_params_new([1.0, 1.0].as_ptr(), 2, ptr::null_mut()) };
    assert_eq!(st, QdynStatus::NullPointer);
}

#[test]
fn apply_and_jacobian() {
    let p = params(&[1.0, 1.0]);
    assert_eq!(unsafe { qdyn_params_dim(p) }, 2);
    let mut y = [0.0; 2];
    assert_eq!(unsafe { qdyn_apply(p, [1.0, 1.0].as_ptr(), 2, y.as_mut_ptr()) }, QdynStatus::Ok);
    assert_eq!(y, [1.5, 1.5]);
    assert!(last_error().is_none());

    let mut j = [0.0; 4];
    let x = [5.0 / 9.0, 20.0 / 9.0];
    let q = params(&[0.4, 0.6]);
    assert_eq!(unsafe { qdyn_jacobian(q, x.as_ptr(), 2, j.as_mut_ptr(), 4) }, QdynStatus::Ok);
    let expected = [10.0 / 9.0, 2.0 / 9.0, 4.0 / 3.0, 5.0 / 3.0];
    for (a, b) in j.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(
        unsafe { qdyn_jacobian(q, x.as_ptr(), 2, j.as_mut_ptr(), 3) },
        QdynStatus::BufferTooSmall
    );
    assert_eq!(unsafe { qdyn_apply(p, [1.0].as_ptr(), 1, y.as_mut_ptr()) }, QdynStatus::DimensionMismatch);
    assert_eq!(unsafe { qdyn_apply(ptr::null(), x.as_ptr(), 2, y.as_mut_ptr()) }, QdynStatus::NullPointer);
    unsafe {
        qdyn_params_free(p);
        qdyn_params_free(q);
        qdyn_params_free(ptr::null_mut());
    }
}

#[test]
fn fixed_point_set() {
    let p = params(&[0.4, 0.6]);
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { qdyn_fixed_points_new(p, 1e-9, &mut set) }, QdynStatus::Ok);
    assert_eq!(unsafe { qdyn_fixed_points_len(set) }, 4);

    let mut info = QdynFixedPointInfo { mask: 0, feasible: false, residual: 1.0, stability: QdynStability::Repelling };
    assert_eq!(unsafe { qdyn_fixed_point_info(set, 0, &mut info) }, QdynStatus::Ok);
    assert_eq!(info.mask, 0);
    assert_eq!(info.stability, QdynStability::Attracting);

    assert_eq!(unsafe { qdyn_fixed_point_info(set, 3, &mut info) }, QdynStatus::Ok);
    assert_eq!(info.mask, 3);
    assert!(info.feasible);
    assert_eq!(info.stability, QdynStability::Saddle);

    let mut coords = [0.0; 2];
    assert_eq!(unsafe { qdyn_fixed_point_coords(set, 3, coords.as_mut_ptr(), 2) }, QdynStatus::Ok);
    assert!((coords[0] - 5.0 / 9.0).abs() < 1e-14 && (coords[1] - 20.0 / 9.0).abs() < 1e-14);

    let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
    assert_eq!(
        unsafe { qdyn_fixed_point_eigenvalues(set, 3, re.as_mut_ptr(), im.as_mut_ptr(), 2) },
        QdynStatus::Ok
    );
    assert!((re[0] - 2.0).abs() < 1e-12 && (re[1] - 7.0 / 9.0).abs() < 1e-12);
    assert_eq!(im, [0.0, 0.0]);

    assert_eq!(unsafe { qdyn_fixed_point_info(set, 4, &mut info) }, QdynStatus::OutOfRange);
    assert!(last_error().unwrap().contains("index 4"));
    unsafe {
        qdyn_fixed_points_free(set);
        qdyn_params_free(p);
    }
}

#[test]
fn fates() {
    let p = params(&[1.0, 1.0]);
    let mut r = QdynFateReport {
        outcome: QdynFate::Undetermined,
        fixed_point_index: 0,
        steps_used: 0,
        evidence: QdynEvidence::IterationCap,
        region: QdynRegion::None,
    };
    let mut fin = [0.0; 2];
    let st = unsafe { qdyn_classify_fate(p, [0.1, 0.1].as_ptr(), 2, 100_000, &mut r, fin.as_mut_ptr(), 2) };
    assert_eq!(st, QdynStatus::Ok);
    assert_eq!(r.outcome, QdynFate::ToOrigin);
    assert_eq!(r.region, QdynRegion::Mbar1);

    let st = unsafe { qdyn_classify_fate(p, [2.0, 2.0].as_ptr(), 2, 100_000, &mut r, ptr::null_mut(), 0) };
    assert_eq!(st, QdynStatus::Ok);
    assert_eq!(r.outcome, QdynFate::ToInfinity);

    let x = [0.6666667, 0.6666667];
    let st = unsafe { qdyn_classify_fate(p, x.as_ptr(), 2, 100_000, &mut r, fin.as_mut_ptr(), 2) };
    assert_eq!(st, QdynStatus::Ok);
    assert_eq!((r.outcome, r.fixed_point_index), (QdynFate::ToFixedPoint, 3));
    assert_eq!(r.evidence, QdynEvidence::FixedPointProximity);
    assert_eq!(fin, x);

    let st = unsafe { qdyn_classify_fate(p, [0.1, 0.1].as_ptr(), 2, 0, &mut r, ptr::null_mut(), 0) };
    assert_eq!(st, QdynStatus::InvalidArgument);
    unsafe { qdyn_params_free(p) };
}

#[test]
fn basin() {
    let p = params(&[0.4, 0.6]);
    let grid = [0.0, 5.0 / 9.0, 5.5];
    let mut out = [QdynBoundarySample { x1: -1.0, x2_low: 0.0, x2_high: 0.0, width: 0.0, flag: QdynBoundaryFlag::None }; 3];
    let st = unsafe { qdyn_basin_boundary(p, grid.as_ptr(), 3, 1e-8, 100_000, out.as_mut_ptr()) };
    assert_eq!(st, QdynStatus::Ok);
    assert!((0.5 * (out[0].x2_low + out[0].x2_high) - 10.0 / 3.0).abs() < 1e-6);
    assert!((0.5 * (out[1].x2_low + out[1].x2_high) - 20.0 / 9.0).abs() < 1e-6);
    assert_eq!(out[0].flag, QdynBoundaryFlag::None);
    assert_eq!(out[2].flag, QdynBoundaryFlag::LowerNotOrigin);

    let q = params(&[1.0, 1.0, 1.0]);
    let st = unsafe { qdyn_basin_boundary(q, grid.as_ptr(), 3, 1e-8, 100, out.as_mut_ptr()) };
    assert_eq!(st, QdynStatus::NotApplicable);
    unsafe {
        qdyn_params_free(p);
        qdyn_params_free(q);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qdyn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
