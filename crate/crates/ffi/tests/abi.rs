use std::ffi::{CStr, CString};
use std::ptr;

use telescore_ffi::*;

fn parse(spec: &str) -> *mut TsNoiseModel {
    let spec = CString::new(spec).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { ts_model_parse(spec.as_ptr(), &mut m) },
        TsStatus::TS_OK
    );
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { ts_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn score_bit_flip() {
    let m = parse("bit_flip:p=0.7,q=1");
    let mut s = TsScore::default();
    assert_eq!(unsafe { ts_score(m, 0.5, 1, 2.5, &mut s) }, TsStatus::TS_OK);
    assert!((s.f - 0.8).abs() < 1e-15);
    assert!((s.d - 0.6 / (3.0 * 5f64.sqrt())).abs() < 1e-12);
    assert_eq!(s.tau, s.f - 2.5 * s.d);
    unsafe { ts_model_free(m) };
}

#[test]
fn chain_score_and_fidelity() {
    let m = parse("noiseless");
    let mut s = TsScore::default();
    assert_eq!(unsafe { ts_score(m, 0.5, 3, 1.0, &mut s) }, TsStatus::TS_OK);
    assert!((s.f - 1.0).abs() < 1e-12 && s.d.abs() < 1e-12);
    let mut f = 0.0;
    assert_eq!(
        unsafe { ts_teleport_fidelity(m, 0.5, 1.0, 2.0, &mut f) },
        TsStatus::TS_OK
    );
    assert!((f - 1.0).abs() < 1e-12);
    unsafe { ts_model_free(m) };
}

#[test]
fn model_spec_round_trip() {
    let m = parse("global_depolarizing:p=0.7");
    let mut buf = vec![0 as std::ffi::c_char; 64];
    let n = unsafe { ts_model_spec(m, buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(s, "global_dep:p=0.7");
    assert_eq!(n, s.len());
    // truncation keeps the NUL and reports the full length
    let mut small = vec![0 as std::ffi::c_char; 4];
    assert_eq!(
        unsafe { ts_model_spec(m, small.as_mut_ptr(), small.len()) },
        n
    );
    assert_eq!(
        unsafe { CStr::from_ptr(small.as_ptr()) }.to_str().unwrap(),
        "glo"
    );
    unsafe { ts_model_free(m) };
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new("bit_flip:r=0.3").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { ts_model_parse(bad.as_ptr(), &mut m) },
        TsStatus::TS_INVALID_MODEL
    );
    assert!(m.is_null());
    assert!(last_error().contains("`r`"));

    let m = parse("noiseless");
    let mut s = TsScore::default();
    assert_eq!(
        unsafe { ts_score(m, 1.5, 1, 1.0, &mut s) },
        TsStatus::TS_INVALID_ARGUMENT
    );
    assert_eq!(
        unsafe { ts_score(m, 0.2, 1, 1.0, ptr::null_mut()) },
        TsStatus::TS_NULL_POINTER
    );
    assert_eq!(
        unsafe { ts_score(ptr::null(), 0.2, 1, 1.0, &mut s) },
        TsStatus::TS_NULL_POINTER
    );
    let (mut k, mut a) = (0.0, 0.0);
    assert_eq!(
        unsafe { ts_k_star(m, 0.5, 0.5, &mut k, &mut a) },
        TsStatus::TS_NUMERICAL
    );
    assert!(last_error().contains("unbounded"));
    unsafe { ts_model_free(m) };
    let msg = unsafe { CStr::from_ptr(ts_status_message(TsStatus::TS_NUMERICAL)) };
    assert_eq!(msg.to_str().unwrap(), "numerical failure");
}

#[test]
fn k_star_and_crossover() {
    let m = parse("noiseless");
    let (mut k, mut a) = (0.0, 1.0);
    assert_eq!(
        unsafe { ts_k_star(m, 0.0, 0.5, &mut k, &mut a) },
        TsStatus::TS_OK
    );
    assert!((k - 2.0 * 5f64.sqrt()).abs() < 1e-6);
    assert_eq!(a, 0.0);
    unsafe { ts_model_free(m) };

    let mut c = TsCrossover::default();
    assert_eq!(unsafe { ts_alpha_nk(0.7, 2.5, &mut c) }, TsStatus::TS_OK);
    assert!(c.has_alpha_nk && (c.alpha_nk - 0.022).abs() < 1e-3);
    assert_eq!(unsafe { ts_alpha_nk(0.7, 2.0, &mut c) }, TsStatus::TS_OK);
    assert!(!c.has_alpha_nk && c.alpha_nk.is_nan());
}

#[test]
fn sweep_handle() {
    let m = parse("global_dep:p=0.7");
    let ks = [0.0, 2.5];
    let grid = [0.0, 0.01, 0.02, 0.5];
    let mut sw = ptr::null_mut();
    let st = unsafe { ts_sweep_run(m, ks.as_ptr(), ks.len(), grid.as_ptr(), grid.len(), &mut sw) };
    assert_eq!(st, TsStatus::TS_OK);
    assert_eq!(unsafe { ts_sweep_len(sw) }, 8);
    let mut row = TsSweepRow::default();
    assert_eq!(unsafe { ts_sweep_row(sw, 5, &mut row) }, TsStatus::TS_OK);
    assert_eq!((row.alpha, row.k), (0.02, 2.5));
    assert!(row.nonclassical && row.beats_noiseless);
    assert_eq!(
        unsafe { ts_sweep_row(sw, 8, &mut row) },
        TsStatus::TS_OUT_OF_RANGE
    );
    unsafe { ts_sweep_free(sw) };

    let mut sw = ptr::null_mut();
    let st = unsafe { ts_sweep_run(m, ks.as_ptr(), ks.len(), ptr::null(), 0, &mut sw) };
    assert_eq!(st, TsStatus::TS_INVALID_ARGUMENT);
    assert!(sw.is_null());
    assert_eq!(unsafe { ts_sweep_len(sw) }, 0);
    unsafe { ts_model_free(m) };
}
