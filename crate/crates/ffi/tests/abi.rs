use std::ffi::{CStr, CString};
use std::ptr;

use nonherm_ffi::*;

fn state(re0: f64, im0: f64, re1: f64, im1: f64) -> [NhComplex; 2] {
    [NhComplex { re: re0, im: im0 }, NhComplex { re: re1, im: im1 }]
}

fn last_error() -> String {
    let p = nh_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn spectrum_phases() {
    let mut s = NhSpectrum {
        lambda_plus: NhComplex::default(),
        lambda_minus: NhComplex::default(),
        phase: NhPhase::Broken,
    };
    assert_eq!(unsafe { nh_spectrum(2.0, 1.0, &mut s) }, NhStatus::Ok);
    assert_eq!(s.phase, NhPhase::Symmetric);
    assert!((s.lambda_plus.re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert_eq!(unsafe { nh_spectrum(1.0, 1.0, &mut s) }, NhStatus::Ok);
    assert_eq!(s.phase, NhPhase::ExceptionalPoint);
    assert_eq!(s.lambda_plus, NhComplex::default());
    assert_eq!(unsafe { nh_spectrum(0.5, 1.0, &mut s) }, NhStatus::Ok);
    assert_eq!(s.phase, NhPhase::Broken);
    assert!(s.lambda_plus.im > 0.0);
}

#[test]
fn errors_carry_status_and_message() {
    assert_eq!(unsafe { nh_spectrum(1.0, 1.0, ptr::null_mut()) }, NhStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut s = NhSpectrum {
        lambda_plus: NhComplex::default(),
        lambda_minus: NhComplex::default(),
        phase: NhPhase::Broken,
    };
    assert_eq!(unsafe { nh_spectrum(1.0, -1.0, &mut s) }, NhStatus::InvalidArgument);
    let unnormalized = state(1.0, 0.0, 1.0, 0.0);
    let mut out = [NhComplex::default(); 2];
    let st = unsafe { nh_evolve_pure(0.01, 0.001, 1.0, unnormalized.as_ptr(), out.as_mut_ptr()) };
    assert_eq!(st, NhStatus::InvalidArgument);
    let zero = state(1.0, 0.0, 0.0, 0.0);
    let st = unsafe {
        nh_trotter_evolve(0.01, 0.001, 1.0, 1, 7, zero.as_ptr(), out.as_mut_ptr(), ptr::null_mut())
    };
    assert_eq!(st, NhStatus::InvalidArgument);
    assert!(last_error().contains("Kraus"));
    let missing = CString::new("/nonexistent/ck.json").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nh_pqc_load(missing.as_ptr(), &mut h) }, NhStatus::Config);
    assert!(h.is_null());
}

#[test]
fn evolution_matches_core() {
    let zero = state(1.0, 0.0, 0.0, 0.0);
    let mut exact = [NhComplex::default(); 2];
    let st = unsafe { nh_evolve_pure(0.01, 0.00125, 300.0, zero.as_ptr(), exact.as_mut_ptr()) };
    assert_eq!(st, NhStatus::Ok);
    let p0 = exact[0].re * exact[0].re + exact[0].im * exact[0].im;
    assert!((p0 - 0.0411).abs() < 1e-3);
    let mut trotter = [NhComplex::default(); 2];
    let mut cumulative = 0.0;
    let st = unsafe {
        nh_trotter_evolve(
            0.01,
            0.00125,
            300.0,
            600,
            NhKrausMode::Exact as i32,
            zero.as_ptr(),
            trotter.as_mut_ptr(),
            &mut cumulative,
        )
    };
    assert_eq!(st, NhStatus::Ok);
    assert!(cumulative > 0.0 && cumulative < 1.0);
    let overlap_re = exact[0].re * trotter[0].re + exact[0].im * trotter[0].im
        + exact[1].re * trotter[1].re + exact[1].im * trotter[1].im;
    let overlap_im = exact[0].re * trotter[0].im - exact[0].im * trotter[0].re
        + exact[1].re * trotter[1].im - exact[1].im * trotter[1].re;
    let fid = overlap_re * overlap_re + overlap_im * overlap_im;
    assert!(1.0 - fid < 1e-6);
}

#[test]
fn scalar_observables() {
    let mut mz = 0.0;
    assert_eq!(unsafe { nh_asymptotic_mz(0.8, 1.0, &mut mz) }, NhStatus::Ok);
    assert!((mz - 0.6).abs() < 1e-12);
    let mut rho = [NhComplex::default(); 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        rho[4 * i + j].re = 0.5;
    }
    let mut c = 0.0;
    assert_eq!(unsafe { nh_concurrence(rho.as_ptr(), &mut c) }, NhStatus::Ok);
    assert!((c - 1.0).abs() < 1e-9);
    for (k, z) in rho.iter_mut().enumerate() {
        z.re = if k % 5 == 0 { 0.5 * 0.25 } else { 0.0 } + if [0, 3, 12, 15].contains(&k) { 0.25 } else { 0.0 };
    }
    assert_eq!(unsafe { nh_concurrence(rho.as_ptr(), &mut c) }, NhStatus::Ok);
    assert!((c - 0.25).abs() < 1e-9);
}

#[test]
fn pqc_handle_lifecycle() {
    let mut opts = nh_train_options_default();
    assert_eq!(opts.learning_rate, 0.05);
    opts.target_cost = 1e-3;
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nh_pqc_train(0.01, 0.00125, 300.0, &opts, &mut h) }, NhStatus::Ok);
    assert!(!h.is_null());
    assert_eq!(unsafe { nh_pqc_converged(h) }, 1);
    assert!(unsafe { nh_pqc_final_cost(h) } <= 1e-3);

    let zero = state(1.0, 0.0, 0.0, 0.0);
    let mut out = [NhComplex::default(); 2];
    let mut prob = 0.0;
    assert_eq!(unsafe { nh_pqc_apply(h, zero.as_ptr(), out.as_mut_ptr(), &mut prob) }, NhStatus::Ok);
    assert!(prob > 0.0 && prob <= 1.0);
    let p0 = out[0].re * out[0].re + out[0].im * out[0].im;
    assert!((p0 - 0.0411).abs() < 0.02);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("ck.json").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { nh_pqc_save(h, path.as_ptr()) }, NhStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { nh_pqc_load(path.as_ptr(), &mut loaded) }, NhStatus::Ok);
    let mut a = [0.0; 24];
    let mut b = [0.0; 24];
    assert_eq!(unsafe { nh_pqc_params(h, a.as_mut_ptr()) }, NhStatus::Ok);
    assert_eq!(unsafe { nh_pqc_params(loaded, b.as_mut_ptr()) }, NhStatus::Ok);
    assert_eq!(a, b);

    let mut raw = ptr::null_mut();
    assert_eq!(unsafe { nh_pqc_from_params(a.as_ptr(), &mut raw) }, NhStatus::Ok);
    assert!(unsafe { nh_pqc_final_cost(raw) }.is_nan());
    assert_eq!(unsafe { nh_pqc_save(raw, path.as_ptr()) }, NhStatus::InvalidArgument);
    a[3] = f64::NAN;
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { nh_pqc_from_params(a.as_ptr(), &mut bad) }, NhStatus::InvalidArgument);
    assert!(bad.is_null());

    unsafe {
        nh_pqc_free(h);
        nh_pqc_free(loaded);
        nh_pqc_free(raw);
        nh_pqc_free(ptr::null_mut());
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(nh_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
