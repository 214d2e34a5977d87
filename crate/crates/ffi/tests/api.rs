use std::ffi::{CStr, CString};
use std::ptr;

use solwave_ffi::*;

fn last_error() -> String {
    let p = sw_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn quartic() -> *mut SwParams {
    let mut p = ptr::null_mut();
    let (tau, q) = (1.0, 2.0);
    assert_eq!(unsafe { sw_params_new(1.0, 1.0, 4.0, 4.0, &tau, &q, 1, &mut p) }, SwStatus::Ok);
    p
}

fn default_grid() -> *mut SwGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sw_grid_new(20.0 * std::f64::consts::PI, 1024, &mut g) }, SwStatus::Ok);
    g
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(sw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_exponent_reports_field() {
    let mut p = ptr::null_mut();
    let (tau, q) = (1.0, 2.0);
    let status = unsafe { sw_params_new(1.0, 1.0, 6.0, 4.0, &tau, &q, 1, &mut p) };
    assert_eq!(status, SwStatus::Config);
    assert!(p.is_null());
    assert!(last_error().contains("p out of range"));
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = 0.0;
    assert_eq!(unsafe { sw_energy(ptr::null(), ptr::null(), &mut out) }, SwStatus::NullPointer);
    assert!(last_error().contains("params"));
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sw_grid_new(1.0, 3, &mut g) }, SwStatus::InvalidArgument);
    unsafe { sw_params_free(ptr::null_mut()) };
}

#[test]
fn closed_form_pair_round_trip() {
    let params = quartic();
    let grid = default_grid();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(sw_symmetric_pair(grid, 1.0, 1.0, &mut s), SwStatus::Ok);
        let mut r = 1.0;
        assert_eq!(sw_el_residual(params, s, 1.0, 1.0, &mut r), SwStatus::Ok);
        assert!(r < 1e-7, "{r}");
        let (mut qu, mut qv) = (0.0, 0.0);
        assert_eq!(sw_mass(s, &mut qu, &mut qv), SwStatus::Ok);
        assert!((qu - 2.0).abs() < 1e-12 && (qv - 2.0).abs() < 1e-12);

        let n = sw_state_len(s);
        let mut buf = vec![vec![0.0; n]; 4];
        let [a, b, c, d] = &mut buf[..] else { unreachable!() };
        assert_eq!(
            sw_state_copy(s, a.as_mut_ptr(), b.as_mut_ptr(), c.as_mut_ptr(), d.as_mut_ptr(), n),
            SwStatus::Ok
        );
        assert_eq!(sw_state_copy(s, a.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), n - 1), SwStatus::InvalidArgument);
        let mut t = ptr::null_mut();
        assert_eq!(sw_state_new(grid, a.as_ptr(), b.as_ptr(), c.as_ptr(), d.as_ptr(), &mut t), SwStatus::Ok);
        let mut dist = 1.0;
        assert_eq!(sw_symmetry_distance(t, s, &mut dist), SwStatus::Ok);
        assert!(dist < 1e-12, "{dist}");
        let (mut e1, mut e2) = (0.0, 1.0);
        sw_energy(params, s, &mut e1);
        sw_energy(params, t, &mut e2);
        assert_eq!(e1, e2);
        sw_state_free(t);
        sw_state_free(s);
        sw_grid_free(grid);
        sw_params_free(params);
    }
}

#[test]
fn minimize_and_evolve() {
    let params = quartic();
    let grid = default_grid();
    unsafe {
        let mut gs = ptr::null_mut();
        assert_eq!(sw_minimize(params, grid, 2.0, 2.0, 1e-9, 20000, &mut gs), SwStatus::Ok);
        let (mut theta, mut w1, mut w2, mut res, mut it) = (0.0, 0.0, 0.0, 0.0, 0usize);
        assert_eq!(sw_ground_state_info(gs, &mut theta, &mut w1, &mut w2, &mut res, &mut it), SwStatus::Ok);
        assert!((theta + 4.0 / 3.0).abs() < 1e-6, "{theta}");
        assert!((w1 - 1.0).abs() < 1e-5 && (w2 - 1.0).abs() < 1e-5);
        assert!(res <= 1e-9 && it > 0);
        let mut prof = ptr::null_mut();
        assert_eq!(sw_ground_state_profile(gs, &mut prof), SwStatus::Ok);
        let mut end = ptr::null_mut();
        let mut drift = 1.0;
        assert_eq!(sw_evolve(params, prof, 1e-3, 1.0, &mut end, &mut drift), SwStatus::Ok);
        assert!(drift < 1e-8, "{drift}");
        let mut d = 1.0;
        assert_eq!(sw_symmetry_distance(end, prof, &mut d), SwStatus::Ok);
        assert!(d < 1e-5, "{d}");
        let mut bad = ptr::null_mut();
        assert_eq!(sw_evolve(params, prof, -1.0, 1.0, &mut bad, ptr::null_mut()), SwStatus::Config);
        sw_state_free(end);
        sw_state_free(prof);
        sw_ground_state_free(gs);
        sw_grid_free(grid);
        sw_params_free(params);
    }
}

#[test]
fn run_json_returns_summary() {
    let cfg = CString::new(
        r#"{"command": "rearrange-check", "params": {"alpha": 1, "beta": 1, "p": 4, "r": 4,
            "couplings": [{"tau": 1, "q": 2}]}, "grid": {"points": 256}, "rearrange": {"samples": 3}}"#,
    )
    .unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(sw_run_json(cfg.as_ptr(), &mut out), SwStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        sw_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["result"]["passed"], true);
        assert_eq!(v["config"]["grid"]["points"], 256);
        let bad = CString::new(r#"{"command": "verify"}"#).unwrap();
        assert_eq!(sw_run_json(bad.as_ptr(), &mut out), SwStatus::Config);
        assert!(last_error().contains("params"));
    }
}
