use std::ffi::{c_int, c_void, CStr, CString};
use std::ptr;

use tubelab_ffi::*;

fn space(desc: &str) -> *mut TlSpace {
    let c = CString::new(desc).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { tl_space_from_json(c.as_ptr(), &mut s) },
        TlStatus::Ok
    );
    assert!(!s.is_null());
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn center(s: *const TlSpace) -> Vec<f64> {
    let n = unsafe { tl_space_dim(s) };
    let mut c = vec![0.0; n];
    assert_eq!(
        unsafe { tl_space_center(s, c.as_mut_ptr(), n) },
        TlStatus::Ok
    );
    c
}

#[test]
fn hyperbolic_density_matches_closed_form() {
    let s = space("h3");
    assert_eq!(unsafe { tl_space_dim(s) }, 3);
    let p = center(s);
    let v = [0.0, 0.42, 0.0];
    let (mut th, mut cf) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            tl_theta(s, p.as_ptr(), v.as_ptr(), 3, &mut th),
            TlStatus::Ok
        );
        assert_eq!(tl_closed_form_profile(s, 0.42, &mut cf), TlStatus::Ok);
        tl_space_free(s);
    }
    let exact = (0.42f64.sinh() / 0.42).powi(2);
    assert!((th - exact).abs() < 1e-9, "{th} vs {exact}");
    assert!((cf - exact).abs() < 1e-12);
}

#[test]
fn involution_is_reversed_velocity_in_flat_space() {
    let s = space(r#"{"kind":"euclidean","n":2}"#);
    let p = center(s);
    let v = [0.3, -0.2];
    let (mut q, mut w) = ([0.0; 2], [0.0; 2]);
    assert_eq!(
        unsafe {
            tl_geodesic_involution(s, p.as_ptr(), v.as_ptr(), 2, q.as_mut_ptr(), w.as_mut_ptr())
        },
        TlStatus::Ok
    );
    for i in 0..2 {
        assert!((q[i] - p[i] - v[i]).abs() < 1e-10);
        assert!((w[i] + v[i]).abs() < 1e-10);
    }
    unsafe { tl_space_free(s) };
}

extern "C" fn flat(_x: *const f64, n: usize, out: *mut f64, user_data: *mut c_void) -> c_int {
    let scale = unsafe { *(user_data as *const f64) };
    let g = unsafe { std::slice::from_raw_parts_mut(out, n * n) };
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = if i == j { scale } else { 0.0 };
        }
    }
    0
}

#[test]
fn callback_space_and_tube_volume() {
    let mut scale = 1.0f64;
    let (lo, hi, c) = ([-5.0; 3], [5.0; 3], [0.0; 3]);
    let mut s = ptr::null_mut();
    let st = unsafe {
        tl_space_from_callback(
            3,
            flat,
            (&mut scale as *mut f64).cast(),
            1.0,
            lo.as_ptr(),
            hi.as_ptr(),
            c.as_ptr(),
            &mut s,
        )
    };
    assert_eq!(st, TlStatus::Ok, "{}", last_error());
    let (mut vol, mut err) = (0.0, 0.0);
    let d = [1.0, 0.0, 0.0];
    let st = unsafe { tl_tube_volume(s, c.as_ptr(), d.as_ptr(), 3, 1.0, 0.5, &mut vol, &mut err) };
    assert_eq!(st, TlStatus::Ok, "{}", last_error());
    let exact = std::f64::consts::PI * 0.25;
    assert!((vol - exact).abs() < 1e-6 * exact, "{vol} vs {exact}");
    let mut out = 0.0;
    assert_eq!(
        unsafe { tl_closed_form_profile(s, 0.1, &mut out) },
        TlStatus::Unsupported
    );
    unsafe { tl_space_free(s) };
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { tl_space_from_json(ptr::null(), &mut s) },
        TlStatus::NullPointer
    );
    let bad = CString::new("no-such-space").unwrap();
    assert_eq!(
        unsafe { tl_space_from_json(bad.as_ptr(), &mut s) },
        TlStatus::Config
    );
    assert!(!last_error().is_empty());

    let h = space("h3");
    let p = center(h);
    let mut out = 0.0;
    assert_eq!(
        unsafe { tl_theta(h, p.as_ptr(), p.as_ptr(), 2, &mut out) },
        TlStatus::Parameter
    );
    assert!(last_error().contains("expected 3"));
    assert_eq!(
        unsafe { tl_theta(ptr::null(), p.as_ptr(), p.as_ptr(), 3, &mut out) },
        TlStatus::NullPointer
    );
    assert_eq!(unsafe { tl_space_dim(ptr::null()) }, 0);
    unsafe { tl_space_free(h) };
    unsafe { tl_space_free(ptr::null_mut()) };
}

#[test]
fn conjugate_point_has_its_own_code() {
    let s = space("s3");
    let p = center(s);
    let v = [3.3, 0.0, 0.0];
    let mut out = 0.0;
    let st = unsafe { tl_theta(s, p.as_ptr(), v.as_ptr(), 3, &mut out) };
    assert!(
        matches!(st, TlStatus::ConjugatePoint | TlStatus::Domain),
        "{st:?}: {}",
        last_error()
    );
    unsafe { tl_space_free(s) };
}

#[test]
fn run_config_returns_csv() {
    let cfg = CString::new(r#"{"space":"r3","experiment":"ball-volumes","radii":[0.5]}"#).unwrap();
    let mut csv = ptr::null_mut();
    let mut code: c_int = -1;
    assert_eq!(
        unsafe { tl_run_config(cfg.as_ptr(), &mut csv, &mut code) },
        TlStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(code, 0);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { tl_string_free(csv) };
    assert!(text.starts_with("experiment,space,r,quantity"));
    assert!(text.contains("ball_volume"));

    let bad = CString::new(r#"{"space":"r3","experiment":"ball-volumes"}"#).unwrap();
    assert_eq!(
        unsafe { tl_run_config(bad.as_ptr(), &mut csv, &mut code) },
        TlStatus::Config
    );
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
