//! C ABI for tubelab.
//!
//! Spaces are opaque handles created by `tl_space_*` and released with
//! `tl_space_free`. Every fallible call returns a [`TlStatus`]; on failure the
//! message is available from `tl_last_error_message` on the same thread.
//! Strings returned to the caller are freed with `tl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use nalgebra::DMatrix;
use tubelab::cli::{run, to_csv, ExperimentConfig};
use tubelab::density::{geodesic_involution, sphere_mean_curvature, theta};
use tubelab::manifold::{ChartMetric, SampledMetric, TangentVector};
use tubelab::spaces::{closed_form_profile, make_space, SpaceSpec};
use tubelab::tube::{tube_volume_direct, FramedCurve, TubeQuadrature};
use tubelab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Parameter = 4,
    Domain = 5,
    ConjugatePoint = 6,
    SelfFocus = 7,
    Numerical = 8,
    Unsupported = 9,
    Io = 10,
    Panic = 11,
}

/// A geometry: chart metric plus, for built-ins, its description.
pub struct TlSpace {
    metric: ChartMetric,
    spec: Option<SpaceSpec>,
}

/// `g(x)` callback: writes the row-major `n × n` metric at `x` into `out`,
/// returns 0 on success.
pub type TlMetricFn =
    extern "C" fn(x: *const f64, n: usize, out: *mut f64, user_data: *mut c_void) -> c_int;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::Config(_) | Error::Json(_) => TlStatus::Config,
        Error::Parameter(_) | Error::Algebra(_) => TlStatus::Parameter,
        Error::Domain { .. } | Error::Metric(_) | Error::Escape { .. } => TlStatus::Domain,
        Error::ConjugatePoint { .. } | Error::ConjugateDirections(_) => TlStatus::ConjugatePoint,
        Error::SelfFocus { .. } => TlStatus::SelfFocus,
        Error::Stiffness { .. } | Error::IllConditioned { .. } => TlStatus::Numerical,
        Error::Unsupported(_) => TlStatus::Unsupported,
        Error::Io(_) => TlStatus::Io,
    }
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (TlStatus, String)>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TlStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (TlStatus, String)>;
}

impl<T> Lift<T> for tubelab::Result<T> {
    fn lift(self) -> Result<T, (TlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null() -> (TlStatus, String) {
    (TlStatus::NullPointer, "null pointer argument".into())
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, (TlStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (TlStatus::InvalidUtf8, e.to_string()))
}

unsafe fn slice<'a>(p: *const f64, n: usize) -> Result<&'a [f64], (TlStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn space_ref<'a>(s: *const TlSpace) -> Result<&'a TlSpace, (TlStatus, String)> {
    s.as_ref().ok_or_else(null)
}

fn check_dim(space: &TlSpace, n: usize) -> Result<(), (TlStatus, String)> {
    if n != space.metric.dim() {
        return Err((
            TlStatus::Parameter,
            format!("expected {} components, got {n}", space.metric.dim()),
        ));
    }
    Ok(())
}

fn emit_space(
    spec: Option<SpaceSpec>,
    metric: ChartMetric,
    out: *mut *mut TlSpace,
) -> Result<(), (TlStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    unsafe { *out = Box::into_raw(Box::new(TlSpace { metric, spec })) };
    Ok(())
}

/// Built-in space by alias (`"h3"`, `"dr21"`, …) or by a JSON description.
///
/// # Safety
/// `description` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_space_from_json(
    description: *const c_char,
    out: *mut *mut TlSpace,
) -> TlStatus {
    guard(|| {
        let text = c_str(description)?;
        let spec = match serde_json::from_str::<SpaceSpec>(text) {
            Ok(s) => s,
            Err(json_err) => SpaceSpec::from_alias(text.trim().trim_matches('"'))
                .map_err(|_| (TlStatus::Config, json_err.to_string()))?,
        };
        let metric = make_space(&spec).lift()?;
        emit_space(Some(spec), metric, out)
    })
}

struct Callback {
    f: TlMetricFn,
    user_data: *mut c_void,
    n: usize,
}

// The caller guarantees that the callback may be invoked from any thread.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let mut g = vec![f64::NAN; self.n * self.n];
        if (self.f)(x.as_ptr(), self.n, g.as_mut_ptr(), self.user_data) != 0 {
            g.iter_mut().for_each(|v| *v = f64::NAN);
        }
        DMatrix::from_row_slice(self.n, self.n, &g)
    }
}

/// Space from a metric callback on the box `[lower, upper]` with base point `center`.
///
/// The callback may be called concurrently from several threads and must stay
/// valid, together with `user_data`, until the space is freed. A nonzero
/// return marks the point as outside the domain.
///
/// # Safety
/// `lower`, `upper` and `center` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_space_from_callback(
    n: usize,
    metric: TlMetricFn,
    user_data: *mut c_void,
    scale: f64,
    lower: *const f64,
    upper: *const f64,
    center: *const f64,
    out: *mut *mut TlSpace,
) -> TlStatus {
    guard(|| {
        let (lo, hi, c) = (
            slice(lower, n)?.to_vec(),
            slice(upper, n)?.to_vec(),
            slice(center, n)?.to_vec(),
        );
        if !(scale > 0.0) {
            return Err((TlStatus::Parameter, "scale must be positive".into()));
        }
        let cb = Callback {
            f: metric,
            user_data,
            n,
        };
        let source = SampledMetric::new(n, scale, move |x| cb.eval(x));
        let m = ChartMetric::new(format!("callback{n}"), Arc::new(source), lo, hi, c).lift()?;
        emit_space(None, m, out)
    })
}

/// # Safety
/// `space` must come from a `tl_space_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_space_free(space: *mut TlSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Manifold dimension, 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_space_dim(space: *const TlSpace) -> usize {
    space.as_ref().map_or(0, |s| s.metric.dim())
}

/// Writes the chart's base point into `out` (`n` doubles).
///
/// # Safety
/// `out` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tl_space_center(
    space: *const TlSpace,
    out: *mut f64,
    n: usize,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        check_dim(s, n)?;
        if out.is_null() {
            return Err(null());
        }
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(s.metric.center());
        Ok(())
    })
}

/// `θ(v)` for `v ∈ T_pM`.
///
/// # Safety
/// `point` and `v` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_theta(
    space: *const TlSpace,
    point: *const f64,
    v: *const f64,
    n: usize,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        check_dim(s, n)?;
        let tv = TangentVector::new(&s.metric, slice(point, n)?, slice(v, n)?).lift()?;
        let val = theta(&s.metric, &tv).lift()?;
        out.as_mut().map(|o| *o = val).ok_or_else(null)
    })
}

/// Mean curvature of the geodesic sphere of radius `‖v‖` about `p` at `exp_p(v)`.
///
/// # Safety
/// As for [`tl_theta`].
#[no_mangle]
pub unsafe extern "C" fn tl_sphere_mean_curvature(
    space: *const TlSpace,
    point: *const f64,
    v: *const f64,
    n: usize,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        check_dim(s, n)?;
        let tv = TangentVector::new(&s.metric, slice(point, n)?, slice(v, n)?).lift()?;
        let val = sphere_mean_curvature(&s.metric, &tv).lift()?;
        out.as_mut().map(|o| *o = val).ok_or_else(null)
    })
}

/// `ι(v) = −γ_v′(1)`, written as base point and components.
///
/// # Safety
/// `point` and `v` must point to `n` doubles; `out_point` and `out_v` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tl_geodesic_involution(
    space: *const TlSpace,
    point: *const f64,
    v: *const f64,
    n: usize,
    out_point: *mut f64,
    out_v: *mut f64,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        check_dim(s, n)?;
        if out_point.is_null() || out_v.is_null() {
            return Err(null());
        }
        let tv = TangentVector::new(&s.metric, slice(point, n)?, slice(v, n)?).lift()?;
        let w = geodesic_involution(&s.metric, &tv).lift()?;
        std::slice::from_raw_parts_mut(out_point, n).copy_from_slice(&w.point);
        std::slice::from_raw_parts_mut(out_v, n).copy_from_slice(&w.components);
        Ok(())
    })
}

/// Closed-form radial density `θ̄(r)` of a harmonic built-in.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_closed_form_profile(
    space: *const TlSpace,
    r: f64,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        let spec = s.spec.as_ref().ok_or((
            TlStatus::Unsupported,
            "callback spaces have no closed form".to_string(),
        ))?;
        let p = closed_form_profile(spec).lift()?;
        out.as_mut().map(|o| *o = p.value(r)).ok_or_else(null)
    })
}

/// Volume of the radius-`r` tube about the unit-speed geodesic from `point`
/// along `direction` of the given length, with its error estimate.
///
/// # Safety
/// `point` and `direction` must point to `n` doubles; `value` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_tube_volume(
    space: *const TlSpace,
    point: *const f64,
    direction: *const f64,
    n: usize,
    length: f64,
    r: f64,
    value: *mut f64,
    error: *mut f64,
) -> TlStatus {
    guard(|| {
        let s = space_ref(space)?;
        check_dim(s, n)?;
        if value.is_null() || error.is_null() {
            return Err(null());
        }
        let fc = FramedCurve::geodesic(&s.metric, slice(point, n)?, slice(direction, n)?, length)
            .lift()?;
        let v = tube_volume_direct(&s.metric, &fc, r, &TubeQuadrature::default()).lift()?;
        *value = v.value;
        *error = v.error;
        Ok(())
    })
}

/// Runs an experiment config; writes the CSV report and the CLI exit code.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out_csv` and `exit_code` must be writable.
/// The report string is released with [`tl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_run_config(
    config_json: *const c_char,
    out_csv: *mut *mut c_char,
    exit_code: *mut c_int,
) -> TlStatus {
    guard(|| {
        if out_csv.is_null() || exit_code.is_null() {
            return Err(null());
        }
        let cfg = ExperimentConfig::from_json(c_str(config_json)?).lift()?;
        let outcome = run(&cfg).lift()?;
        let csv = CString::new(to_csv(&outcome.report.rows))
            .map_err(|e| (TlStatus::InvalidUtf8, e.to_string()))?;
        *out_csv = csv.into_raw();
        *exit_code = outcome.status;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn tl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
