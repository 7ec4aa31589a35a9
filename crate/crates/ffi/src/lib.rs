//! C ABI over the `threeform` library.
//!
//! Forms and reports are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`TfStatus`]; on failure a message
//! is available from [`tf_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`tf_string_free`]. Panics never cross the boundary: they surface as
//! [`TfStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use threeform::config::Settings;
use threeform::error::Error;
use threeform::io::{parse_form, AnyForm};
use threeform::report::Report;
use threeform::verify;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BackendMismatch = 4,
    Grade = 5,
    NotPrimitive = 6,
    WrongOrbit = 7,
    Indeterminate = 8,
    Domain = 9,
    Inconsistent = 10,
    Io = 11,
    Panic = 12,
}

impl From<&Error> for TfStatus {
    fn from(e: &Error) -> TfStatus {
        match e {
            Error::BackendMismatch(..) => TfStatus::BackendMismatch,
            Error::Grade { .. } => TfStatus::Grade,
            Error::NotPrimitive | Error::NotPrimitiveAt(_) => TfStatus::NotPrimitive,
            Error::WrongOrbit(_) => TfStatus::WrongOrbit,
            Error::Indeterminate(_) => TfStatus::Indeterminate,
            Error::Domain(_) => TfStatus::Domain,
            Error::Inconsistent(_) => TfStatus::Inconsistent,
            Error::Parse(_) | Error::Json(_) => TfStatus::Parse,
            Error::Io(_) => TfStatus::Io,
        }
    }
}

/// A parsed form on either backend.
pub struct TfForm {
    inner: AnyForm,
}

/// The outcome of a verification suite or example run.
pub struct TfReport {
    inner: Report,
}

/// Run settings. Obtain defaults from [`tf_settings_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TfSettings {
    pub seed: u64,
    pub samples: usize,
    pub grid: usize,
    pub tolerance_numeric: f64,
    pub tolerance_exactness_proxy: f64,
}

impl TfSettings {
    fn resolve(&self) -> Result<Settings, Failure> {
        let s = Settings {
            seed: self.seed,
            samples: self.samples,
            grid: self.grid,
            tolerance_numeric: self.tolerance_numeric,
            tolerance_exactness_proxy: self.tolerance_exactness_proxy,
            ..Settings::default()
        };
        s.validate()?;
        Ok(s)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: TfStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure { status: TfStatus::from(&e), message: e.to_string() }
    }
}

fn failure(status: TfStatus, message: &str) -> Failure {
    Failure { status, message: message.to_string() }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs were removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, records its error message and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(failure(TfStatus::Panic, &msg))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            TfStatus::Ok
        }
        Err(e) => {
            set_last_error(Some(e.message));
            e.status
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(failure(TfStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| failure(TfStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| failure(TfStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(failure(TfStatus::NullPointer, "null out-parameter"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(failure(TfStatus::NullPointer, "null out-parameter"));
    }
    *out = CString::new(s).map_err(|_| failure(TfStatus::Inconsistent, "output contains NUL"))?.into_raw();
    Ok(())
}

unsafe fn settings_or_default(settings: *const TfSettings) -> Result<Settings, Failure> {
    match settings.as_ref() {
        Some(s) => s.resolve(),
        None => Ok(Settings::default()),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn tf_settings_default() -> TfSettings {
    let s = Settings::default();
    TfSettings {
        seed: s.seed,
        samples: s.samples,
        grid: s.grid,
        tolerance_numeric: s.tolerance_numeric,
        tolerance_exactness_proxy: s.tolerance_exactness_proxy,
    }
}

/// Parses a form from its JSON schema.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tf_form_parse(json: *const c_char, out: *mut *mut TfForm) -> TfStatus {
    guard(|| {
        let form = parse_form(text(json)?)?;
        put(out, TfForm { inner: form })
    })
}

/// # Safety
/// `form` must come from [`tf_form_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tf_form_free(form: *mut TfForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Grade of the form, or -1 for NULL.
///
/// # Safety
/// `form` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_form_grade(form: *const TfForm) -> i32 {
    form.as_ref().map_or(-1, |f| f.inner.grade() as i32)
}

/// Serializes the form back to JSON.
///
/// # Safety
/// `form` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tf_form_to_json(form: *const TfForm, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let json = serde_json::to_string(&handle(form)?.inner.to_json()).map_err(Error::from)?;
        put_string(out, json)
    })
}

enum Pair<'a> {
    Rational(&'a threeform::exterior::Form<threeform::scalar::Rational>, Option<&'a threeform::exterior::Form<threeform::scalar::Rational>>),
    Float(&'a threeform::exterior::Form<f64>, Option<&'a threeform::exterior::Form<f64>>),
}

unsafe fn pair<'a>(phi: *const TfForm, omega: *const TfForm) -> Result<Pair<'a>, Failure> {
    let phi = &handle(phi)?.inner;
    let omega = omega.as_ref().map(|w| &w.inner);
    match (phi, omega) {
        (AnyForm::Rational(p), None) => Ok(Pair::Rational(p, None)),
        (AnyForm::Rational(p), Some(AnyForm::Rational(w))) => Ok(Pair::Rational(p, Some(w))),
        (AnyForm::Float(p), None) => Ok(Pair::Float(p, None)),
        (AnyForm::Float(p), Some(AnyForm::Float(w))) => Ok(Pair::Float(p, Some(w))),
        (p, Some(w)) => Err(Error::BackendMismatch(p.backend(), w.backend()).into()),
    }
}

fn data_json(report: &Report, key: Option<&str>) -> Result<String, Failure> {
    let value = match key {
        Some(k) => report.data.get(k).cloned().unwrap_or(serde_json::Value::Null),
        None => serde_json::to_value(&report.data).map_err(Error::from)?,
    };
    Ok(serde_json::to_string(&value).map_err(Error::from)?)
}

/// Classification record of `phi` as JSON. `omega` may be NULL; when given
/// the symplectic orbit is included. `tol` applies to float forms only.
///
/// # Safety
/// `phi` must be a live handle, `omega` NULL or a live handle, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tf_classify_json(phi: *const TfForm, omega: *const TfForm, tol: f64, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let report = match pair(phi, omega)? {
            Pair::Rational(p, w) => verify::classify_report(p, w, 0.0)?,
            Pair::Float(p, w) => verify::classify_report(p, w, tol)?,
        };
        if let Some(c) = report.checks.iter().find(|c| !c.passed()) {
            return Err(failure(TfStatus::Indeterminate, c.note.as_deref().unwrap_or("indeterminate")));
        }
        put_string(out, data_json(&report, Some("classification"))?)
    })
}

/// `K`, `F`, `Q`, `q` and subspace dimensions of `phi` as JSON.
///
/// # Safety
/// As for [`tf_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn tf_invariants_json(phi: *const TfForm, omega: *const TfForm, tol: f64, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let report = match pair(phi, omega)? {
            Pair::Rational(p, w) => verify::invariants_report(p, w, 0.0)?,
            Pair::Float(p, w) => verify::invariants_report(p, w, tol)?,
        };
        put_string(out, data_json(&report, None)?)
    })
}

/// Runs a named verification suite. `settings` may be NULL for defaults.
///
/// # Safety
/// `suite` must be a NUL-terminated string, `settings` NULL or readable,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_verify(suite: *const c_char, settings: *const TfSettings, out: *mut *mut TfReport) -> TfStatus {
    guard(|| {
        let report = verify::run_suite(text(suite)?, &settings_or_default(settings)?)?;
        put(out, TfReport { inner: report })
    })
}

/// Flat torus degeneration at the rational parameter `t` (e.g. `"1/4"`).
///
/// # Safety
/// As for [`tf_verify`].
#[no_mangle]
pub unsafe extern "C" fn tf_example_torus(t: *const c_char, settings: *const TfSettings, out: *mut *mut TfReport) -> TfStatus {
    guard(|| {
        let report = verify::example_torus(text(t)?, &settings_or_default(settings)?)?;
        put(out, TfReport { inner: report })
    })
}

/// Cone example on 2-forms over flat 3-space. `g` points to nine entries in
/// row-major order, or is NULL for the identity.
///
/// # Safety
/// `g` must be NULL or point to nine readable doubles; otherwise as for
/// [`tf_verify`].
#[no_mangle]
pub unsafe extern "C" fn tf_example_lambda2(c: f64, g: *const f64, settings: *const TfSettings, out: *mut *mut TfReport) -> TfStatus {
    guard(|| {
        let metric = if g.is_null() {
            verify::IDENTITY
        } else {
            let v = std::slice::from_raw_parts(g, 9);
            std::array::from_fn(|i| std::array::from_fn(|j| v[3 * i + j]))
        };
        let report = verify::example_lambda2(c, metric, &settings_or_default(settings)?)?;
        put(out, TfReport { inner: report })
    })
}

/// Local K3 patch for the positive function `f` of `x1 y1 x2 y2 x y`.
///
/// # Safety
/// As for [`tf_verify`].
#[no_mangle]
pub unsafe extern "C" fn tf_example_k3patch(f: *const c_char, settings: *const TfSettings, out: *mut *mut TfReport) -> TfStatus {
    guard(|| {
        let report = verify::example_k3(text(f)?, &settings_or_default(settings)?)?;
        put(out, TfReport { inner: report })
    })
}

/// 0 when every check passed, 1 on a failure, 2 when indeterminate, -1
/// for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tf_report_exit_code(report: *const TfReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.inner.exit_code())
}

/// The report as JSON; wall-clock timings are omitted unless
/// `with_timings` is set.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_report_json(report: *const TfReport, with_timings: bool, out: *mut *mut c_char) -> TfStatus {
    guard(|| {
        let r = &handle(report)?.inner;
        put_string(out, if with_timings { r.to_json() } else { r.to_json_untimed() })
    })
}

/// # Safety
/// `report` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tf_report_free(report: *mut TfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
