//! C ABI for `superpose`.
//!
//! Samples and decompositions are opaque handles created and released by the
//! library. Every fallible call returns an [`SpStatus`]; on failure the
//! message is available from [`sp_last_error_message`] on the same thread.
//! Strings returned by the library are released with [`sp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use superpose::io::DecompositionFile;
use superpose::{
    approximate_decompose, find_array, refine, residual_report, Decomposition, Error, Level, Point,
    SampledCompactum,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSample = 3,
    LevelNotFound = 4,
    NoConvergence = 5,
    Parse = 6,
    Io = 7,
    Internal = 8,
}

impl From<&Error> for SpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidSample(_)
            | Error::DuplicatePoint { .. }
            | Error::DegenerateSample(_)
            | Error::CoordinateOutOfRange { .. } => SpStatus::InvalidSample,
            Error::InvalidParameter(_) | Error::UnknownFunction(_) => SpStatus::InvalidArgument,
            Error::LevelNotFound { .. } => SpStatus::LevelNotFound,
            Error::NoConvergence { .. } => SpStatus::NoConvergence,
            Error::Parse(_) => SpStatus::Parse,
            Error::Io(_) => SpStatus::Io,
            Error::EmptyColumnNotFound { .. } => SpStatus::Internal,
        }
    }
}

/// A sample of points with function values.
pub struct SpSample {
    inner: SampledCompactum,
}

/// A function pair `g(x) + h(y)`.
pub struct SpDecomposition {
    inner: Decomposition,
}

/// Scalar summary of a decomposition. Absent values are `-1` for integers
/// and NaN for reals.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpMeta {
    pub level: i32,
    pub epsilon: f64,
    pub delta: f64,
    pub big_f: i64,
    pub iterations: usize,
    pub sup_residual: f64,
    /// Every pass ran at a certified level.
    pub certified: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> SpStatus {
    let status = SpStatus::from(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> SpStatus {
    set_error(format!("{what} is null"));
    SpStatus::NullPointer
}

/// Runs `body`, turning a panic into [`SpStatus::Internal`].
fn guard(body: impl FnOnce() -> SpStatus) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == SpStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SpStatus::Internal
        }
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a sample from `len` aligned coordinates and values.
///
/// # Safety
/// `xs`, `ys` and `fs` must each point to `len` readable doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_sample_new(
    xs: *const f64,
    ys: *const f64,
    fs: *const f64,
    len: usize,
    out: *mut *mut SpSample,
) -> SpStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if len > 0 && (xs.is_null() || ys.is_null() || fs.is_null()) {
            return null("coordinate array");
        }
        let (xs, ys, fs) = if len == 0 {
            (&[][..], &[][..], &[][..])
        } else {
            (
                slice::from_raw_parts(xs, len),
                slice::from_raw_parts(ys, len),
                slice::from_raw_parts(fs, len),
            )
        };
        let points = xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect();
        match SampledCompactum::new(points, fs.to_vec()) {
            Ok(s) => {
                *out = boxed(SpSample { inner: s });
                SpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `sample` must be null or a handle from [`sp_sample_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_sample_free(sample: *mut SpSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sp_sample_len(sample: *const SpSample) -> usize {
    sample.as_ref().map_or(0, |s| s.inner.len())
}

/// One approximation pass. `delta <= 0` or NaN estimates delta from the
/// sample; `level < 0` searches for the smallest certified level.
///
/// # Safety
/// `sample` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_decompose(
    sample: *const SpSample,
    epsilon: f64,
    delta: f64,
    level: i32,
    n_max: u32,
    out: *mut *mut SpDecomposition,
) -> SpStatus {
    guard(|| {
        let Some(sample) = sample.as_ref() else {
            return null("sample");
        };
        if out.is_null() {
            return null("out");
        }
        let delta = (delta > 0.0).then_some(delta);
        let level = if level < 0 {
            None
        } else {
            match Level::new(level as u32) {
                Ok(l) => Some(l),
                Err(e) => return fail(e),
            }
        };
        match approximate_decompose(&sample.inner, epsilon, delta, level, n_max) {
            Ok(d) => {
                *out = boxed(SpDecomposition { inner: d });
                SpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Repeated passes until the sup residual is at most `tol`.
///
/// # Safety
/// `sample` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_refine(
    sample: *const SpSample,
    tol: f64,
    max_iter: usize,
    n_max: u32,
    out: *mut *mut SpDecomposition,
) -> SpStatus {
    guard(|| {
        let Some(sample) = sample.as_ref() else {
            return null("sample");
        };
        if out.is_null() {
            return null("out");
        }
        match refine(&sample.inner, tol, max_iter, n_max) {
            Ok(d) => {
                *out = boxed(SpDecomposition { inner: d });
                SpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `d` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn sp_decomposition_free(d: *mut SpDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn eval_with(
    d: *const SpDecomposition,
    out: *mut f64,
    f: impl FnOnce(&Decomposition) -> f64,
) -> SpStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return null("decomposition");
        };
        if out.is_null() {
            return null("out");
        }
        *out = f(&d.inner);
        SpStatus::Ok
    })
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_eval_g(d: *const SpDecomposition, x: f64, out: *mut f64) -> SpStatus {
    eval_with(d, out, |d| d.g.eval(x))
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_eval_h(d: *const SpDecomposition, y: f64, out: *mut f64) -> SpStatus {
    eval_with(d, out, |d| d.h.eval(y))
}

/// `g(x) + h(y)`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_eval(
    d: *const SpDecomposition,
    x: f64,
    y: f64,
    out: *mut f64,
) -> SpStatus {
    eval_with(d, out, |d| d.eval(x, y))
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_decomposition_meta(
    d: *const SpDecomposition,
    out: *mut SpMeta,
) -> SpStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return null("decomposition");
        };
        if out.is_null() {
            return null("out");
        }
        let m = &d.inner.meta;
        *out = SpMeta {
            level: m.level.map_or(-1, |l| l as i32),
            epsilon: m.epsilon.unwrap_or(f64::NAN),
            delta: m.delta.unwrap_or(f64::NAN),
            big_f: m.big_f.map_or(-1, |f| f as i64),
            iterations: m.iterations,
            sup_residual: m.sup_residual,
            certified: m.passes.iter().all(|p| p.certified),
        };
        SpStatus::Ok
    })
}

fn give_string(text: String, out: *mut *mut c_char) -> SpStatus {
    match CString::new(text) {
        Ok(c) => {
            // SAFETY: callers check `out` before building the text.
            unsafe { *out = c.into_raw() };
            SpStatus::Ok
        }
        Err(e) => fail(Error::Parse(e.to_string())),
    }
}

/// Serializes `d` as the JSON document the command-line tool writes. With a
/// non-null `sample` the document includes a bound report.
///
/// # Safety
/// `d` must be a live handle, `sample` null or live, and `out` writable.
/// Release the string with [`sp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sp_decomposition_to_json(
    d: *const SpDecomposition,
    sample: *const SpSample,
    out: *mut *mut c_char,
) -> SpStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return null("decomposition");
        };
        if out.is_null() {
            return null("out");
        }
        let report = match sample.as_ref() {
            Some(s) => match residual_report(&s.inner, &d.inner) {
                Ok(r) => Some(r),
                Err(e) => return fail(e),
            },
            None => None,
        };
        let file = DecompositionFile {
            decomposition: d.inner.clone(),
            report,
        };
        match file.to_json() {
            Ok(text) => give_string(text, out),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sp_decomposition_from_json(
    json: *const c_char,
    out: *mut *mut SpDecomposition,
) -> SpStatus {
    guard(|| {
        if json.is_null() {
            return null("json");
        }
        if out.is_null() {
            return null("out");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(Error::Parse(e.to_string())),
        };
        match DecompositionFile::from_json(text) {
            Ok(file) => {
                *out = boxed(SpDecomposition {
                    inner: file.decomposition,
                });
                SpStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Searches for an array of `max_len` segments. `*found` is set to 1 when
/// one exists; if `certificate` is non-null it then receives a JSON
/// description (release with [`sp_string_free`]), otherwise null.
///
/// # Safety
/// `sample` must be a live handle, `found` writable, `certificate` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sp_check_arrays(
    sample: *const SpSample,
    max_len: usize,
    tol: f64,
    found: *mut i32,
    certificate: *mut *mut c_char,
) -> SpStatus {
    guard(|| {
        let Some(sample) = sample.as_ref() else {
            return null("sample");
        };
        if found.is_null() {
            return null("found");
        }
        if max_len == 0 || !(tol >= 0.0 && tol.is_finite()) {
            return fail(Error::InvalidParameter(format!(
                "max_len must be >= 1 and tol >= 0, got {max_len} and {tol}"
            )));
        }
        let cert = find_array(sample.inner.points(), max_len, tol);
        *found = cert.is_some() as i32;
        if !certificate.is_null() {
            *certificate = ptr::null_mut();
            if let Some(c) = cert {
                return match serde_json::to_string(&c) {
                    Ok(text) => give_string(text, certificate),
                    Err(e) => fail(Error::Parse(e.to_string())),
                };
            }
        }
        SpStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
