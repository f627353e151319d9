//! C ABI for the `scaling-laws` library.
//!
//! Every fallible function returns an [`SlStatus`]; on anything other than
//! `SL_STATUS_OK` a human-readable message is available from
//! [`sl_last_error_message`] on the same thread. Observation sets and fit
//! results cross the boundary as opaque handles that must be released with
//! their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scaling_laws::solver::Weighting;
use scaling_laws::{
    DataLawParams, EnvelopeParams, Error, FitOptions, FitResult, JointLawParams, ObservationPoint,
    ObservationSet,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyObservations = 3,
    Underdetermined = 4,
    Unreachable = 5,
    NumericalFailure = 6,
    DegenerateDesign = 7,
    Schema = 8,
    Io = 9,
    UnknownFixture = 10,
    NotConverged = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlDataLawParams {
    pub a: f64,
    pub alpha: f64,
    pub c_inf: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlJointLawParams {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub c_inf: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlEnvelopeParams {
    pub eps0: f64,
    pub eta: f64,
}

/// Fit configuration. Obtain defaults from [`sl_fit_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlFitOptions {
    pub init: SlDataLawParams,
    pub fix_c_inf_to_zero: bool,
    pub mse_stop: f64,
    pub step_stop: f64,
    pub max_iterations: u64,
    pub multi_start: u64,
    pub seed: u64,
    /// Weight residuals by `1 / std`; every point must then carry a std.
    pub inverse_variance: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlFitSummary {
    pub params: SlDataLawParams,
    pub sse: f64,
    pub mse: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Opaque list of observation points.
pub struct SlPoints {
    points: Vec<ObservationPoint>,
}

/// Opaque result of a data-law fit.
pub struct SlFit {
    fit: FitResult<DataLawParams>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(err: &Error) -> SlStatus {
    match err {
        Error::EmptyObservations => SlStatus::EmptyObservations,
        Error::ErrorOutOfRange { .. }
        | Error::Validation(_)
        | Error::Domain(_)
        | Error::GridTooLarge { .. }
        | Error::NeverExitsSmallData { .. } => SlStatus::InvalidArgument,
        Error::BelowIrreducible { .. } | Error::AboveUnitSize { .. } => SlStatus::Unreachable,
        Error::Underdetermined { .. } => SlStatus::Underdetermined,
        Error::DegenerateJointDesign(_) => SlStatus::DegenerateDesign,
        Error::NumericalFailure { .. } => SlStatus::NumericalFailure,
        Error::UnconvergedFit => SlStatus::NotConverged,
        Error::UnknownColumn { .. } | Error::MissingColumn { .. } | Error::Parse { .. } | Error::Csv(_) => {
            SlStatus::Schema
        }
        Error::UnknownFixture { .. } => SlStatus::UnknownFixture,
        Error::Io { .. } => SlStatus::Io,
    }
}

struct Failure(SlStatus);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        set_last_error(&err.to_string());
        Failure(status_of(&err))
    }
}

fn fail(status: SlStatus, message: &str) -> Failure {
    set_last_error(message);
    Failure(status)
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            SlStatus::Ok
        }
        Ok(Err(Failure(status))) => status,
        Err(_) => {
            set_last_error("internal panic");
            SlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(SlStatus::NullPointer, &format!("{what} is NULL")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(SlStatus::NullPointer, &format!("{what} is NULL")))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(SlStatus::NullPointer, &format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SlStatus::InvalidArgument, &format!("{what} is not valid UTF-8")))
}

fn data_params(p: &SlDataLawParams) -> Result<DataLawParams, Failure> {
    Ok(DataLawParams::new(p.a, p.alpha, p.c_inf)?)
}

fn to_c_params(p: &DataLawParams) -> SlDataLawParams {
    SlDataLawParams {
        a: p.a(),
        alpha: p.alpha(),
        c_inf: p.c_inf(),
    }
}

fn validated(points: &SlPoints) -> Result<ObservationSet, Failure> {
    Ok(scaling_laws::validate_points(points.points.clone())?)
}

fn boxed_points(set: ObservationSet) -> *mut SlPoints {
    Box::into_raw(Box::new(SlPoints {
        points: set.into_vec(),
    }))
}

/// Message describing the most recent failure on this thread, or an empty
/// string after a successful call. The pointer stays valid until the next
/// call into this library from the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn sl_status_name(status: SlStatus) -> *const c_char {
    let name: &'static CStr = match status {
        SlStatus::Ok => c"ok",
        SlStatus::NullPointer => c"null pointer",
        SlStatus::InvalidArgument => c"invalid argument",
        SlStatus::EmptyObservations => c"empty observation set",
        SlStatus::Underdetermined => c"underdetermined fit",
        SlStatus::Unreachable => c"unreachable target",
        SlStatus::NumericalFailure => c"numerical failure",
        SlStatus::DegenerateDesign => c"degenerate design",
        SlStatus::Schema => c"schema error",
        SlStatus::Io => c"i/o error",
        SlStatus::UnknownFixture => c"unknown fixture",
        SlStatus::NotConverged => c"not converged",
        SlStatus::Panic => c"internal panic",
    };
    name.as_ptr()
}

#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Empty observation list. Never NULL; release with [`sl_points_free`].
#[no_mangle]
pub extern "C" fn sl_points_new() -> *mut SlPoints {
    Box::into_raw(Box::new(SlPoints { points: Vec::new() }))
}

/// # Safety
/// `points` must be NULL or a handle returned by this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn sl_points_free(points: *mut SlPoints) {
    if !points.is_null() {
        drop(Box::from_raw(points));
    }
}

/// Appends a point. Pass a negative or NaN `std` when no spread is known.
///
/// # Safety
/// `points` must be a live handle from [`sl_points_new`] or a loader.
#[no_mangle]
pub unsafe extern "C" fn sl_points_push(points: *mut SlPoints, n: f64, error: f64, std: f64) -> SlStatus {
    guard(|| {
        let points = deref_mut(points, "points")?;
        let mut p = ObservationPoint::new(n, error);
        if std >= 0.0 {
            p = p.with_std(std);
        }
        p.validate()?;
        points.points.push(p);
        Ok(())
    })
}

/// Number of points held, or 0 for NULL.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_points_len(points: *const SlPoints) -> usize {
    points.as_ref().map_or(0, |p| p.points.len())
}

/// Copies point `index` into `n_out` / `error_out`.
///
/// # Safety
/// `points` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_points_get(
    points: *const SlPoints,
    index: usize,
    n_out: *mut f64,
    error_out: *mut f64,
) -> SlStatus {
    guard(|| {
        let points = deref(points, "points")?;
        let p = points
            .points
            .get(index)
            .ok_or_else(|| fail(SlStatus::InvalidArgument, &format!("index {index} out of range")))?;
        *deref_mut(n_out, "n_out")? = p.n;
        *deref_mut(error_out, "error_out")? = p.error;
        Ok(())
    })
}

/// Loads a built-in fixture (currently `"table1"`) into a new handle.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_points_from_fixture(name: *const c_char, out: *mut *mut SlPoints) -> SlStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let set = scaling_laws::builtin_fixture(string(name, "name")?)?;
        *out = boxed_points(set);
        Ok(())
    })
}

/// Reads an observation CSV into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_points_read_csv(path: *const c_char, out: *mut *mut SlPoints) -> SlStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let set = scaling_laws::read_points_path(string(path, "path")?)?;
        *out = boxed_points(set);
        Ok(())
    })
}

/// # Safety
/// `points` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sl_points_write_csv(points: *const SlPoints, path: *const c_char) -> SlStatus {
    guard(|| {
        let points = deref(points, "points")?;
        scaling_laws::ingest::write_points_path(&points.points, string(path, "path")?)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sl_fit_options_default() -> SlFitOptions {
    let d = FitOptions::default();
    SlFitOptions {
        init: to_c_params(&d.init),
        fix_c_inf_to_zero: d.fix_c_inf_to_zero,
        mse_stop: d.mse_stop,
        step_stop: d.step_stop,
        max_iterations: d.max_iterations as u64,
        multi_start: d.multi_start as u64,
        seed: d.seed,
        inverse_variance: false,
    }
}

fn fit_options(o: &SlFitOptions) -> Result<FitOptions, Failure> {
    let size = |v: u64, what: &str| {
        usize::try_from(v).map_err(|_| fail(SlStatus::InvalidArgument, &format!("{what} too large")))
    };
    Ok(FitOptions {
        init: data_params(&o.init)?,
        joint_init: None,
        fix_c_inf_to_zero: o.fix_c_inf_to_zero,
        mse_stop: o.mse_stop,
        step_stop: o.step_stop,
        max_iterations: size(o.max_iterations, "max_iterations")?,
        multi_start: size(o.multi_start, "multi_start")?,
        seed: o.seed,
        weighting: if o.inverse_variance {
            Weighting::InverseVariance
        } else {
            Weighting::Unweighted
        },
    })
}

/// Fits the data law. `options` may be NULL for defaults. A fit that stops
/// without converging still produces a handle (status `SL_STATUS_OK`); check
/// `converged` in its summary.
///
/// # Safety
/// `points` must be a live handle, `options` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_fit_data_law(
    points: *const SlPoints,
    options: *const SlFitOptions,
    out: *mut *mut SlFit,
) -> SlStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let set = validated(deref(points, "points")?)?;
        let opts = match options.as_ref() {
            Some(o) => fit_options(o)?,
            None => FitOptions::default(),
        };
        let fit = scaling_laws::fit_data_law(&set, &opts)?;
        *out = Box::into_raw(Box::new(SlFit { fit }));
        Ok(())
    })
}

/// # Safety
/// `fit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_fit_summary(fit: *const SlFit, out: *mut SlFitSummary) -> SlStatus {
    guard(|| {
        let f = &deref(fit, "fit")?.fit;
        *deref_mut(out, "out")? = SlFitSummary {
            params: to_c_params(&f.params),
            sse: f.sse,
            mse: f.mse,
            iterations: f.iterations as u64,
            converged: f.converged,
        };
        Ok(())
    })
}

/// Copies up to `capacity` residuals (`predicted - observed`, in sorted point
/// order) into `out` and stores the total count in `len_out`.
///
/// # Safety
/// `fit` must be a live handle; `out` must hold `capacity` doubles (or be NULL
/// when `capacity` is 0); `len_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_fit_residuals(
    fit: *const SlFit,
    out: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> SlStatus {
    guard(|| {
        let r = &deref(fit, "fit")?.fit.residuals;
        *deref_mut(len_out, "len_out")? = r.len();
        let k = r.len().min(capacity);
        if k > 0 {
            if out.is_null() {
                return Err(fail(SlStatus::NullPointer, "out is NULL"));
            }
            ptr::copy_nonoverlapping(r.as_ptr(), out, k);
        }
        Ok(())
    })
}

/// # Safety
/// `fit` must be NULL or a live handle from [`sl_fit_data_law`].
#[no_mangle]
pub unsafe extern "C" fn sl_fit_free(fit: *mut SlFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_eval_data_law(params: *const SlDataLawParams, n: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let p = data_params(deref(params, "params")?)?;
        *deref_mut(out, "out")? = scaling_laws::eval_data_law(&p, n)?;
        Ok(())
    })
}

/// Dataset size at which the law reaches `target_error`.
///
/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_invert_data_law(
    params: *const SlDataLawParams,
    target_error: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = data_params(deref(params, "params")?)?;
        *deref_mut(out, "out")? = scaling_laws::invert_data_law(&p, target_error)?;
        Ok(())
    })
}

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_eval_joint_law(
    params: *const SlJointLawParams,
    m: f64,
    n: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let p = JointLawParams::new(p.a, p.alpha, p.b, p.beta, p.c_inf)?;
        *deref_mut(out, "out")? = scaling_laws::eval_joint_law(&p, m, n)?;
        Ok(())
    })
}

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_envelope(
    eps_tilde: f64,
    params: *const SlEnvelopeParams,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let e = deref(params, "params")?;
        let e = EnvelopeParams::new(e.eps0, e.eta)?;
        *deref_mut(out, "out")? = scaling_laws::envelope(eps_tilde, &e)?;
        Ok(())
    })
}

/// Sum of squared residuals of `params` over `points`.
///
/// # Safety
/// `params` and `points` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sse(
    params: *const SlDataLawParams,
    points: *const SlPoints,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = data_params(deref(params, "params")?)?;
        let set = validated(deref(points, "points")?)?;
        *deref_mut(out, "out")? = scaling_laws::sse(&p, &set)?;
        Ok(())
    })
}
