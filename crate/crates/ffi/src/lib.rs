//! C interface to `fujita_core`.
//!
//! Every fallible function returns a [`FujitaStatus`]; on failure the message
//! is available from [`fujita_last_error`] on the same thread. Objects are
//! handed out as opaque pointers and must be released with the matching
//! `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use fujita_core::config::{parse_config, ExperimentConfig};
use fujita_core::nonlinearity::p_crit;
use fujita_core::runner::{execute, execute_in_memory, Report};
use fujita_core::steady::{eval_family, riesz_residual, SteadyStateParams};
use fujita_core::FujitaError;

/// Result codes. `FUJITA_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FujitaStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Argument outside the mathematical domain (e.g. alpha > 2, d <= alpha).
    Domain = 2,
    /// Inconsistent or malformed input other than a domain violation.
    InvalidArgument = 3,
    /// A numerical routine failed to converge or produced non-finite values.
    Numerical = 4,
    /// The config document could not be parsed or validated.
    Config = 5,
    Io = 6,
    /// The experiment stopped early; a partial report is still available.
    Partial = 7,
    /// Internal error (caught panic).
    Internal = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("NUL bytes removed")));
}

fn fail(status: FujitaStatus, msg: impl Into<String>) -> FujitaStatus {
    set_error(msg);
    status
}

fn from_core(err: FujitaError) -> FujitaStatus {
    let status = match &err {
        FujitaError::Domain(_) | FujitaError::Range(_) => FujitaStatus::Domain,
        FujitaError::Validation(_) => FujitaStatus::InvalidArgument,
        FujitaError::Numerical { .. } => FujitaStatus::Numerical,
        FujitaError::Parse { .. } | FujitaError::Config(_) => FujitaStatus::Config,
        FujitaError::Io(_) => FujitaStatus::Io,
    };
    fail(status, err.to_string())
}

fn guarded(f: impl FnOnce() -> FujitaStatus) -> FujitaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(FujitaStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

/// Message describing the most recent failure on this thread, or NULL.
///
/// The string stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fujita_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Critical exponent `(d + alpha) / (d - alpha)`; requires `d > alpha`.
///
/// # Safety
/// `out` must be NULL or point to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn fujita_p_crit(d: u32, alpha: f64, out: *mut f64) -> FujitaStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FujitaStatus::NullPointer, "out is NULL");
        }
        match p_crit(d, alpha) {
            Ok(p) => {
                *out = p;
                FujitaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Opaque handle to one member of the explicit steady-state family.
pub struct FujitaSteady {
    params: SteadyStateParams,
}

/// Creates the steady state with the given amplitude centred at `center`
/// (`d` coordinates) or at the origin when `center` is NULL.
///
/// # Safety
/// `center` must be NULL or point to `d` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fujita_steady_new(
    d: u32,
    alpha: f64,
    amplitude: f64,
    center: *const f64,
    out: *mut *mut FujitaSteady,
) -> FujitaStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FujitaStatus::NullPointer, "out is NULL");
        }
        *out = ptr::null_mut();
        if d == 0 || d > 64 {
            return fail(FujitaStatus::Domain, format!("dimension must be in 1..=64, got {d}"));
        }
        let c = if center.is_null() {
            vec![0.0; d as usize]
        } else {
            std::slice::from_raw_parts(center, d as usize).to_vec()
        };
        match SteadyStateParams::new(c, amplitude, d, alpha) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(FujitaSteady { params }));
                FujitaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Evaluates the steady state at the point `x` of length `len` (must equal `d`).
///
/// # Safety
/// `handle` must come from `fujita_steady_new`; `x` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fujita_steady_eval(handle: *const FujitaSteady, x: *const f64, len: usize, out: *mut f64) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() || x.is_null() || out.is_null() {
            return fail(FujitaStatus::NullPointer, "handle, x and out must be non-NULL");
        }
        let params = &(*handle).params;
        if len != params.d as usize {
            return fail(FujitaStatus::InvalidArgument, format!("point has {len} coordinates, expected {}", params.d));
        }
        *out = eval_family(params, std::slice::from_raw_parts(x, len));
        FujitaStatus::Ok
    })
}

/// Exponent `p` for which the handle solves `(-Δ)^{α/2} u = u^p`.
///
/// # Safety
/// `handle` must come from `fujita_steady_new`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fujita_steady_exponent(handle: *const FujitaSteady, out: *mut f64) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            return fail(FujitaStatus::NullPointer, "handle and out must be non-NULL");
        }
        *out = (*handle).params.exponent();
        FujitaStatus::Ok
    })
}

/// Largest Riesz-identity residual over `n` radii, normalized by `u(0)`.
///
/// # Safety
/// `handle` must come from `fujita_steady_new`; `radii` must point to `n`
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fujita_steady_residual(handle: *const FujitaSteady, radii: *const f64, n: usize, out: *mut f64) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() || radii.is_null() || out.is_null() {
            return fail(FujitaStatus::NullPointer, "handle, radii and out must be non-NULL");
        }
        if n == 0 {
            return fail(FujitaStatus::InvalidArgument, "at least one radius is required");
        }
        let params = &(*handle).params;
        let radii = std::slice::from_raw_parts(radii, n);
        match riesz_residual(&|r| params.radial(r), params.d, params.alpha, params.exponent(), radii, 1.0 / params.a_scale()) {
            Ok(rep) => {
                *out = rep.max_normalized;
                FujitaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Releases a steady-state handle. NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or come from `fujita_steady_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fujita_steady_free(handle: *mut FujitaSteady) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Opaque handle to a validated experiment config and, after a run, its report.
pub struct FujitaExperiment {
    config: ExperimentConfig,
    report: Option<CString>,
}

/// Parses and validates a JSON config document (same format as the CLI; the
/// `command` key is required here).
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_new(json: *const c_char, out: *mut *mut FujitaExperiment) -> FujitaStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(FujitaStatus::NullPointer, "json and out must be non-NULL");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(FujitaStatus::Config, "config is not valid UTF-8");
        };
        match parse_config(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(FujitaExperiment { config, report: None }));
                FujitaStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Replaces the random seed of the experiment.
///
/// # Safety
/// `handle` must come from `fujita_experiment_new`.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_set_seed(handle: *mut FujitaExperiment, seed: u64) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() {
            return fail(FujitaStatus::NullPointer, "handle is NULL");
        }
        let exp = &mut *handle;
        exp.config = exp.config.clone().with_seed(seed);
        FujitaStatus::Ok
    })
}

fn store_report(exp: &mut FujitaExperiment, report: &Report, passed: *mut bool) -> FujitaStatus {
    let text = match serde_json::to_string_pretty(report) {
        Ok(t) => t,
        Err(e) => return fail(FujitaStatus::Internal, format!("cannot serialize report: {e}")),
    };
    exp.report = Some(CString::new(text).expect("JSON has no NUL bytes"));
    if !passed.is_null() {
        // SAFETY: checked non-NULL; the caller guarantees it is writable.
        unsafe { *passed = report.passed };
    }
    match &report.error {
        Some(e) => fail(FujitaStatus::Partial, e.clone()),
        None => FujitaStatus::Ok,
    }
}

/// Runs the experiment without writing files. `passed` (may be NULL)
/// receives whether every assertion held. The report is then available from
/// `fujita_experiment_report`.
///
/// # Safety
/// `handle` must come from `fujita_experiment_new`; `passed` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_run(handle: *mut FujitaExperiment, passed: *mut bool) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() {
            return fail(FujitaStatus::NullPointer, "handle is NULL");
        }
        let exp = &mut *handle;
        exp.report = None;
        match execute_in_memory(&exp.config) {
            Ok((report, _)) => store_report(exp, &report, passed),
            Err(e) => from_core(e),
        }
    })
}

/// Like `fujita_experiment_run`, but writes `report.json` and the CSV
/// artifacts into directory `dir` (created if missing).
///
/// # Safety
/// As for `fujita_experiment_run`; `dir` must be a NUL-terminated UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_write(handle: *mut FujitaExperiment, dir: *const c_char, passed: *mut bool) -> FujitaStatus {
    guarded(|| {
        if handle.is_null() || dir.is_null() {
            return fail(FujitaStatus::NullPointer, "handle and dir must be non-NULL");
        }
        let Ok(dir) = CStr::from_ptr(dir).to_str() else {
            return fail(FujitaStatus::InvalidArgument, "dir is not valid UTF-8");
        };
        let exp = &mut *handle;
        exp.report = None;
        let config = exp.config.clone().with_output_dir(PathBuf::from(dir));
        match execute(&config) {
            Ok(report) => store_report(exp, &report, passed),
            Err(e) => from_core(e),
        }
    })
}

/// JSON report of the last run, or NULL if the experiment has not run.
/// Owned by the handle; valid until the next run or `fujita_experiment_free`.
///
/// # Safety
/// `handle` must be NULL or come from `fujita_experiment_new`.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_report(handle: *const FujitaExperiment) -> *const c_char {
    if handle.is_null() {
        return ptr::null();
    }
    (*handle).report.as_ref().map_or(ptr::null(), |s| s.as_ptr())
}

/// Releases an experiment handle. NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or come from `fujita_experiment_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fujita_experiment_free(handle: *mut FujitaExperiment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
