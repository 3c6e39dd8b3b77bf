//! C interface to funcnet.
//!
//! Models are opaque handles created by [`fnet_model_parse`] and released
//! with [`fnet_model_free`]. Functions return an [`FnetStatus`]; results are
//! handed out as NUL-terminated UTF-8 strings that the caller releases with
//! [`fnet_string_free`]. The message of the last failing call on the
//! current thread is available from [`fnet_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use funcnet::dsl::{parse_model_named, render_model, Model};
use funcnet::pipeline::{check_model, run, RunError, RunInput};
use funcnet::report;
use funcnet::sim::{load_trace, Outcome};

/// Status codes. The first five match the exit codes of the `funcnet`
/// command line.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnetStatus {
    Ok = 0,
    /// The model has findings, or the scenario run failed.
    Findings = 1,
    ParseError = 2,
    UsageError = 3,
    Inconclusive = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    /// An internal error; the handle passed in must not be used again.
    Panic = 7,
}

/// A parsed and resolved model.
pub struct FnetModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: FnetStatus, message: impl Into<String>) -> FnetStatus {
    set_error(message);
    status
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, FnetStatus> {
    if p.is_null() {
        return Err(fail(FnetStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FnetStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn hand_out(s: String, out: *mut *mut c_char) -> FnetStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            FnetStatus::Ok
        }
        Err(_) => fail(FnetStatus::Panic, "result contains a NUL byte"),
    }
}

fn guard(f: impl FnOnce() -> FnetStatus) -> FnetStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(FnetStatus::Panic, "internal error"))
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

/// Parses `text` into a model. `file_name` may be null; it is used in
/// error locations. On success `*out` holds a handle to free with
/// [`fnet_model_free`].
///
/// # Safety
/// `text` and a non-null `file_name` must be NUL-terminated strings; `out`
/// must point to writable storage for a pointer.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_parse(
    text: *const c_char,
    file_name: *const c_char,
    out: *mut *mut FnetModel,
) -> FnetStatus {
    guard(|| {
        if out.is_null() {
            return fail(FnetStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let source = match self::text(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let name = if file_name.is_null() {
            ""
        } else {
            match self::text(file_name, "file_name") {
                Ok(s) => s,
                Err(status) => return status,
            }
        };
        match parse_model_named(source, name) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(FnetModel { model }));
                FnetStatus::Ok
            }
            Err(errors) => fail(FnetStatus::ParseError, report::parse_errors_text(&errors)),
        }
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from [`fnet_model_parse`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_free(model: *mut FnetModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of top-level elements of the model, 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_element_count(model: *const FnetModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.elements().count())
}

/// Checks every artifact of the model and writes the JSON report to
/// `*report_json`. Returns `Ok` when everything is consistent and
/// `Findings` otherwise; the report is written in both cases.
///
/// # Safety
/// `model` must be a live handle and `report_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_check(
    model: *const FnetModel,
    report_json: *mut *mut c_char,
) -> FnetStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), report_json.is_null()) else {
            return fail(FnetStatus::NullArgument, "model or report_json is null");
        };
        *report_json = ptr::null_mut();
        let outcome = check_model(&m.model);
        let status = hand_out(json(&report::check_json(&outcome)), report_json);
        match (status, outcome.is_consistent()) {
            (FnetStatus::Ok, false) => FnetStatus::Findings,
            (s, _) => s,
        }
    })
}

/// Writes the canonical text of the model to `*text_out`.
///
/// # Safety
/// `model` must be a live handle and `text_out` writable.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_render(
    model: *const FnetModel,
    text_out: *mut *mut c_char,
) -> FnetStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), text_out.is_null()) else {
            return fail(FnetStatus::NullArgument, "model or text_out is null");
        };
        *text_out = ptr::null_mut();
        hand_out(render_model(&m.model), text_out)
    })
}

unsafe fn run_with(
    model: *const FnetModel,
    scenario: *const c_char,
    events: *const c_char,
    horizon: Option<u64>,
    verdict_json: *mut *mut c_char,
) -> FnetStatus {
    let (Some(m), false) = (model.as_ref(), verdict_json.is_null()) else {
        return fail(FnetStatus::NullArgument, "model or verdict_json is null");
    };
    *verdict_json = ptr::null_mut();
    let name = match text(scenario, "scenario") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let events = match text(events, "events") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let trace = match load_trace(events) {
        Ok(t) => t,
        Err(e) => return fail(FnetStatus::ParseError, format!("line {}: {}", e.line, e.message)),
    };
    let input = match horizon {
        None => RunInput::Trace(trace),
        Some(0) => return fail(FnetStatus::UsageError, "horizon must be at least 1"),
        Some(h) => RunInput::Stimuli { stimuli: trace, horizon: h },
    };
    let outcome = match run(&m.model, name, input) {
        Ok(o) => o,
        Err(e @ RunError::Inconsistent { .. }) => return fail(FnetStatus::Findings, e.to_string()),
        Err(e) => return fail(FnetStatus::UsageError, e.to_string()),
    };
    match hand_out(json(&report::run_json(&outcome)), verdict_json) {
        FnetStatus::Ok => match outcome.verdict.outcome {
            Outcome::Pass => FnetStatus::Ok,
            Outcome::Fail => FnetStatus::Findings,
            Outcome::Inconclusive => FnetStatus::Inconclusive,
        },
        s => s,
    }
}

/// Replays a recorded trace (trace file syntax) against a scenario and
/// writes the JSON verdict. Returns `Ok` on PASS, `Findings` on FAIL and
/// `Inconclusive` when the trigger never matched.
///
/// # Safety
/// `model` must be a live handle, `scenario` and `trace` NUL-terminated strings,
/// `verdict_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fnet_model_run_trace(
    model: *const FnetModel,
    scenario: *const c_char,
    trace: *const c_char,
    verdict_json: *mut *mut c_char,
) -> FnetStatus {
    guard(|| run_with(model, scenario, trace, None, verdict_json))
}

/// Simulates the scenario's net with its stubs for `horizon` steps under
/// `stimuli` and judges the resulting trace, as [`fnet_model_run_trace`].
///
/// # Safety
/// As for [`fnet_model_run_trace`].
#[no_mangle]
pub unsafe extern "C" fn fnet_model_run_stimuli(
    model: *const FnetModel,
    scenario: *const c_char,
    stimuli: *const c_char,
    horizon: u64,
    verdict_json: *mut *mut c_char,
) -> FnetStatus {
    guard(|| run_with(model, scenario, stimuli, Some(horizon), verdict_json))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn fnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fnet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
