//! C ABI for the counterfactual engine.
//!
//! The surface is small: parse a model (or structural model)
//! from TOML text into an opaque handle, evaluate queries against it under
//! a chosen semantics, and check the Markov condition. Exact values cross
//! the boundary as `"a/b"` strings; the caller frees them with
//! [`cf_string_free`]. Every function returns a status code and leaves a
//! human-readable message for [`cf_last_error`] on failure.
//!
//! The header is generated into `include/counterfact.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use counterfact::error::{Caps, Error};
use counterfact::files::{parse_model_str, parse_scm_str};
use counterfact::model::check_markov;
use counterfact::query::{evaluate, parse_query, EvalResult, QueryTarget, SemanticsTag};

/// Opaque model handle. Holds either a causal model or a structural model.
pub struct CfModel {
    inner: Inner,
}

enum Inner {
    Model(counterfact::CausalModel),
    Scm(counterfact::Scm),
}

impl CfModel {
    fn target(&self) -> QueryTarget<'_> {
        match &self.inner {
            Inner::Model(m) => QueryTarget::Model(m),
            Inner::Scm(s) => QueryTarget::Scm(s),
        }
    }
}

/// Status codes. Parse-level problems map to `CfStatusParseError` and
/// semantic problems (zero-probability evidence, caps, unsupported
/// combinations) to `CfStatusSemanticError`, mirroring the command-line
/// exit codes 2 and 3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    CfStatusOk = 0,
    CfStatusParseError = 2,
    CfStatusSemanticError = 3,
    CfStatusNullPointer = 4,
    CfStatusInvalidUtf8 = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::Syntax { .. }
        | Error::UnknownVariable(_)
        | Error::OutOfRange { .. }
        | Error::InvalidSignature(_)
        | Error::InvalidDag(_)
        | Error::InvalidModel(_)
        | Error::InvalidProbability(_) => CfStatus::CfStatusParseError,
        _ => CfStatus::CfStatusSemanticError,
    }
}

fn fail(e: Error) -> CfStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, CfStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(CfStatus::CfStatusNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        CfStatus::CfStatusInvalidUtf8
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap().into_raw()
}

/// The message of the most recent failure on this thread. Borrowed; valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a causal-model TOML document into a handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer. The
/// returned handle must be freed with [`cf_model_free`].
#[no_mangle]
pub unsafe extern "C" fn cf_model_parse(text: *const c_char, out: *mut *mut CfModel) -> CfStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return CfStatus::CfStatusNullPointer;
    }
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_model_str(text) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(CfModel {
                inner: Inner::Model(model),
            }));
            CfStatus::CfStatusOk
        }
        Err(e) => fail(e),
    }
}

/// Parses a structural-model TOML document into a handle.
///
/// # Safety
/// As [`cf_model_parse`].
#[no_mangle]
pub unsafe extern "C" fn cf_scm_parse(text: *const c_char, out: *mut *mut CfModel) -> CfStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return CfStatus::CfStatusNullPointer;
    }
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_scm_str(text) {
        Ok(scm) => {
            *out = Box::into_raw(Box::new(CfModel {
                inner: Inner::Scm(scm),
            }));
            CfStatus::CfStatusOk
        }
        Err(e) => fail(e),
    }
}

/// Frees a handle returned by [`cf_model_parse`] or [`cf_scm_parse`].
///
/// # Safety
/// `model` must be a handle from this library, not yet freed. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn cf_model_free(model: *mut CfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Evaluates `query` under `semantics` (one of "B", "N", "GH", "IC",
/// "SCM", "BOUNDS"). On success `*out_lo` receives the exact value as an
/// `"a/b"` string; for interval results `*out_hi` receives the upper end,
/// otherwise it is set to null. Both strings are freed with
/// [`cf_string_free`].
///
/// # Safety
/// `model` must be a live handle; `query` and `semantics` NUL-terminated
/// strings; `out_lo` and `out_hi` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cf_eval(
    model: *const CfModel,
    query: *const c_char,
    semantics: *const c_char,
    out_lo: *mut *mut c_char,
    out_hi: *mut *mut c_char,
) -> CfStatus {
    if model.is_null() || out_lo.is_null() || out_hi.is_null() {
        set_error("null pointer argument");
        return CfStatus::CfStatusNullPointer;
    }
    let query = match utf8_arg(query) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let semantics = match utf8_arg(semantics) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let handle = &*model;
    let parsed = match parse_query(query) {
        Ok(q) => q,
        Err(e) => return fail(e),
    };
    let tag: SemanticsTag = match semantics.parse() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    match evaluate(handle.target(), &parsed, tag, &Caps::default()) {
        Ok(EvalResult::Point(p)) => {
            *out_lo = export_string(p.to_string());
            *out_hi = ptr::null_mut();
            CfStatus::CfStatusOk
        }
        Ok(EvalResult::Interval(lo, hi)) => {
            *out_lo = export_string(lo.to_string());
            *out_hi = export_string(hi.to_string());
            CfStatus::CfStatusOk
        }
        Err(e) => fail(e),
    }
}

/// Checks whether the model's joint distribution is Markov relative to its
/// graph; writes 1 or 0 into `*out_holds`.
///
/// # Safety
/// `model` must be a live handle and `out_holds` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_markov_holds(model: *const CfModel, out_holds: *mut u8) -> CfStatus {
    if model.is_null() || out_holds.is_null() {
        set_error("null pointer argument");
        return CfStatus::CfStatusNullPointer;
    }
    let handle = &*model;
    let result = (|| {
        let model = match &handle.inner {
            Inner::Model(m) => m.clone(),
            Inner::Scm(s) => s.induced_model()?,
        };
        let joint = model.joint()?;
        check_markov(model.signature(), model.dag(), &joint)
    })();
    match result {
        Ok(report) => {
            *out_holds = u8::from(report.holds);
            CfStatus::CfStatusOk
        }
        Err(e) => fail(e),
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must originate from this library and not have been freed. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = r#"
        edges = [["U_X", "X"], ["X", "Y"]]

        [exogenous]
        U_X = ["0", "1"]

        [endogenous]
        X = ["0", "1"]
        Y = ["0", "1"]

        [priors.U_X]
        "0" = "1/2"
        "1" = "1/2"

        [cpds.X."U_X=0"]
        "0" = "1"

        [cpds.X."U_X=1"]
        "1" = "1"

        [cpds.Y."X=1"]
        "0" = "2/3"
        "1" = "1/3"

        [cpds.Y."X=0"]
        "0" = "1/3"
        "1" = "2/3"
    "#;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn parse(text: &str) -> *mut CfModel {
        let text = cstring(text);
        let mut handle: *mut CfModel = ptr::null_mut();
        assert_eq!(
            cf_model_parse(text.as_ptr(), &mut handle),
            CfStatus::CfStatusOk
        );
        assert!(!handle.is_null());
        handle
    }

    unsafe fn take(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let out = CStr::from_ptr(s).to_str().unwrap().to_string();
        cf_string_free(s);
        out
    }

    #[test]
    fn eval_round_trips_exact_strings() {
        unsafe {
            let handle = parse(MODEL);
            let query = cstring("P((Y=0)[X=0] | X=1, Y=1)");
            let mut lo: *mut c_char = ptr::null_mut();
            let mut hi: *mut c_char = ptr::null_mut();

            let n = cstring("N");
            assert_eq!(
                cf_eval(handle, query.as_ptr(), n.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusOk
            );
            assert_eq!(take(lo), "1/3");
            assert!(hi.is_null());

            let bounds = cstring("BOUNDS");
            assert_eq!(
                cf_eval(handle, query.as_ptr(), bounds.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusOk
            );
            assert_eq!(take(lo), "0");
            assert_eq!(take(hi), "1");

            cf_model_free(handle);
        }
    }

    #[test]
    fn errors_set_codes_and_messages() {
        unsafe {
            let handle = parse(MODEL);
            let bad_query = cstring("P((Y=0)[X=0");
            let n = cstring("N");
            let mut lo: *mut c_char = ptr::null_mut();
            let mut hi: *mut c_char = ptr::null_mut();
            assert_eq!(
                cf_eval(handle, bad_query.as_ptr(), n.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusParseError
            );
            let message = CStr::from_ptr(cf_last_error()).to_str().unwrap();
            assert!(message.contains("syntax error"), "{}", message);

            // Zero-probability evidence is a semantic error.
            let impossible = cstring("P((Y=0)[X=0] | U_X=1, X=0)");
            assert_eq!(
                cf_eval(handle, impossible.as_ptr(), n.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusSemanticError
            );
            cf_model_free(handle);

            let mut out: *mut CfModel = ptr::null_mut();
            let garbage = cstring("not toml at all = [");
            assert_eq!(
                cf_model_parse(garbage.as_ptr(), &mut out),
                CfStatus::CfStatusParseError
            );
        }
    }

    #[test]
    fn markov_check_through_the_abi() {
        unsafe {
            let handle = parse(MODEL);
            let mut holds = 2u8;
            assert_eq!(cf_markov_holds(handle, &mut holds), CfStatus::CfStatusOk);
            assert_eq!(holds, 1);
            cf_model_free(handle);
        }
    }

    #[test]
    fn scm_handles_evaluate_directly() {
        unsafe {
            let text = cstring(
                r#"
                edges = [["U", "Y"]]

                [exogenous]
                U = ["0", "1"]

                [endogenous]
                Y = ["0", "1"]

                [priors.U]
                "0" = "1/4"
                "1" = "3/4"

                [equations.Y]
                "U=0" = "1"
                "U=1" = "0"
            "#,
            );
            let mut handle: *mut CfModel = ptr::null_mut();
            assert_eq!(
                cf_scm_parse(text.as_ptr(), &mut handle),
                CfStatus::CfStatusOk
            );
            let query = cstring("P(Y=1)");
            let scm = cstring("SCM");
            let mut lo: *mut c_char = ptr::null_mut();
            let mut hi: *mut c_char = ptr::null_mut();
            assert_eq!(
                cf_eval(handle, query.as_ptr(), scm.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusOk
            );
            assert_eq!(take(lo), "1/4");
            cf_model_free(handle);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut lo: *mut c_char = ptr::null_mut();
            let mut hi: *mut c_char = ptr::null_mut();
            let q = cstring("P(Y=1)");
            let n = cstring("N");
            assert_eq!(
                cf_eval(ptr::null(), q.as_ptr(), n.as_ptr(), &mut lo, &mut hi),
                CfStatus::CfStatusNullPointer
            );
            assert_eq!(
                cf_model_parse(ptr::null(), ptr::null_mut()),
                CfStatus::CfStatusNullPointer
            );
            cf_string_free(ptr::null_mut());
            cf_model_free(ptr::null_mut());
        }
    }
}
