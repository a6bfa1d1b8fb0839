//! C ABI over the `inckap` core: opaque instance handles, integer status
//! codes, and JSON strings for structured results. Every string returned
//! through an out-pointer must be released with `inckap_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::ptr;

use inckap::algscale::{build_ordering, compute_constants, phase_schedule};
use inckap::evaluator::{best_ordering, competitive_ratio};
use inckap::objective::Instance;
use inckap::Error;

/// Status codes returned by every fallible function.
pub const INCKAP_OK: c_int = 0;
pub const INCKAP_ERR_INVALID: c_int = 2;
pub const INCKAP_ERR_CAPABILITY: c_int = 3;
pub const INCKAP_ERR_INFEASIBLE: c_int = 4;

/// Opaque handle to a loaded instance.
pub struct InckapInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn code_of(err: &Error) -> c_int {
    match err {
        Error::CapabilityLimit(_) => INCKAP_ERR_CAPABILITY,
        Error::Infeasible(_) => INCKAP_ERR_INFEASIBLE,
        _ => INCKAP_ERR_INVALID,
    }
}

fn fail(err: Error) -> c_int {
    set_error(&err.to_string());
    code_of(&err)
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(INCKAP_ERR_INVALID);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        INCKAP_ERR_INVALID
    })
}

fn out_string(text: String, out: *mut *mut c_char) -> c_int {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            INCKAP_OK
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            INCKAP_ERR_INVALID
        }
    }
}

/// Message of the most recent error on this thread. Valid until the next
/// failing call; never free it.
#[no_mangle]
pub extern "C" fn inckap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string produced by this library.
#[no_mangle]
pub unsafe extern "C" fn inckap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from its JSON encoding into `*out`.
#[no_mangle]
pub unsafe extern "C" fn inckap_instance_from_json(
    json: *const c_char,
    out: *mut *mut InckapInstance,
) -> c_int {
    if out.is_null() {
        set_error("null output pointer");
        return INCKAP_ERR_INVALID;
    }
    *out = ptr::null_mut();
    let text = match read_str(json) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match Instance::from_json(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(InckapInstance { inner }));
            INCKAP_OK
        }
        Err(e) => fail(e),
    }
}

/// Releases an instance handle.
#[no_mangle]
pub unsafe extern "C" fn inckap_instance_free(inst: *mut InckapInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of ground-set elements.
#[no_mangle]
pub unsafe extern "C" fn inckap_instance_len(inst: *const InckapInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    (*inst).inner.len()
}

/// Objective value of the subset given by element indices.
#[no_mangle]
pub unsafe extern "C" fn inckap_evaluate(
    inst: *const InckapInstance,
    indices: *const usize,
    len: usize,
    out_value: *mut c_double,
) -> c_int {
    if inst.is_null() || out_value.is_null() || (indices.is_null() && len > 0) {
        set_error("null pointer argument");
        return INCKAP_ERR_INVALID;
    }
    let set = std::slice::from_raw_parts(indices, len);
    match (*inst).inner.evaluate(set) {
        Ok(v) => {
            *out_value = v;
            INCKAP_OK
        }
        Err(e) => fail(e),
    }
}

/// Structural validation; writes the singleton-value bound M and whether
/// every check passed.
#[no_mangle]
pub unsafe extern "C" fn inckap_validate(
    inst: *const InckapInstance,
    out_m_bound: *mut c_double,
    out_ok: *mut bool,
) -> c_int {
    if inst.is_null() || out_m_bound.is_null() || out_ok.is_null() {
        set_error("null pointer argument");
        return INCKAP_ERR_INVALID;
    }
    let report = (*inst).inner.validate();
    *out_m_bound = report.m_bound;
    *out_ok = report.ok;
    INCKAP_OK
}

/// Runs the scaling algorithm; `*out_json` receives
/// `{"order", "phases", "ratio", "rho"}` with element names.
#[no_mangle]
pub unsafe extern "C" fn inckap_solve_json(
    inst: *const InckapInstance,
    out_json: *mut *mut c_char,
) -> c_int {
    if inst.is_null() || out_json.is_null() {
        set_error("null pointer argument");
        return INCKAP_ERR_INVALID;
    }
    let inner = &(*inst).inner;
    let result = (|| -> Result<String, Error> {
        let schedule = phase_schedule(inner)?;
        let ordering = build_ordering(inner)?;
        let curve = competitive_ratio(inner, &ordering.order)?;
        let value = serde_json::json!({
            "order": ordering.order.iter().map(|&e| inner.element_name(e)).collect::<Vec<_>>(),
            "phases": schedule.phases.iter().map(|p| serde_json::json!({
                "capacity": p.capacity,
                "target": p.target.iter().map(|&e| inner.element_name(e)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "ratio": curve.overall,
            "rho": schedule.rho,
        });
        Ok(serde_json::to_string(&value)?)
    })();
    match result {
        Ok(text) => out_string(text, out_json),
        Err(e) => fail(e),
    }
}

/// Exhaustive search for the best ordering; `*out_json` receives
/// `{"order", "ratio"}`. Fails with the capability code on large instances.
#[no_mangle]
pub unsafe extern "C" fn inckap_best_ordering_json(
    inst: *const InckapInstance,
    out_json: *mut *mut c_char,
) -> c_int {
    if inst.is_null() || out_json.is_null() {
        set_error("null pointer argument");
        return INCKAP_ERR_INVALID;
    }
    let inner = &(*inst).inner;
    match best_ordering(inner) {
        Ok((order, ratio)) => {
            let value = serde_json::json!({
                "order": order.iter().map(|&e| inner.element_name(e)).collect::<Vec<_>>(),
                "ratio": ratio,
            });
            out_string(value.to_string(), out_json)
        }
        Err(e) => fail(e),
    }
}

/// Writes the scaling constants lambda and delta.
#[no_mangle]
pub unsafe extern "C" fn inckap_constants(out_lambda: *mut c_double, out_delta: *mut c_double) {
    let c = compute_constants();
    if !out_lambda.is_null() {
        *out_lambda = c.lambda;
    }
    if !out_delta.is_null() {
        *out_delta = c.delta;
    }
}

/// Guaranteed competitive-ratio bound for singleton values in [1, M].
#[no_mangle]
pub extern "C" fn inckap_rho(m_bound: c_double) -> c_double {
    if !(m_bound >= 1.0) {
        return f64::NAN;
    }
    compute_constants().rho(m_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn handle(json: &str) -> *mut InckapInstance {
        let c = CString::new(json).unwrap();
        let mut out = ptr::null_mut();
        let code = unsafe { inckap_instance_from_json(c.as_ptr(), &mut out) };
        assert_eq!(code, INCKAP_OK);
        out
    }

    fn sqrt6_handle() -> *mut InckapInstance {
        handle(&inckap::instances::gen_sqrt6().to_json().unwrap())
    }

    #[test]
    fn round_trip_evaluate_and_validate() {
        let h = sqrt6_handle();
        unsafe {
            assert_eq!(inckap_instance_len(h), 10);
            let mut value = 0.0;
            let set = [4usize, 5, 6];
            assert_eq!(inckap_evaluate(h, set.as_ptr(), 3, &mut value), INCKAP_OK);
            assert!((value - 3.0).abs() <= 1e-9);
            let (mut m, mut ok) = (0.0, false);
            assert_eq!(inckap_validate(h, &mut m, &mut ok), INCKAP_OK);
            assert!(ok && (m - 1.0).abs() <= 1e-9);
            inckap_instance_free(h);
        }
    }

    #[test]
    fn solve_and_best_ordering_emit_json() {
        let h = sqrt6_handle();
        unsafe {
            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(inckap_solve_json(h, &mut s), INCKAP_OK);
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
            assert_eq!(parsed["order"].as_array().unwrap().len(), 10);
            assert!((parsed["ratio"].as_f64().unwrap() - 6.0f64.sqrt()).abs() <= 1e-9);
            inckap_string_free(s);

            let mut s2: *mut c_char = ptr::null_mut();
            assert_eq!(inckap_best_ordering_json(h, &mut s2), INCKAP_OK);
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(s2).to_str().unwrap()).unwrap();
            assert!(parsed["ratio"].as_f64().unwrap() >= 2.449);
            inckap_string_free(s2);
            inckap_instance_free(h);
        }
    }

    #[test]
    fn error_paths_set_codes_and_message() {
        unsafe {
            let bad = CString::new("{\"elements\": []}").unwrap();
            let mut out = ptr::null_mut();
            assert_eq!(
                inckap_instance_from_json(bad.as_ptr(), &mut out),
                INCKAP_ERR_INVALID
            );
            assert!(out.is_null());
            let msg = CStr::from_ptr(inckap_last_error()).to_str().unwrap();
            assert!(!msg.is_empty());

            let h = sqrt6_handle();
            let mut value = 0.0;
            let set = [99usize];
            assert_eq!(
                inckap_evaluate(h, set.as_ptr(), 1, &mut value),
                INCKAP_ERR_INVALID
            );
            inckap_instance_free(h);
        }
    }

    #[test]
    fn constants_and_rho() {
        unsafe {
            let (mut l, mut d) = (0.0, 0.0);
            inckap_constants(&mut l, &mut d);
            assert!(l > 3.2923 && l < 3.2925);
            assert!(d > 3.0142 && d < 3.0144);
        }
        assert!((inckap_rho(1.0) - 3.2923963718145837).abs() <= 1e-9);
        assert!((inckap_rho(4.0) - 8.0).abs() <= 1e-9);
        assert!(inckap_rho(0.5).is_nan());
    }
}
