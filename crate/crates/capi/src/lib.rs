//! C ABI for the centralizer-lab library.
//!
//! Conventions:
//! * Matrices and subshifts are opaque handles created from JSON and
//!   released with the matching `_free` function.
//! * Every fallible call returns a `clab_status` code; results are
//!   returned as newly allocated JSON strings that the caller must
//!   release with `clab_string_free`.
//! * Tolerances are decimal or rational strings such as `"1e-9"` or
//!   `"1/1000000000"`.
//! * `clab_last_error` returns a description of the most recent
//!   failure on the calling thread.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Value};

use centralizer_lab::commutant::{
    certify_independence, commutant_basis, enumerate_units, find_power_relations,
    RelationCertificate,
};
use centralizer_lab::config::parse_positive_tol;
use centralizer_lab::interval::{rational_string, RatInterval};
use centralizer_lab::sft::{build_sft, parry_measure, sft_entropy, Sft};
use centralizer_lab::spectral::{entropy_interval, spectrum_report, RootKind};
use centralizer_lab::torus::count_periodic;
use centralizer_lab::IntMatrix;

/// Status codes returned by every fallible `clab_*` call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum clab_status {
    /// Success.
    CLAB_OK = 0,
    /// A required pointer argument was null.
    CLAB_ERR_NULL = 1,
    /// A string argument was not valid UTF-8.
    CLAB_ERR_UTF8 = 2,
    /// JSON or numeric input could not be parsed.
    CLAB_ERR_PARSE = 3,
    /// The computation reported a mathematical error
    /// (non-hyperbolic, singular, empty subshift, ...).
    CLAB_ERR_MATH = 4,
    /// An internal invariant failed.
    CLAB_ERR_PANIC = 5,
}

use clab_status::*;

/// Opaque handle to an exact integer matrix.
pub struct clab_matrix {
    inner: IntMatrix,
}

/// Opaque handle to a subshift of finite type.
pub struct clab_sft {
    inner: Sft,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn fail(code: clab_status, msg: &str) -> clab_status {
    set_error(msg);
    code
}

/// # Safety
/// `s` must be a valid NUL-terminated string pointer.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, clab_status> {
    if s.is_null() {
        set_error("null string argument");
        return Err(CLAB_ERR_NULL);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        CLAB_ERR_UTF8
    })
}

fn write_json(out: *mut *mut c_char, value: &Value) -> clab_status {
    if out.is_null() {
        return fail(CLAB_ERR_NULL, "null output pointer");
    }
    let rendered = serde_json::to_string(value).expect("serializable report");
    let c = CString::new(rendered).expect("JSON has no interior NUL");
    unsafe { *out = c.into_raw() };
    CLAB_OK
}

fn guarded<F: FnOnce() -> clab_status>(f: F) -> clab_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(CLAB_ERR_PANIC, "internal panic"),
    }
}

fn iv_json(iv: &RatInterval) -> Value {
    json!({
        "lo": rational_string(&iv.lo),
        "hi": rational_string(&iv.hi),
        "decimal": iv.decimal(12),
    })
}

/// Description of the most recent error on this thread. The pointer
/// stays valid until the next failing `clab_*` call on the thread.
#[no_mangle]
pub extern "C" fn clab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from a `clab_*` call and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn clab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a square integer matrix from JSON
/// (`{"n": 2, "entries": [[2,1],[1,1]]}`; entries beyond 2^53 as strings).
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_parse(
    json: *const c_char,
    out: *mut *mut clab_matrix,
) -> clab_status {
    guarded(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(c) => return c,
        };
        if out.is_null() {
            return fail(CLAB_ERR_NULL, "null output pointer");
        }
        match serde_json::from_str::<IntMatrix>(text) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(clab_matrix { inner: m }));
                CLAB_OK
            }
            Err(e) => fail(CLAB_ERR_PARSE, &format!("invalid matrix JSON: {}", e)),
        }
    })
}

/// Release a matrix handle.
///
/// # Safety
/// `m` must come from `clab_matrix_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_free(m: *mut clab_matrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, clab_status> {
    if p.is_null() {
        set_error("null handle");
        return Err(CLAB_ERR_NULL);
    }
    Ok(&*p)
}

/// Determinant as a JSON string `{"det": "..."}` (exact decimal digits).
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_det(
    m: *const clab_matrix,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        write_json(out, &json!({"det": m.inner.det().to_string()}))
    })
}

/// Characteristic polynomial coefficients (constant term first) as
/// `{"charpoly": ["...", ...]}` with exact decimal digit strings.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_charpoly(
    m: *const clab_matrix,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        let coeffs: Vec<String> = m
            .inner
            .charpoly()
            .coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect();
        write_json(out, &json!({ "charpoly": coeffs }))
    })
}

/// Certified eigenvalue enclosures, hyperbolicity flag, and entropy
/// interval at the given tolerance.
///
/// # Safety
/// `m` must be a live matrix handle; `tol` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_spectrum(
    m: *const clab_matrix,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        let tol = match read_str(tol).map(|s| parse_positive_tol(s)) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => return fail(CLAB_ERR_PARSE, &e),
            Err(c) => return c,
        };
        let report = match spectrum_report(&m.inner, &tol) {
            Ok(r) => r,
            Err(e) => return fail(CLAB_ERR_MATH, &e.to_string()),
        };
        let enclosures: Vec<Value> = report
            .enclosures
            .iter()
            .map(|e| {
                json!({
                    "kind": match e.kind {
                        RootKind::Real => "real",
                        RootKind::ComplexPair => "complex-pair",
                    },
                    "interval": iv_json(&e.interval),
                    "multiplicity": e.multiplicity,
                    "modulus": iv_json(&e.modulus()),
                })
            })
            .collect();
        write_json(
            out,
            &json!({
                "enclosures": enclosures,
                "hyperbolic": report.hyperbolic,
                "stable_dim": report.stable_dim,
                "unstable_dim": report.unstable_dim,
                "entropy": iv_json(&report.entropy),
            }),
        )
    })
}

/// Certified topological entropy interval `{"entropy": {...}}`.
///
/// # Safety
/// `m` must be a live matrix handle; `tol` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_entropy(
    m: *const clab_matrix,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        let tol = match read_str(tol).map(|s| parse_positive_tol(s)) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => return fail(CLAB_ERR_PARSE, &e),
            Err(c) => return c,
        };
        match entropy_interval(&m.inner, &tol) {
            Ok(e) => write_json(out, &json!({"entropy": iv_json(&e)})),
            Err(e) => fail(CLAB_ERR_MATH, &e.to_string()),
        }
    })
}

/// Commutant lattice basis, optionally with the units in the given
/// coordinate box (`box_bound = 0` skips unit enumeration).
///
/// # Safety
/// `m` must be a live matrix handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_matrix_commutant(
    m: *const clab_matrix,
    box_bound: u32,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        let lattice = commutant_basis(&m.inner);
        let basis: Vec<Value> = lattice
            .basis()
            .iter()
            .map(|b| serde_json::to_value(b).expect("matrix serializable"))
            .collect();
        let mut report = json!({"rank": lattice.rank(), "basis": basis});
        if box_bound > 0 {
            let units: Vec<Value> = enumerate_units(&lattice, box_bound)
                .iter()
                .map(|u| {
                    json!({
                        "coords": u.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "matrix": serde_json::to_value(&u.matrix).expect("serializable"),
                    })
                })
                .collect();
            report["units"] = Value::Array(units);
        }
        write_json(out, &report)
    })
}

fn certificate_json(cert: &RelationCertificate) -> Value {
    match cert {
        RelationCertificate::FoundRelation { exponents } => {
            json!({"kind": "found-relation", "exponents": exponents})
        }
        RelationCertificate::Independence { ratios } => json!({
            "kind": "independence-certificate",
            "ratio_enclosures": ratios.iter().map(iv_json).collect::<Vec<_>>(),
        }),
        RelationCertificate::Inconclusive { ratios } => json!({
            "kind": "inconclusive",
            "ratio_enclosures": ratios
                .as_ref()
                .map(|rs| rs.iter().map(iv_json).collect::<Vec<_>>()),
        }),
    }
}

/// Search power relations `A^n = B^m` up to `max_exp` and, when
/// `certify` is nonzero, attempt an independence certificate at the
/// given tolerance.
///
/// # Safety
/// `a` and `b` must be live matrix handles; `tol` NUL-terminated;
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_relations(
    a: *const clab_matrix,
    b: *const clab_matrix,
    max_exp: u32,
    certify: i32,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let (a, b) = match (deref(a), deref(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(c), _) | (_, Err(c)) => return c,
        };
        let tol = match read_str(tol).map(|s| parse_positive_tol(s)) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => return fail(CLAB_ERR_PARSE, &e),
            Err(c) => return c,
        };
        let power = match find_power_relations(&a.inner, &b.inner, max_exp) {
            Ok(p) => p,
            Err(e) => return fail(CLAB_ERR_MATH, &e.to_string()),
        };
        let mut report = json!({"power_relation": certificate_json(&power)});
        if certify != 0 {
            match certify_independence(&a.inner, &b.inner, &tol) {
                Ok(cert) => report["independence"] = certificate_json(&cert),
                Err(e) => return fail(CLAB_ERR_MATH, &e.to_string()),
            }
        }
        write_json(out, &report)
    })
}

/// Number of fixed points of the n-th iterate, `{"fixed_points": "..."}`
/// as exact decimal digits.
///
/// # Safety
/// `m` must be a live matrix handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_periodic_count(
    m: *const clab_matrix,
    n: u64,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let m = match deref(m) {
            Ok(m) => m,
            Err(c) => return c,
        };
        if n == 0 {
            return fail(CLAB_ERR_PARSE, "iterate must be >= 1");
        }
        match count_periodic(&m.inner, n) {
            Ok(c) => write_json(out, &json!({"iterate": n, "fixed_points": c.to_string()})),
            Err(e) => fail(CLAB_ERR_MATH, &e.to_string()),
        }
    })
}

/// Build a subshift of finite type from a 0/1 transition matrix given
/// as JSON rows, e.g. `[[1,1],[1,0]]`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn clab_sft_parse(
    json: *const c_char,
    out: *mut *mut clab_sft,
) -> clab_status {
    guarded(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(c) => return c,
        };
        if out.is_null() {
            return fail(CLAB_ERR_NULL, "null output pointer");
        }
        let rows: Vec<Vec<u8>> = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return fail(CLAB_ERR_PARSE, &format!("invalid transition JSON: {}", e)),
        };
        match build_sft(&rows) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(clab_sft { inner: s }));
                CLAB_OK
            }
            Err(e) => fail(CLAB_ERR_MATH, &e.to_string()),
        }
    })
}

/// Release a subshift handle.
///
/// # Safety
/// `s` must come from `clab_sft_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn clab_sft_free(s: *mut clab_sft) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Certified entropy interval of the subshift.
///
/// # Safety
/// `s` must be a live subshift handle; `tol` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_sft_entropy(
    s: *const clab_sft,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let s = match deref(s) {
            Ok(s) => s,
            Err(c) => return c,
        };
        let tol = match read_str(tol).map(|t| parse_positive_tol(t)) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => return fail(CLAB_ERR_PARSE, &e),
            Err(c) => return c,
        };
        match sft_entropy(&s.inner, &tol) {
            Ok(e) => write_json(out, &json!({"entropy": iv_json(&e)})),
            Err(e) => fail(CLAB_ERR_MATH, &e.to_string()),
        }
    })
}

/// Parry (maximal entropy) Markov measure: stationary vector,
/// transition matrix, and entropy, all as certified intervals.
///
/// # Safety
/// `s` must be a live subshift handle; `tol` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn clab_sft_parry(
    s: *const clab_sft,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> clab_status {
    guarded(|| {
        let s = match deref(s) {
            Ok(s) => s,
            Err(c) => return c,
        };
        let tol = match read_str(tol).map(|t| parse_positive_tol(t)) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => return fail(CLAB_ERR_PARSE, &e),
            Err(c) => return c,
        };
        let m = match parry_measure(&s.inner, &tol) {
            Ok(m) => m,
            Err(e) => return fail(CLAB_ERR_MATH, &e.to_string()),
        };
        write_json(
            out,
            &json!({
                "pi": m.pi().iter().map(iv_json).collect::<Vec<_>>(),
                "P": m
                    .transitions()
                    .iter()
                    .map(|row| row.iter().map(iv_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "exact": m.is_exact(),
                "entropy": iv_json(&m.entropy),
            }),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        clab_string_free(p);
        s
    }

    #[test]
    fn matrix_roundtrip_and_det() {
        unsafe {
            let json = cstr(r#"{"n":2,"entries":[[2,1],[1,1]]}"#);
            let mut m: *mut clab_matrix = ptr::null_mut();
            assert!(clab_matrix_parse(json.as_ptr(), &mut m) == CLAB_OK);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(clab_matrix_det(m, &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["det"], "1");
            assert!(clab_matrix_charpoly(m, &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["charpoly"], json!(["1", "-3", "1"]));
            clab_matrix_free(m);
        }
    }

    #[test]
    fn spectrum_and_entropy() {
        unsafe {
            let json = cstr(r#"{"n":2,"entries":[[2,1],[1,1]]}"#);
            let tol = cstr("1e-9");
            let mut m: *mut clab_matrix = ptr::null_mut();
            assert!(clab_matrix_parse(json.as_ptr(), &mut m) == CLAB_OK);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(clab_matrix_spectrum(m, tol.as_ptr(), &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["hyperbolic"], json!(true));
            assert_eq!(report["enclosures"].as_array().unwrap().len(), 2);
            assert!(clab_matrix_entropy(m, tol.as_ptr(), &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            let dec = report["entropy"]["decimal"].as_str().unwrap();
            // log((3+sqrt 5)/2) = 0.9624236501...
            assert!(dec.starts_with("0.96242365"));
            clab_matrix_free(m);
        }
    }

    #[test]
    fn commutant_and_relations() {
        unsafe {
            let cat = cstr(r#"{"n":2,"entries":[[2,1],[1,1]]}"#);
            let fib = cstr(r#"{"n":2,"entries":[[1,1],[1,0]]}"#);
            let tol = cstr("1e-6");
            let mut a: *mut clab_matrix = ptr::null_mut();
            let mut b: *mut clab_matrix = ptr::null_mut();
            assert!(clab_matrix_parse(cat.as_ptr(), &mut a) == CLAB_OK);
            assert!(clab_matrix_parse(fib.as_ptr(), &mut b) == CLAB_OK);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(clab_matrix_commutant(a, 2, &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["rank"], json!(2));
            assert!(!report["units"].as_array().unwrap().is_empty());
            assert!(clab_relations(a, b, 3, 0, tol.as_ptr(), &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["power_relation"]["kind"], "found-relation");
            assert_eq!(report["power_relation"]["exponents"], json!([1, 2]));
            clab_matrix_free(a);
            clab_matrix_free(b);
        }
    }

    #[test]
    fn periodic_count_and_errors() {
        unsafe {
            let cat = cstr(r#"{"n":2,"entries":[[2,1],[1,1]]}"#);
            let mut m: *mut clab_matrix = ptr::null_mut();
            assert!(clab_matrix_parse(cat.as_ptr(), &mut m) == CLAB_OK);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(clab_periodic_count(m, 3, &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert_eq!(report["fixed_points"], "16");
            assert!(clab_periodic_count(m, 0, &mut out) == CLAB_ERR_PARSE);
            clab_matrix_free(m);

            // non-hyperbolic input surfaces as a math error with a message
            let rot = cstr(r#"{"n":2,"entries":[[0,1],[-1,0]]}"#);
            let mut r: *mut clab_matrix = ptr::null_mut();
            assert!(clab_matrix_parse(rot.as_ptr(), &mut r) == CLAB_OK);
            assert!(clab_periodic_count(r, 1, &mut out) == CLAB_ERR_MATH);
            let msg = CStr::from_ptr(clab_last_error()).to_str().unwrap();
            assert!(!msg.is_empty());
            clab_matrix_free(r);

            let bad = cstr("not json");
            assert!(clab_matrix_parse(bad.as_ptr(), &mut m) == CLAB_ERR_PARSE);
            assert!(clab_matrix_parse(ptr::null(), &mut m) == CLAB_ERR_NULL);
        }
    }

    #[test]
    fn sft_handles() {
        unsafe {
            let golden = cstr("[[1,1],[1,0]]");
            let tol = cstr("1e-9");
            let mut s: *mut clab_sft = ptr::null_mut();
            assert!(clab_sft_parse(golden.as_ptr(), &mut s) == CLAB_OK);
            let mut out: *mut c_char = ptr::null_mut();
            assert!(clab_sft_entropy(s, tol.as_ptr(), &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            // log golden ratio = 0.4812118250...
            assert!(report["entropy"]["decimal"]
                .as_str()
                .unwrap()
                .starts_with("0.48121182"));
            assert!(clab_sft_parry(s, tol.as_ptr(), &mut out) == CLAB_OK);
            let report: Value = serde_json::from_str(&take_string(out)).unwrap();
            assert!(report["pi"][0]["decimal"]
                .as_str()
                .unwrap()
                .starts_with("0.72360679"));
            clab_sft_free(s);

            let empty = cstr("[[0,0],[0,0]]");
            assert!(clab_sft_parse(empty.as_ptr(), &mut s) == CLAB_ERR_MATH);
        }
    }
}
