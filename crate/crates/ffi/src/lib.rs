//! C ABI for the workbench: opaque handles over the root datum, the
//! symbolic engine, and the cell layer, with integer error codes and
//! caller-freed strings. The header is generated by cbindgen at build time
//! into `include/qa_ffi.h`.
//!
//! Conventions: every function returns a `QaStatus` code; results come back
//! through out-parameters. Strings are UTF-8, NUL-terminated, and must be
//! released with `qa_string_free`. Handles must be released with their
//! matching `_free` function. All functions are panic-safe.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use qa_core::cells::CellContext;
use qa_core::error::Error;
use qa_core::rootdata::{build_root_datum, AffineType, Root, RootDatum};
use qa_core::uplus::{parse_element, UPlus};

/// Status codes mirrored by the generated header.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QaStatus {
    Ok = 0,
    /// Invalid input: bad type spelling, bad arguments, contract violation.
    DomainError = 2,
    /// The value exists but is not reachable by the implemented computation.
    Infeasible = 3,
    /// A null pointer was passed where a value was required.
    NullArgument = 4,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 5,
    /// An internal panic was caught; see `qa_last_error`.
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QaStatus {
    match e {
        Error::Domain(_) | Error::Parse(_) => QaStatus::DomainError,
        Error::Infeasible(_) | Error::Inconclusive(_) => QaStatus::Infeasible,
    }
}

/// Opaque handle: numerical data of one affine diagram.
pub struct QaRootDatum {
    inner: Arc<RootDatum>,
}

/// Opaque handle: symbolic engine for the positive half.
pub struct QaEngine {
    datum: Arc<RootDatum>,
    inner: UPlus,
}

/// Opaque handle: cell layer over one dominant weight.
pub struct QaCells {
    inner: CellContext,
}

unsafe fn cstr_arg<'a>(p: *const c_char) -> Result<&'a str, QaStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(QaStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        QaStatus::InvalidUtf8
    })
}

fn give_string(out: *mut *mut c_char, s: String) -> QaStatus {
    if out.is_null() {
        set_error("null output pointer");
        return QaStatus::NullArgument;
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            QaStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL");
            QaStatus::Internal
        }
    }
}

fn guarded(f: impl FnOnce() -> QaStatus) -> QaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_error(&msg);
            QaStatus::Internal
        }
    }
}

/// Copy of the most recent error message on this thread, or NULL when no
/// error has been recorded. Free with `qa_string_free`.
#[no_mangle]
pub extern "C" fn qa_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by one of the string-producing
/// functions here, not yet freed; NULL is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn qa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Build the root datum of an affine diagram from its spelling, e.g.
/// "A2~2". On success writes a handle the caller must release with
/// `qa_root_datum_free`.
///
/// # Safety
/// `type_spelling` must point to a NUL-terminated string; `out` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qa_root_datum_new(
    type_spelling: *const c_char,
    out: *mut *mut QaRootDatum,
) -> QaStatus {
    guarded(|| {
        let spelling = match unsafe { cstr_arg(type_spelling) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        if out.is_null() {
            set_error("null output pointer");
            return QaStatus::NullArgument;
        }
        match AffineType::parse(spelling).and_then(build_root_datum) {
            Ok(datum) => {
                unsafe { *out = Box::into_raw(Box::new(QaRootDatum { inner: datum })) };
                QaStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `handle` must come from `qa_root_datum_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qa_root_datum_free(handle: *mut QaRootDatum) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Classical rank of the datum, or -1 on a null handle.
///
/// # Safety
/// `handle` must be a live handle from `qa_root_datum_new` or NULL.
#[no_mangle]
pub unsafe extern "C" fn qa_root_datum_rank(handle: *const QaRootDatum) -> i32 {
    if handle.is_null() {
        return -1;
    }
    unsafe { &*handle }.inner.rank as i32
}

/// JSON description of the datum (exact rational entries as strings).
///
/// # Safety
/// `handle` must be live; `out` valid and writable.
#[no_mangle]
pub unsafe extern "C" fn qa_root_datum_json(
    handle: *const QaRootDatum,
    out: *mut *mut c_char,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() {
            set_error("null handle");
            return QaStatus::NullArgument;
        }
        let datum = unsafe { &*handle };
        give_string(out, serde_json::to_string_pretty(&datum.inner.to_json()).expect("serializable"))
    })
}

/// Build the symbolic engine for a datum.
///
/// # Safety
/// `handle` must be live; `out` valid and writable.
#[no_mangle]
pub unsafe extern "C" fn qa_engine_new(
    handle: *const QaRootDatum,
    out: *mut *mut QaEngine,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("null argument");
            return QaStatus::NullArgument;
        }
        let datum = unsafe { &*handle }.inner.clone();
        match UPlus::new(&datum) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(QaEngine { datum, inner })) };
                QaStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `handle` must come from `qa_engine_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qa_engine_free(handle: *mut QaEngine) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Value of the characterizing bilinear form on two element expressions
/// (grammar: `E0*E1 - q^-2*E1*E0`). Writes the exact rational-function
/// string.
///
/// # Safety
/// `handle` must be live; `x`, `y` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_form(
    handle: *const QaEngine,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() {
            set_error("null handle");
            return QaStatus::NullArgument;
        }
        let engine = unsafe { &*handle };
        let (xs, ys) = match (unsafe { cstr_arg(x) }, unsafe { cstr_arg(y) }) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(c), _) | (_, Err(c)) => return c,
        };
        let parsed = parse_element(xs).and_then(|xe| parse_element(ys).map(|ye| (xe, ye)));
        match parsed {
            Ok((xe, ye)) => {
                let rank = engine.datum.rank;
                let bad = qa_core::uplus::letters_used(&xe)
                    .into_iter()
                    .chain(qa_core::uplus::letters_used(&ye))
                    .find(|&l| l as usize > rank);
                if let Some(l) = bad {
                    set_error(&format!("generator E{l} out of node range"));
                    return QaStatus::DomainError;
                }
                give_string(out, engine.inner.form(&xe, &ye).to_string())
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Root `beta_k` of the fixed doubly infinite sequence, as a JSON array of
/// simple-root coordinates.
///
/// # Safety
/// `handle` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_beta(
    handle: *const QaEngine,
    k: i64,
    out: *mut *mut c_char,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() {
            set_error("null handle");
            return QaStatus::NullArgument;
        }
        let engine = unsafe { &*handle };
        let root = engine.inner.sequence().beta(k);
        give_string(out, serde_json::to_string(&root.coords).expect("serializable"))
    })
}

/// Canonical basis at a weight (comma-separated simple-root coordinates) in
/// a frame, as JSON. Infeasible frames report status 3.
///
/// # Safety
/// `handle` must be live; `weight_csv` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_canonical_basis_json(
    handle: *const QaEngine,
    weight_csv: *const c_char,
    frame: i64,
    out: *mut *mut c_char,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() {
            set_error("null handle");
            return QaStatus::NullArgument;
        }
        let engine = unsafe { &*handle };
        let csv = match unsafe { cstr_arg(weight_csv) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let coords: Result<Vec<i64>, _> = csv.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let Ok(coords) = coords else {
            set_error("weight coordinates must be integers");
            return QaStatus::DomainError;
        };
        if coords.len() != engine.datum.rank + 1 {
            set_error("wrong number of weight coordinates");
            return QaStatus::DomainError;
        }
        match engine.inner.canonical_basis_at_weight(&Root::new(coords), frame) {
            Ok(cb) => {
                let rows: Vec<serde_json::Value> = cb
                    .iter()
                    .map(|(c, el, coeffs)| {
                        let cmap: std::collections::BTreeMap<String, String> =
                            coeffs.iter().map(|(k, v)| (k.describe(), v.to_string())).collect();
                        serde_json::json!({
                            "index": c.describe(),
                            "pbw_coefficients": cmap,
                            "element": el.to_json(),
                        })
                    })
                    .collect();
                give_string(out, serde_json::to_string_pretty(&rows).expect("serializable"))
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Build the cell layer for a dominant weight given as a comma-separated
/// list of fundamental multiplicities.
///
/// # Safety
/// `handle` must be live; `lambda_csv` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_cells_new(
    handle: *const QaRootDatum,
    lambda_csv: *const c_char,
    out: *mut *mut QaCells,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("null argument");
            return QaStatus::NullArgument;
        }
        let datum = unsafe { &*handle }.inner.clone();
        let csv = match unsafe { cstr_arg(lambda_csv) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let lambda: Result<Vec<i64>, _> = csv.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let Ok(lambda) = lambda else {
            set_error("lambda entries must be integers");
            return QaStatus::DomainError;
        };
        if lambda.len() != datum.rank {
            set_error("wrong number of lambda entries");
            return QaStatus::DomainError;
        }
        match CellContext::new(&datum, &lambda) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(QaCells { inner })) };
                QaStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `handle` must come from `qa_cells_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qa_cells_free(handle: *mut QaCells) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Size of the diagonal trivial-triple set.
///
/// # Safety
/// `handle` must be live; `out` valid and writable.
#[no_mangle]
pub unsafe extern "C" fn qa_cells_d_count(handle: *const QaCells, out: *mut u64) -> QaStatus {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("null argument");
            return QaStatus::NullArgument;
        }
        let cells = unsafe { &*handle };
        unsafe { *out = cells.inner.d_count() as u64 };
        QaStatus::Ok
    })
}

/// Cell partition on the truncated basis as JSON; under-truncation reports
/// status 3 without writing output.
///
/// # Safety
/// `handle` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qa_cells_partition_json(
    handle: *const QaCells,
    max_boxes: u64,
    max_det: i64,
    out: *mut *mut c_char,
) -> QaStatus {
    guarded(|| {
        if handle.is_null() {
            set_error("null handle");
            return QaStatus::NullArgument;
        }
        let cells = unsafe { &*handle };
        match cells.inner.cell_partition(max_boxes, max_det) {
            Ok(p) => give_string(out, serde_json::to_string_pretty(&p).expect("serializable")),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
