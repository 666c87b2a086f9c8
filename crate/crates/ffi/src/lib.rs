//! C ABI over the `mltt-forcing` kernel.
//!
//! Terms are opaque `MfTerm` handles created by [`mf_term_parse`] or
//! [`mf_whnf`] and released with [`mf_term_free`]. Strings returned to the
//! caller are owned by the caller and released with [`mf_string_free`].
//! Every fallible call returns an [`MfStatus`]; on failure the message is
//! available from [`mf_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mltt_forcing::cli::parser::{parse_condition, parse_term};
use mltt_forcing::cli::run::{check_source, Emit, EXIT_ACCEPT, EXIT_REJECT};
use mltt_forcing::reduction::{self, ReductionError};
use mltt_forcing::semantics::{refute_sigma, RefutationTarget};
use mltt_forcing::typecheck::Limits;
use mltt_forcing::{Mode, Term};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    /// The judgment or refutation was rejected; output is still written.
    Reject = 1,
    ParseError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    FuelExhausted = 5,
    ModeViolation = 6,
    Internal = 7,
}

/// Opaque term handle.
pub struct MfTerm(Term);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: MfStatus, msg: impl Into<String>) -> MfStatus {
    set_error(msg);
    status
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, MfStatus> {
    if s.is_null() {
        return Err(fail(MfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Read an optional string: null means `default`.
unsafe fn read_opt<'a>(s: *const c_char, what: &str, default: &'a str) -> Result<&'a str, MfStatus> {
    if s.is_null() {
        Ok(default)
    } else {
        read_str(s, what)
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    *out = value;
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

fn reduction_status(e: &ReductionError) -> MfStatus {
    match e {
        ReductionError::Mode(_) => MfStatus::ModeViolation,
        ReductionError::FuelExhausted { .. } | ReductionError::SplitDepthExceeded { .. } => MfStatus::FuelExhausted,
    }
}

/// Parse a closed term. On success `*out` owns a new handle.
///
/// # Safety
/// `src` must be null or a NUL-terminated string; `out` must be null or
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mf_term_parse(src: *const c_char, out: *mut *mut MfTerm) -> MfStatus {
    clear_error();
    if out.is_null() {
        return fail(MfStatus::NullPointer, "out is null");
    }
    let src = try_status!(read_str(src, "src"));
    match parse_term(src) {
        Ok(t) => {
            write_out(out, Box::into_raw(Box::new(MfTerm(t))));
            MfStatus::Ok
        }
        Err(e) => fail(MfStatus::ParseError, e.to_string()),
    }
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `t` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_term_free(t: *mut MfTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Print a term in surface syntax. Returns null if `t` is null.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mf_term_to_string(t: *const MfTerm) -> *mut c_char {
    clear_error();
    match t.as_ref() {
        Some(t) => to_c(t.0.to_string()),
        None => {
            set_error("term is null");
            ptr::null_mut()
        }
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reduce `t` to weak head normal form at condition `cond` (e.g. `{0=1}`)
/// in `mode` (`plain`, `forcing` or `many-reals`). Null `cond` means `{}`,
/// null `mode` means `many-reals`, and `fuel` 0 means the default budget.
/// `*stuck_index` receives the index a properly stuck result waits on,
/// or -1; it may be null.
///
/// # Safety
/// Pointer arguments must be null or valid as described above.
#[no_mangle]
pub unsafe extern "C" fn mf_whnf(
    t: *const MfTerm,
    cond: *const c_char,
    mode: *const c_char,
    fuel: u64,
    out: *mut *mut MfTerm,
    stuck_index: *mut i64,
) -> MfStatus {
    clear_error();
    if out.is_null() {
        return fail(MfStatus::NullPointer, "out is null");
    }
    let Some(t) = t.as_ref() else {
        return fail(MfStatus::NullPointer, "term is null");
    };
    let cond = try_status!(read_opt(cond, "cond", "{}"));
    let mode = try_status!(read_opt(mode, "mode", "many-reals"));
    let p = match parse_condition(cond) {
        Ok(p) => p,
        Err(e) => return fail(MfStatus::ParseError, e.to_string()),
    };
    let mode: Mode = match mode.parse() {
        Ok(m) => m,
        Err(e) => return fail(MfStatus::ParseError, e),
    };
    let fuel = if fuel == 0 { reduction::DEFAULT_FUEL } else { fuel };
    match reduction::whnf(&t.0, &p, mode, fuel) {
        Ok(w) => {
            if !stuck_index.is_null() {
                write_out(stuck_index, w.class.stuck_index().map_or(-1, |k| k as i64));
            }
            write_out(out, Box::into_raw(Box::new(MfTerm(w.term))));
            MfStatus::Ok
        }
        Err(e) => fail(reduction_status(&e), e.to_string()),
    }
}

/// Check a checking file given as text. `*json_out` receives the JSON
/// report (also on `MF_STATUS_REJECT`). Returns `MF_STATUS_OK` when every
/// item is accepted.
///
/// # Safety
/// `src` must be a NUL-terminated string and `json_out` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_check_source(src: *const c_char, json_out: *mut *mut c_char) -> MfStatus {
    clear_error();
    if json_out.is_null() {
        return fail(MfStatus::NullPointer, "json_out is null");
    }
    let src = try_status!(read_str(src, "src"));
    let out = check_source(src, "<input>", Emit::Json);
    match out.code {
        EXIT_ACCEPT | EXIT_REJECT => {
            write_out(json_out, to_c(out.stdout));
            if out.code == EXIT_ACCEPT {
                MfStatus::Ok
            } else {
                MfStatus::Reject
            }
        }
        _ => fail(MfStatus::ParseError, out.stderr.trim_end()),
    }
}

/// Try to show that `t` is no closed witness of `Sig (x : N) IsZero (f x)`,
/// or of the same type over `f[q]` when `q` is non-null. On success
/// `*json_out` receives the refutation certificate.
///
/// # Safety
/// `t` must be a live handle, `q` null or a NUL-terminated string, and
/// `json_out` writable.
#[no_mangle]
pub unsafe extern "C" fn mf_refute_sigma(
    t: *const MfTerm,
    q: *const c_char,
    json_out: *mut *mut c_char,
) -> MfStatus {
    clear_error();
    if json_out.is_null() {
        return fail(MfStatus::NullPointer, "json_out is null");
    }
    let Some(t) = t.as_ref() else {
        return fail(MfStatus::NullPointer, "term is null");
    };
    let target = if q.is_null() {
        RefutationTarget::Generic
    } else {
        let q = try_status!(read_str(q, "q"));
        match parse_condition(q) {
            Ok(q) => RefutationTarget::GenericAt(q),
            Err(e) => return fail(MfStatus::ParseError, e.to_string()),
        }
    };
    match refute_sigma(&t.0, &target, Limits::default()) {
        Ok(cert) => match serde_json::to_string(&cert) {
            Ok(s) => {
                write_out(json_out, to_c(s));
                MfStatus::Ok
            }
            Err(e) => fail(MfStatus::Internal, e.to_string()),
        },
        Err(mltt_forcing::semantics::CannotRefute::Mode(e)) => fail(MfStatus::ModeViolation, e.to_string()),
        Err(e) => fail(MfStatus::Reject, e.to_string()),
    }
}
