//! C interface to `einfty`.
//!
//! Elements and simplicial sets live behind opaque handles. Every call
//! returns an [`EinftyStatus`]; on failure the message is available from
//! [`einfty_last_error`] until the next failing call on the same thread.
//! Strings handed out by the library must be released with
//! [`einfty_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use einfty::normalize::{Reducer, Scope};
use einfty::simplicial::{coact, SimplicialSet};
use einfty::steenrod::square_report;
use einfty::verify::{run_suite, Suite, SuiteOptions};
use einfty::{Error, PropElement, Ring};
use serde_json::Value;

/// Result codes. The first four match the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EinftyStatus {
    Ok = 0,
    VerificationFailed = 1,
    ParseError = 2,
    SemanticError = 3,
    NullArgument = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EinftyRing {
    Integers = 0,
    Mod2 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EinftyScope {
    /// The three defining relations.
    S = 0,
    /// The relations together with the surjection rules, over F2.
    MS = 1,
}

/// Opaque linear combination of graph terms.
pub struct EinftyElement(PropElement);

/// Opaque finite simplicial set.
pub struct EinftySset(SimplicialSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(EinftyStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::Io(_) => EinftyStatus::ParseError,
            _ => EinftyStatus::SemanticError,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(EinftyStatus::ParseError, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<EinftyStatus, Failure>) -> EinftyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            EinftyStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EinftyStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EinftyStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(EinftyStatus::NullArgument, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<EinftyStatus, Failure> {
    if out.is_null() {
        return Err(Failure(EinftyStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(EinftyStatus::Ok)
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<EinftyStatus, Failure> {
    if out.is_null() {
        return Err(Failure(EinftyStatus::NullArgument, "output pointer is null".into()));
    }
    *out = CString::new(text).map_err(|e| Failure(EinftyStatus::SemanticError, e.to_string()))?.into_raw();
    Ok(EinftyStatus::Ok)
}

fn ring_of(r: EinftyRing) -> Ring {
    match r {
        EinftyRing::Integers => Ring::Z,
        EinftyRing::Mod2 => Ring::F2,
    }
}

/// Message of the last failure on this thread, or null. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn einfty_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn einfty_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a term or combination JSON. Bare graphs get coefficient one in
/// `ring`; combinations carry their own ring.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_from_json(
    json: *const c_char,
    ring: EinftyRing,
    out: *mut *mut EinftyElement,
) -> EinftyStatus {
    guard(|| {
        let v: Value = serde_json::from_str(str_arg(json, "json")?)?;
        write_out(out, EinftyElement(PropElement::from_json(&v, ring_of(ring))?))
    })
}

/// # Safety
/// `x` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_free(x: *mut EinftyElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `x` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_to_json(x: *const EinftyElement, out: *mut *mut c_char) -> EinftyStatus {
    guard(|| write_string(out, ref_arg(x, "element")?.0.to_json().to_string()))
}

/// Writes 1 to `out` if the element is zero, else 0.
///
/// # Safety
/// `x` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_is_zero(x: *const EinftyElement, out: *mut i32) -> EinftyStatus {
    guard(|| {
        let z = ref_arg(x, "element")?.0.is_zero();
        if out.is_null() {
            return Err(Failure(EinftyStatus::NullArgument, "output pointer is null".into()));
        }
        *out = z as i32;
        Ok(EinftyStatus::Ok)
    })
}

/// Normal form modulo the relations of `scope`.
///
/// # Safety
/// `x` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_reduce(
    x: *const EinftyElement,
    scope: EinftyScope,
    out: *mut *mut EinftyElement,
) -> EinftyStatus {
    guard(|| {
        let scope = match scope {
            EinftyScope::S => Scope::S,
            EinftyScope::MS => Scope::MS,
        };
        let nf = Reducer::new(scope).reduce(&ref_arg(x, "element")?.0)?;
        write_out(out, EinftyElement(nf))
    })
}

/// `top ∘ bottom`, with `bottom` applied first.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_compose(
    top: *const EinftyElement,
    bottom: *const EinftyElement,
    out: *mut *mut EinftyElement,
) -> EinftyStatus {
    guard(|| {
        let y = ref_arg(top, "top")?.0.compose(&ref_arg(bottom, "bottom")?.0)?;
        write_out(out, EinftyElement(y))
    })
}

/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_tensor(
    a: *const EinftyElement,
    b: *const EinftyElement,
    out: *mut *mut EinftyElement,
) -> EinftyStatus {
    guard(|| {
        let y = ref_arg(a, "left")?.0.tensor(&ref_arg(b, "right")?.0)?;
        write_out(out, EinftyElement(y))
    })
}

/// # Safety
/// `x` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_element_differential(
    x: *const EinftyElement,
    out: *mut *mut EinftyElement,
) -> EinftyStatus {
    guard(|| write_out(out, EinftyElement(ref_arg(x, "element")?.0.differential())))
}

/// Parses a `{"complex": ..}` or `{"sset": ..}` document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_sset_from_json(json: *const c_char, out: *mut *mut EinftySset) -> EinftyStatus {
    guard(|| {
        let v: Value = serde_json::from_str(str_arg(json, "json")?)?;
        write_out(out, EinftySset(SimplicialSet::from_json(&v)?))
    })
}

/// The standard `d`-simplex.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_sset_standard(d: u32, out: *mut *mut EinftySset) -> EinftyStatus {
    guard(|| {
        if d > 20 {
            return Err(Failure(EinftyStatus::SemanticError, format!("dimension {d} is too large")));
        }
        write_out(out, EinftySset(SimplicialSet::standard(d as usize)))
    })
}

/// # Safety
/// `x` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn einfty_sset_free(x: *mut EinftySset) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Applies a `(1, m)` element to a chain given as a simplex name such as
/// `"[0,1,2]"` or as chain JSON. The result is tensor chain JSON.
///
/// # Safety
/// Handles must be live, `chain` NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_coact(
    x: *const EinftyElement,
    space: *const EinftySset,
    chain: *const c_char,
    out: *mut *mut c_char,
) -> EinftyStatus {
    guard(|| {
        let g = &ref_arg(x, "element")?.0;
        let s = &ref_arg(space, "sset")?.0;
        let text = str_arg(chain, "chain")?;
        let v = serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()));
        let c = s.parse_chain(&v, g.ring())?;
        let image = coact(g, s, &c)?;
        write_string(out, s.chain_to_json(&image).to_string())
    })
}

/// Tables of `Sq^k` on mod 2 cohomology, as JSON.
///
/// # Safety
/// `space` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_steenrod(space: *const EinftySset, k: u32, out: *mut *mut c_char) -> EinftyStatus {
    guard(|| write_string(out, square_report(k as usize, &ref_arg(space, "sset")?.0)?.to_string()))
}

/// Runs one verification suite with its default bounds. The report JSON is
/// written even when the suite fails, in which case the status is
/// `VerificationFailed`.
///
/// # Safety
/// `suite` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn einfty_verify(suite: *const c_char, seed: u64, out: *mut *mut c_char) -> EinftyStatus {
    guard(|| {
        let suite: Suite = str_arg(suite, "suite")?.parse()?;
        let report = run_suite(suite, &SuiteOptions { seed, ..Default::default() })?;
        write_string(out, report.to_json().to_string())?;
        Ok(if report.passed() { EinftyStatus::Ok } else { EinftyStatus::VerificationFailed })
    })
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn einfty_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
