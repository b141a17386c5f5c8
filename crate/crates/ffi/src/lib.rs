//! C ABI over the `upo` library.
//!
//! Ontologies cross the boundary as opaque [`UpoOntology`] handles. Every
//! fallible function returns a [`UpoStatus`] and writes its result through an
//! out-pointer; on failure the out-pointer is left untouched and
//! [`upo_last_error_message`] describes the problem. Strings returned to the
//! caller are owned by the caller and released with [`upo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use upo::grounding::{ground, realize, GroundingError, RealizeError};
use upo::lint::lint;
use upo::model::{EntityKind, ModelError, Ontology};
use upo::parser::{parse_with, serialize, ParseErrorKind, ParseOptions};
use upo::temporal::{resolve_indexical, TemporalContext, TemporalError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The document has lexical or syntax errors.
    ParseError = 3,
    /// A name is not declared.
    UnknownName = 4,
    /// A name is declared with a different kind, or an ICE lacks what the
    /// operation needs.
    WrongKind = 5,
    /// The individual does not satisfy what the blueprint prescribes.
    NotConformant = 6,
    /// A timestamp is malformed or out of range.
    InvalidTimestamp = 7,
    /// The document or request is otherwise invalid.
    Invalid = 8,
    /// An internal failure; the library caught a panic.
    Internal = 9,
}

/// A parsed ontology. Create with [`upo_ontology_parse`], release with
/// [`upo_ontology_free`].
pub struct UpoOntology {
    inner: Ontology,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: UpoStatus,
    message: String,
}

impl Failure {
    fn new(status: UpoStatus, message: impl ToString) -> Self {
        Failure {
            status,
            message: message.to_string(),
        }
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UpoStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UpoStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("internal error");
            UpoStatus::Internal
        }
    }
}

/// # Safety
/// `p` is null or points to a nul-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(UpoStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(UpoStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// # Safety
/// `p` is null or was returned by this library and not yet freed.
unsafe fn ontology_arg<'a>(p: *const UpoOntology) -> Result<&'a Ontology, Failure> {
    p.as_ref()
        .map(|o| &o.inner)
        .ok_or_else(|| Failure::new(UpoStatus::NullArgument, "ontology is null"))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::new(UpoStatus::NullArgument, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no nul bytes").into_raw()
}

fn model_failure(ontology: &Ontology, e: ModelError) -> Failure {
    let status = match &e {
        ModelError::UnknownName { name, .. } if ontology.kind_of(name).is_some() => UpoStatus::WrongKind,
        ModelError::UnknownName { .. } => UpoStatus::UnknownName,
        _ => UpoStatus::Invalid,
    };
    Failure::new(status, e)
}

/// Parses a document. With `with_prelude` the built-in upper-level
/// vocabulary is loaded first. All parse errors are reported in the last
/// error message, one per line.
///
/// # Safety
/// `text` is a nul-terminated string and `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_ontology_parse(
    text: *const c_char,
    with_prelude: bool,
    out: *mut *mut UpoOntology,
) -> UpoStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        check_out(out)?;
        let ontology = parse_with(text, ParseOptions { prelude: with_prelude }).map_err(|errors| {
            let status = match errors[0].kind {
                ParseErrorKind::UnknownName => UpoStatus::UnknownName,
                _ => UpoStatus::ParseError,
            };
            let message: Vec<String> = errors.iter().map(ToString::to_string).collect();
            Failure::new(status, message.join("\n"))
        })?;
        *out = Box::into_raw(Box::new(UpoOntology { inner: ontology }));
        Ok(())
    })
}

/// Releases an ontology. Null is ignored.
///
/// # Safety
/// `ontology` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn upo_ontology_free(ontology: *mut UpoOntology) {
    if !ontology.is_null() {
        drop(Box::from_raw(ontology));
    }
}

/// Writes the document's own content back as canonical text.
///
/// # Safety
/// `ontology` is a live handle and `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_ontology_serialize(ontology: *const UpoOntology, out: *mut *mut c_char) -> UpoStatus {
    guard(|| {
        let o = ontology_arg(ontology)?;
        check_out(out)?;
        *out = into_c_string(serialize(o));
        Ok(())
    })
}

/// Lints the ontology and writes the findings as a JSON array.
///
/// # Safety
/// `ontology` is a live handle and `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_lint_json(ontology: *const UpoOntology, out: *mut *mut c_char) -> UpoStatus {
    guard(|| {
        let o = ontology_arg(ontology)?;
        check_out(out)?;
        let json = serde_json::to_string(&lint(o)).map_err(|e| Failure::new(UpoStatus::Internal, e))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Grounds one ICE and writes the grounding summary as a JSON object.
///
/// # Safety
/// `ontology` is a live handle, `ice` a nul-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_ground_json(
    ontology: *const UpoOntology,
    ice: *const c_char,
    out: *mut *mut c_char,
) -> UpoStatus {
    guard(|| {
        let o = ontology_arg(ontology)?;
        let ice = str_arg(ice, "ice")?;
        check_out(out)?;
        let report = ground(o, ice).map_err(|e| match e {
            GroundingError::Model(m) => model_failure(o, m),
            other => Failure::new(UpoStatus::WrongKind, other),
        })?;
        let json = serde_json::to_string(&report.summary()).map_err(|e| Failure::new(UpoStatus::Internal, e))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Checks that `individual` conforms to `blueprint` and returns a new
/// ontology recording that it represents the individual. The input handle is
/// unchanged.
///
/// # Safety
/// `ontology` is a live handle, the names are nul-terminated strings and
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_realize(
    ontology: *const UpoOntology,
    blueprint: *const c_char,
    individual: *const c_char,
    out: *mut *mut UpoOntology,
) -> UpoStatus {
    guard(|| {
        let o = ontology_arg(ontology)?;
        let blueprint = str_arg(blueprint, "blueprint")?;
        let individual = str_arg(individual, "individual")?;
        check_out(out)?;
        let realized = realize(o, blueprint, individual).map_err(|e| match e {
            RealizeError::Model(m) => model_failure(o, m),
            e @ RealizeError::WrongKind { .. } => Failure::new(UpoStatus::WrongKind, e),
            e @ RealizeError::NotConformant { .. } => Failure::new(UpoStatus::NotConformant, e),
        })?;
        *out = Box::into_raw(Box::new(UpoOntology { inner: realized }));
        Ok(())
    })
}

/// Resolves a temporal expression ICE (one with `Mode:` and `Cycle:`
/// clauses) uttered at `at` (`YYYY-MM-DDThh:mm:ss`, UTC). Writes a JSON
/// object with `first_instant`, `last_instant` and `designated_class`.
///
/// # Safety
/// `ontology` is a live handle, `ice` and `at` are nul-terminated strings and
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn upo_resolve_indexical(
    ontology: *const UpoOntology,
    ice: *const c_char,
    at: *const c_char,
    out: *mut *mut c_char,
) -> UpoStatus {
    guard(|| {
        let o = ontology_arg(ontology)?;
        let ice = str_arg(ice, "ice")?;
        let at = str_arg(at, "at")?;
        check_out(out)?;
        o.expect(ice, EntityKind::Ice).map_err(|e| model_failure(o, e))?;
        let (mode, day) = match o.temporal_frame(ice) {
            Some(frame) => (frame.mode, frame.cycle),
            None => (None, None),
        };
        let (Some(mode), Some(day)) = (mode, day) else {
            return Err(Failure::new(
                UpoStatus::WrongKind,
                format!("'{ice}' needs both 'Mode:' and 'Cycle:' clauses to be resolved"),
            ));
        };
        let temporal = |e: TemporalError| match e {
            TemporalError::InvalidTimestamp(_) | TemporalError::OutOfRange => {
                Failure::new(UpoStatus::InvalidTimestamp, e)
            }
            TemporalError::Model(m) => model_failure(o, m),
            other => Failure::new(UpoStatus::Invalid, other),
        };
        let ctx = TemporalContext::parse(at, day).map_err(temporal)?;
        let interval = resolve_indexical(mode, &ctx).map_err(temporal)?;
        let json = serde_json::to_string(&interval).map_err(|e| Failure::new(UpoStatus::Internal, e))?;
        *out = into_c_string(json);
        Ok(())
    })
}

/// Message for the most recent failure on this thread, or null if the most
/// recent call succeeded. Valid until the next call into this library on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn upo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn upo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn upo_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
