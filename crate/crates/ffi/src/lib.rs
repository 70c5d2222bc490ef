//! C ABI for nestsim.
//!
//! Systems and relations are opaque handles owned by the caller and released
//! with their `*_free` function. Every fallible call returns an [`NsStatus`];
//! on failure `ns_last_error_message` describes what went wrong on the
//! calling thread. Strings returned by the library must be released with
//! `ns_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nestsim::{char_system, characterized_relation, generate_random, parse_aut, preorder, Error, Kind, Lts, Relation};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidKind = 4,
    OutOfRange = 5,
    InvalidArgument = 6,
    Internal = 7,
}

/// A labelled transition system.
pub struct NsLts(Lts);

/// A binary relation over the states of one system.
pub struct NsRelation(Relation);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: NsStatus, msg: impl Into<String>) -> NsStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> NsStatus {
    let status = match &e {
        Error::Aut { .. } | Error::Formula { .. } | Error::DeclFile { .. } => NsStatus::Parse,
        Error::InvalidKind(_) | Error::NestingDepth(_) => NsStatus::InvalidKind,
        Error::UnknownProcess(_) => NsStatus::OutOfRange,
        Error::InvalidParameter(_) | Error::UnknownAction(_) => NsStatus::InvalidArgument,
        _ => NsStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> NsStatus) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == NsStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(NsStatus::Internal, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, NsStatus> {
    if p.is_null() {
        return Err(fail(NsStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NsStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn kind_arg(p: *const c_char) -> Result<Kind, NsStatus> {
    str_arg(p)?.parse::<Kind>().map_err(from_error)
}

macro_rules! tryc {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(NsStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

fn out_relation(r: Relation, out: *mut *mut NsRelation) -> NsStatus {
    unsafe { *out = Box::into_raw(Box::new(NsRelation(r))) };
    NsStatus::Ok
}

/// Message for the last failed call on this thread. Empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ns_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses Aldebaran text into a new system stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_lts_parse_aut(text: *const c_char, out: *mut *mut NsLts) -> NsStatus {
    guard(|| {
        nonnull!(out);
        let text = tryc!(str_arg(text));
        let lts = tryc!(parse_aut(text).map_err(from_error));
        *out = Box::into_raw(Box::new(NsLts(lts)));
        NsStatus::Ok
    })
}

/// Builds a seeded random system over a comma-separated action list.
///
/// # Safety
/// `actions` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_lts_generate(
    states: usize,
    actions: *const c_char,
    density: f64,
    seed: u64,
    out: *mut *mut NsLts,
) -> NsStatus {
    guard(|| {
        nonnull!(out);
        let actions: Vec<&str> = tryc!(str_arg(actions)).split(',').map(str::trim).collect();
        let lts = tryc!(generate_random(states, &actions, density, seed).map_err(from_error));
        *out = Box::into_raw(Box::new(NsLts(lts)));
        NsStatus::Ok
    })
}

/// Releases a system. Null is ignored.
///
/// # Safety
/// `lts` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ns_lts_free(lts: *mut NsLts) {
    if !lts.is_null() {
        drop(Box::from_raw(lts));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `lts` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_lts_num_states(lts: *const NsLts) -> usize {
    lts.as_ref().map_or(0, |l| l.0.num_states())
}

/// Computes a preorder (`sim`, `opsim`, `bisim`, `simeq`, `nsim:<n>`,
/// `nopsim:<n>`) as a relational greatest fixed point.
///
/// # Safety
/// `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_relation_compute(
    lts: *const NsLts,
    kind: *const c_char,
    out: *mut *mut NsRelation,
) -> NsStatus {
    guard(|| {
        nonnull!(lts, out);
        let kind = tryc!(kind_arg(kind));
        let r = tryc!(preorder(kind, &(*lts).0).map_err(from_error));
        out_relation(r, out)
    })
}

/// Computes a preorder by solving its characteristic declarations.
///
/// # Safety
/// Same as [`ns_relation_compute`].
#[no_mangle]
pub unsafe extern "C" fn ns_relation_characterized(
    lts: *const NsLts,
    kind: *const c_char,
    out: *mut *mut NsRelation,
) -> NsStatus {
    guard(|| {
        nonnull!(lts, out);
        let kind = tryc!(kind_arg(kind));
        let lts = &(*lts).0;
        let cs = tryc!(char_system(kind, lts).map_err(from_error));
        let r = tryc!(characterized_relation(&cs, lts).map_err(from_error));
        out_relation(r, out)
    })
}

/// Stores in `*out` whether `(p, q)` is in the relation.
///
/// # Safety
/// `rel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_relation_contains(rel: *const NsRelation, p: usize, q: usize, out: *mut bool) -> NsStatus {
    guard(|| {
        nonnull!(rel, out);
        let r = &(*rel).0;
        if p >= r.size() || q >= r.size() {
            return fail(NsStatus::OutOfRange, format!("pair ({p},{q}) outside 0..{}", r.size()));
        }
        *out = r.contains(p, q);
        NsStatus::Ok
    })
}

/// Number of pairs, or 0 for a null handle.
///
/// # Safety
/// `rel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_relation_size(rel: *const NsRelation) -> usize {
    rel.as_ref().map_or(0, |r| r.0.len())
}

/// Whether two relations hold exactly the same pairs. False if either is null.
///
/// # Safety
/// Both arguments must be null or live handles.
#[no_mangle]
pub unsafe extern "C" fn ns_relation_equal(a: *const NsRelation, b: *const NsRelation) -> bool {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.0 == b.0,
        _ => false,
    }
}

/// Releases a relation. Null is ignored.
///
/// # Safety
/// `rel` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ns_relation_free(rel: *mut NsRelation) {
    if !rel.is_null() {
        drop(Box::from_raw(rel));
    }
}

/// Decides `p <= q` for the given preorder.
///
/// # Safety
/// `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_check(
    lts: *const NsLts,
    kind: *const c_char,
    p: usize,
    q: usize,
    out: *mut bool,
) -> NsStatus {
    guard(|| {
        nonnull!(lts, out);
        let kind = tryc!(kind_arg(kind));
        let lts = &(*lts).0;
        let n = lts.num_states();
        if p >= n || q >= n {
            return fail(NsStatus::OutOfRange, format!("pair ({p},{q}) outside 0..{n}"));
        }
        *out = tryc!(preorder(kind, lts).map_err(from_error)).contains(p, q);
        NsStatus::Ok
    })
}

/// Renders the characteristic declarations of a preorder with one `target:`
/// line per state. Release the result with [`ns_string_free`].
///
/// # Safety
/// `lts` must be a live handle, `kind` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_char_system_render(
    lts: *const NsLts,
    kind: *const c_char,
    out: *mut *mut c_char,
) -> NsStatus {
    guard(|| {
        nonnull!(lts, out);
        let kind = tryc!(kind_arg(kind));
        let lts = &(*lts).0;
        let cs = tryc!(char_system(kind, lts).map_err(from_error));
        let text = cs.render(0..lts.num_states());
        *out = CString::new(text).map_or(ptr::null_mut(), CString::into_raw);
        NsStatus::Ok
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ns_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
