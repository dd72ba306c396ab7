//! C ABI over `brattice`.
//!
//! Every entry point returns a [`BrStatus`]. Results come back through out
//! pointers. Handles are opaque and must be released with the matching
//! `*_free` function. Strings handed out by the library are released with
//! [`br_string_free`]. After a failure, [`br_last_error`] describes it on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use brattice::k0::{self, CompletedChain, Membership};
use brattice::pathspace::{dump_tree, end_census, LocallyConstantFunction, MinimalDiagram};
use brattice::reduction::{build_minimal_diagram, ReductionStrategy};
use brattice::{bdspec, BratteliDiagram, Error, ShapeClass};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Shape = 4,
    RankDeficient = 5,
    DepthExceeded = 6,
    IndexOutOfRange = 7,
    Singular = 8,
    Unsupported = 9,
    Panic = 10,
    /// Validation found structural violations.
    Invalid = 11,
}

/// Opaque diagram handle.
pub struct BrDiagram(BratteliDiagram);

/// Opaque minimal-reduction handle.
pub struct BrTree(MinimalDiagram);

/// Opaque completed-chain handle.
pub struct BrChain(CompletedChain);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(bytes).unwrap_or_default());
}

fn status_of(e: &Error) -> BrStatus {
    match e {
        Error::Parse { .. } => BrStatus::Parse,
        Error::Shape(_) | Error::ZeroRow { .. } => BrStatus::Shape,
        Error::RankDeficient { .. } | Error::NotDilatable { .. } => BrStatus::RankDeficient,
        Error::DepthExceeded { .. } => BrStatus::DepthExceeded,
        Error::IndexOutOfRange(_) => BrStatus::IndexOutOfRange,
        Error::Singular | Error::SingularCompletion { .. } | Error::CompletionNotFound { .. } => BrStatus::Singular,
        _ => BrStatus::Unsupported,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BrStatus, String)>) -> BrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BrStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BrStatus::Panic
        }
    }
}

fn lift<T>(r: brattice::Result<T>) -> Result<T, (BrStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (BrStatus, String) {
    (BrStatus::NullArgument, "null argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (BrStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| (BrStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (BrStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), (BrStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), (BrStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).map_err(|e| (BrStatus::Unsupported, e.to_string()))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread. Empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn br_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn br_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a diagram description.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn br_diagram_parse(spec: *const c_char, out: *mut *mut BrDiagram) -> BrStatus {
    guard(|| {
        let d = lift(bdspec::parse(text(spec)?))?;
        emit(out, BrDiagram(d))
    })
}

/// # Safety
/// `d` must come from [`br_diagram_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn br_diagram_free(d: *mut BrDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Checks the first `depth` levels. Violations are listed in
/// [`br_last_error`], one per line.
///
/// # Safety
/// `d` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn br_diagram_validate(d: *const BrDiagram, depth: usize) -> BrStatus {
    guard(|| {
        let report = brattice::diagram::validate_to_depth(&handle(d)?.0, depth);
        if report.is_empty() {
            return Ok(());
        }
        let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        Err((BrStatus::Invalid, lines.join("\n")))
    })
}

/// Builds a minimal reduction to `depth`. A null `strategy` picks the
/// theorem construction, or the first lexicographic choice for irregular
/// diagrams.
///
/// # Safety
/// `d` must be a live handle, `strategy` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn br_tree_build(
    d: *const BrDiagram,
    strategy: *const c_char,
    depth: usize,
    out: *mut *mut BrTree,
) -> BrStatus {
    guard(|| {
        let d = &handle(d)?.0;
        let s = if strategy.is_null() {
            if d.shape() == ShapeClass::Irregular {
                ReductionStrategy::LexFirst
            } else {
                ReductionStrategy::Theorem
            }
        } else {
            let name = text(strategy)?;
            ReductionStrategy::from_name(name)
                .ok_or_else(|| (BrStatus::Unsupported, format!("unknown strategy `{name}`")))?
        };
        emit(out, BrTree(lift(build_minimal_diagram(d, s, depth))?))
    })
}

/// # Safety
/// `t` must come from [`br_tree_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn br_tree_free(t: *mut BrTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Text dump of the parent maps and branch data.
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn br_tree_dump(t: *const BrTree, out: *mut *mut c_char) -> BrStatus {
    guard(|| emit_string(out, dump_tree(&handle(t)?.0)))
}

/// One-line end census.
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn br_tree_census(t: *const BrTree, out: *mut *mut c_char) -> BrStatus {
    guard(|| emit_string(out, end_census(&handle(t)?.0).to_string()))
}

/// Completes the multiplicity matrices to `depth`.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn br_chain_build(d: *const BrDiagram, depth: usize, out: *mut *mut BrChain) -> BrStatus {
    guard(|| emit(out, BrChain(lift(CompletedChain::from_diagram(&handle(d)?.0, depth))?)))
}

/// # Safety
/// `c` must come from [`br_chain_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn br_chain_free(c: *mut BrChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Text dump of squares and determinants, optionally with cumulative matrices.
///
/// # Safety
/// `c` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn br_chain_dump(c: *const BrChain, cumulative: bool, out: *mut *mut c_char) -> BrStatus {
    guard(|| emit_string(out, k0::dump_chain(&handle(c)?.0, cumulative)))
}

/// Decides whether `func` (for example `depth=1: 0 1/2`) lies in the
/// dimension group. On success `*is_member` is set. For members, `*witness`
/// receives the witness line; otherwise it is set to null.
///
/// # Safety
/// Handles must be live, `func` NUL-terminated, out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn br_member(
    c: *const BrChain,
    t: *const BrTree,
    func: *const c_char,
    is_member: *mut bool,
    witness: *mut *mut c_char,
) -> BrStatus {
    guard(|| {
        if is_member.is_null() || witness.is_null() {
            return Err(null());
        }
        let f: LocallyConstantFunction = lift(text(func)?.parse())?;
        match lift(k0::membership(&f, &handle(c)?.0, &handle(t)?.0))? {
            Membership::Member(w) => {
                *is_member = true;
                emit_string(witness, w.to_string())
            }
            Membership::NotMember { .. } => {
                *is_member = false;
                *witness = ptr::null_mut();
                Ok(())
            }
        }
    })
}
