//! C ABI over the extremal projector engine.
//!
//! Every entry point returns an [`ExtremalStatus`]; on failure the message
//! is kept per thread and read with [`extremal_last_error_message`].
//! Handles are opaque and released with their matching `_free` function.
//! Strings handed out by the library are released with
//! [`extremal_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use extremal::error::Error;
use extremal::projector::{compare, Mode, OpExpr, Realization};
use extremal::ratfield::RatFunc;
use extremal::registry::{self, Check, FactorParser};
use extremal::report::result_json;
use extremal::rootsys::SubalgebraSpec;
use extremal::solver::{solve, SolveOptions};
use extremal::verma::TruncatedVerma;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Degenerate = 4,
    Internal = 5,
    Panic = 6,
}

/// A truncated universal Verma module.
pub struct ExtremalVerma {
    inner: Arc<TruncatedVerma>,
}

/// An operator expression bound to a module.
pub struct ExtremalOperator {
    verma: Arc<TruncatedVerma>,
    expr: OpExpr,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> ExtremalStatus {
    match e {
        Error::NotStandard(_) | Error::UnsupportedType(_) | Error::RankTooLarge(..) => ExtremalStatus::Unsupported,
        Error::DegenerateCenter(_) | Error::DegenerateForm(_) | Error::DecompositionFailure(_) | Error::PoleAtPoint | Error::ZeroDivisor => ExtremalStatus::Degenerate,
        Error::Internal(_) | Error::NoGenericPoint(_) => ExtremalStatus::Internal,
        _ => ExtremalStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (ExtremalStatus, String)>) -> ExtremalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ExtremalStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside the library");
            ExtremalStatus::Panic
        }
    }
}

fn lib<T>(r: extremal::error::Result<T>) -> Result<T, (ExtremalStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ExtremalStatus, String) {
    (ExtremalStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ExtremalStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (ExtremalStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), (ExtremalStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (ExtremalStatus::Internal, "string contains a nul byte".to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn mode_of(symbolic: bool, seed: u64, trials: usize) -> Mode {
    if symbolic {
        Mode::Symbolic
    } else {
        Mode::Generic { seed, trials: trials.max(1) }
    }
}

/// Copy of the last error message on this thread, or null if the last call
/// succeeded. Release with [`extremal_string_free`].
#[no_mangle]
pub extern "C" fn extremal_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn extremal_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn extremal_verma_new(n: usize, depth: usize, out: *mut *mut ExtremalVerma) -> ExtremalStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Arc::new(lib(TruncatedVerma::new(n, depth))?);
        *out = Box::into_raw(Box::new(ExtremalVerma { inner }));
        Ok(())
    })
}

/// # Safety
/// `v` must be null or a handle from [`extremal_verma_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn extremal_verma_free(v: *mut ExtremalVerma) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `v` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn extremal_verma_num_blocks(v: *const ExtremalVerma, out: *mut usize) -> ExtremalStatus {
    guard(|| {
        let v = v.as_ref().ok_or_else(|| null("verma"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v.inner.blocks().len();
        Ok(())
    })
}

fn new_operator(v: &ExtremalVerma, expr: OpExpr, out: *mut *mut ExtremalOperator) -> Result<(), (ExtremalStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(ExtremalOperator { verma: v.inner.clone(), expr })) };
    Ok(())
}

/// The relative extremal projector `P(g, l)` for a standard `l` such as
/// `"h"`, `"23"` or `"12,45"`.
///
/// # Safety
/// `v` must be a live handle, `l` a nul-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn extremal_projector_new(v: *const ExtremalVerma, l: *const c_char, out: *mut *mut ExtremalOperator) -> ExtremalStatus {
    guard(|| {
        let v = v.as_ref().ok_or_else(|| null("verma"))?;
        let l = lib(SubalgebraSpec::parse(read_str(l, "l")?))?;
        lib(l.validate_for(v.inner.n()))?;
        if !l.is_standard() {
            return Err((ExtremalStatus::Unsupported, format!("subalgebra {} is not standard", l.label())));
        }
        new_operator(v, OpExpr::Direct(l), out)
    })
}

/// A factor by name: `P123^12`, `P34`, `Q35`, `Q124^12`, ...
///
/// # Safety
/// As for [`extremal_projector_new`].
#[no_mangle]
pub unsafe extern "C" fn extremal_factor_new(v: *const ExtremalVerma, name: *const c_char, out: *mut *mut ExtremalOperator) -> ExtremalStatus {
    guard(|| {
        let v = v.as_ref().ok_or_else(|| null("verma"))?;
        let name = read_str(name, "name")?;
        let mut p = FactorParser::new(v.inner.n(), v.inner.depth);
        let exprs = lib(p.parse_list(name))?;
        let expr = if exprs.len() == 1 { exprs.into_iter().next().expect("one") } else { OpExpr::Compose(exprs) };
        new_operator(v, expr, out)
    })
}

/// The product `a b`; `b` acts first.
///
/// # Safety
/// `a`, `b` live handles on the same module, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn extremal_operator_compose(a: *const ExtremalOperator, b: *const ExtremalOperator, out: *mut *mut ExtremalOperator) -> ExtremalStatus {
    guard(|| {
        let (a, b) = (a.as_ref().ok_or_else(|| null("a"))?, b.as_ref().ok_or_else(|| null("b"))?);
        if !Arc::ptr_eq(&a.verma, &b.verma) && (a.verma.n() != b.verma.n() || a.verma.depth != b.verma.depth) {
            return Err((ExtremalStatus::InvalidArgument, "operators live on different modules".into()));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(ExtremalOperator { verma: a.verma.clone(), expr: OpExpr::compose([a.expr.clone(), b.expr.clone()]) }));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn extremal_operator_free(op: *mut ExtremalOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Symbolic block matrices as JSON.
///
/// # Safety
/// `op` a live handle, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn extremal_operator_to_json(op: *const ExtremalOperator, out: *mut *mut c_char) -> ExtremalStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("operator"))?;
        let w = lib(Realization::<RatFunc>::new(op.verma.clone(), ()).operator(&op.expr))?;
        out_string(serde_json::to_string(&w.to_json()).expect("plain strings"), out)
    })
}

/// Compares two operators, exactly or at `trials` seeded random points.
///
/// # Safety
/// `a`, `b` live handles, `equal` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn extremal_operator_equal(
    a: *const ExtremalOperator,
    b: *const ExtremalOperator,
    symbolic: bool,
    seed: u64,
    trials: usize,
    equal: *mut bool,
) -> ExtremalStatus {
    guard(|| {
        let (a, b) = (a.as_ref().ok_or_else(|| null("a"))?, b.as_ref().ok_or_else(|| null("b"))?);
        if equal.is_null() {
            return Err(null("equal"));
        }
        *equal = lib(compare(&a.verma, &a.expr, &b.expr, &mode_of(symbolic, seed, trials)))?.equal;
        Ok(())
    })
}

/// Runs a named identity. `depth` 0 keeps the registered depth; `json`
/// may be null.
///
/// # Safety
/// `id` a nul-terminated string, `passed` valid, `json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn extremal_registry_verify(id: *const c_char, depth: usize, passed: *mut bool, json: *mut *mut c_char) -> ExtremalStatus {
    guard(|| {
        let id = read_str(id, "id")?;
        if passed.is_null() {
            return Err(null("passed"));
        }
        let entry = lib(registry::lookup_at(id, None, (depth > 0).then_some(depth)))?;
        let o = lib(registry::run(&entry))?;
        *passed = o.passed;
        if !json.is_null() {
            out_string(serde_json::to_string(&o).expect("serializable"), json)?;
        }
        Ok(())
    })
}

/// Solves the factorization problem of a named identity and returns the
/// result as JSON.
///
/// # Safety
/// `id` a nul-terminated string, `json` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn extremal_registry_solve(id: *const c_char, depth: usize, json: *mut *mut c_char) -> ExtremalStatus {
    guard(|| {
        let id = read_str(id, "id")?;
        let entry = lib(registry::lookup_at(id, None, (depth > 0).then_some(depth)))?;
        let problem = match entry.check {
            Check::Solve { problem, .. } | Check::Ambiguity { problem, .. } => problem,
            _ => return Err((ExtremalStatus::InvalidArgument, format!("{id} is not a factorization problem"))),
        };
        let r = lib(solve(&problem, &SolveOptions { mode: entry.mode, verify: true }))?;
        out_string(result_json(&r).to_string(), json)
    })
}
