use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use extremal_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { extremal_string_free(p) };
    s
}

fn last_error() -> Option<String> {
    let p = extremal_last_error_message();
    (!p.is_null()).then(|| take_string(p))
}

fn verma(n: usize, depth: usize) -> *mut ExtremalVerma {
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { extremal_verma_new(n, depth, &mut v) }, ExtremalStatus::Ok);
    v
}

#[test]
fn module_handles() {
    let v = verma(3, 2);
    let mut blocks = 0;
    assert_eq!(unsafe { extremal_verma_num_blocks(v, &mut blocks) }, ExtremalStatus::Ok);
    assert_eq!(blocks, 6);
    assert!(last_error().is_none());
    unsafe { extremal_verma_free(v) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { extremal_verma_new(1, 2, &mut bad) }, ExtremalStatus::InvalidArgument);
    assert!(bad.is_null());
    assert!(last_error().unwrap().contains("rank"));
    assert_eq!(unsafe { extremal_verma_new(3, 2, ptr::null_mut()) }, ExtremalStatus::NullPointer);
}

#[test]
fn projector_equals_factorization() {
    let v = verma(3, 3);
    let l = CString::new("h").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { extremal_projector_new(v, l.as_ptr(), &mut p) }, ExtremalStatus::Ok);
    let names = CString::new("P12 Q13 P23").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { extremal_factor_new(v, names.as_ptr(), &mut f) }, ExtremalStatus::Ok);
    let mut eq = false;
    assert_eq!(unsafe { extremal_operator_equal(p, f, true, 0, 0, &mut eq) }, ExtremalStatus::Ok);
    assert!(eq);

    let p12 = CString::new("P12").unwrap();
    let q = CString::new("Q13").unwrap();
    let (mut a, mut b, mut ab) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(extremal_factor_new(v, p12.as_ptr(), &mut a), ExtremalStatus::Ok);
        assert_eq!(extremal_factor_new(v, q.as_ptr(), &mut b), ExtremalStatus::Ok);
        assert_eq!(extremal_operator_compose(a, b, &mut ab), ExtremalStatus::Ok);
        assert_eq!(extremal_operator_equal(ab, p, false, 5, 2, &mut eq), ExtremalStatus::Ok);
    }
    assert!(!eq);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { extremal_operator_to_json(p, &mut json) }, ExtremalStatus::Ok);
    let blocks: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(blocks[0]["matrix"][0][0], "1");
    unsafe {
        for op in [p, f, a, b, ab] {
            extremal_operator_free(op);
        }
        extremal_verma_free(v);
    }
}

#[test]
fn rejected_inputs() {
    let v = verma(3, 2);
    let mut p = ptr::null_mut();
    let l = CString::new("13").unwrap();
    assert_eq!(unsafe { extremal_projector_new(v, l.as_ptr(), &mut p) }, ExtremalStatus::Unsupported);
    assert!(last_error().unwrap().contains("not standard"));
    let bad = CString::new("X12").unwrap();
    assert_eq!(unsafe { extremal_factor_new(v, bad.as_ptr(), &mut p) }, ExtremalStatus::InvalidArgument);
    assert_eq!(unsafe { extremal_projector_new(v, ptr::null(), &mut p) }, ExtremalStatus::NullPointer);
    unsafe { extremal_verma_free(v) };
}

#[test]
fn registry_calls() {
    let id = CString::new("counterexample-sl3").unwrap();
    let mut passed = false;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { extremal_registry_verify(id.as_ptr(), 0, &mut passed, &mut json) }, ExtremalStatus::Ok);
    assert!(passed);
    assert!(take_string(json).contains("counterexample-sl3"));

    let id = CString::new("warm-up-sl3").unwrap();
    assert_eq!(unsafe { extremal_registry_solve(id.as_ptr(), 4, &mut json) }, ExtremalStatus::Ok);
    let r: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(r["status"]["kind"], "unique");
    assert_eq!(r["q"]["F13"], "(x1 - x3 + 1)^-1 * (1)");

    let id = CString::new("fin-fac-sl3").unwrap();
    assert_eq!(unsafe { extremal_registry_solve(id.as_ptr(), 0, &mut json) }, ExtremalStatus::InvalidArgument);
    let id = CString::new("missing").unwrap();
    assert_eq!(unsafe { extremal_registry_verify(id.as_ptr(), 0, &mut passed, ptr::null_mut()) }, ExtremalStatus::InvalidArgument);
}

#[test]
fn header_declares_the_abi() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/extremal.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "extremal_last_error_message",
        "extremal_string_free",
        "extremal_verma_new",
        "extremal_projector_new",
        "extremal_factor_new",
        "extremal_operator_equal",
        "extremal_registry_verify",
        "EXTREMAL_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // Compile-check the header when a C compiler is around.
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
