use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use mldokit_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { mldokit_string_free(s) };
    out
}

fn last_error() -> Option<String> {
    let p = mldokit_last_error();
    (!p.is_null()).then(|| take(p))
}

fn form(src: &str) -> *mut MldokitForm {
    let c = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mldokit_form_parse(c.as_ptr(), &mut out) }, MldokitStatus::Ok);
    out
}

fn operator(src: &str, k: &str) -> *mut MldokitOperator {
    let (s, k) = (CString::new(src).unwrap(), CString::new(k).unwrap());
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mldokit_operator_parse(s.as_ptr(), k.as_ptr(), &mut out) },
        MldokitStatus::Ok
    );
    out
}

#[test]
fn form_round_trip() {
    let f = form("E2^2 - E4");
    let mut w = 0u32;
    let mut d = 0u32;
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_form_weight(f, &mut w), MldokitStatus::Ok);
        assert_eq!(mldokit_form_depth(f, &mut d), MldokitStatus::Ok);
        assert_eq!(mldokit_form_to_string(f, &mut s), MldokitStatus::Ok);
    }
    assert_eq!((w, d), (4, 2));
    assert_eq!(take(s), "E2^2 - E4");

    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_form_projection(f, &mut p), MldokitStatus::Ok);
        assert_eq!(mldokit_form_to_string(p, &mut s), MldokitStatus::Ok);
        mldokit_form_free(p);
        mldokit_form_free(f);
    }
    assert_eq!(take(s), "0");
}

#[test]
fn qexp_and_derivative() {
    let f = form("E2");
    let mut g = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_form_derivative(f, 1, &mut g), MldokitStatus::Ok);
        assert_eq!(mldokit_form_qexp(g, 3, &mut s), MldokitStatus::Ok);
        mldokit_form_free(g);
        mldokit_form_free(f);
    }
    // D(E2) = -24 sum n sigma(n) q^n
    assert_eq!(take(s), "0,-24,-144,-288");
}

#[test]
fn omega_and_bracket() {
    let mut w = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_omega(2, &mut w), MldokitStatus::Ok);
        assert_eq!(mldokit_form_to_string(w, &mut s), MldokitStatus::Ok);
        mldokit_form_free(w);
    }
    assert_eq!(take(s), "-1/72*E4");

    let e4 = form("E4");
    let e6 = form("E6");
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_rc_bracket(e4, e6, 1, &mut b), MldokitStatus::Ok);
        assert_eq!(mldokit_form_to_string(b, &mut s), MldokitStatus::Ok);
        for h in [b, e4, e6] {
            mldokit_form_free(h);
        }
    }
    assert_eq!(take(s), "-2*E4^3 + 2*E6^2");
}

#[test]
fn operator_conversion() {
    let op = operator("D^3 - 1/2*E2*D^2 + (1/2*E2' - 169/100*E4)*D", "0");
    let basis = CString::new("vz").unwrap();
    let mut s = ptr::null_mut();
    let mut modular = false;
    unsafe {
        assert_eq!(mldokit_operator_is_modular(op, &mut modular), MldokitStatus::Ok);
        assert_eq!(
            mldokit_operator_to_basis(op, basis.as_ptr(), &mut s),
            MldokitStatus::Ok
        );
        mldokit_operator_free(op);
    }
    assert!(modular);
    assert_eq!(take(s), "0, -1039/600*E4, 0, 1");
}

#[test]
fn operator_from_form_and_apply() {
    let f = form("E2");
    let k = CString::new("1/5").unwrap();
    let mut op = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_operator_from_form(f, k.as_ptr(), &mut op), MldokitStatus::Ok);
        assert_eq!(mldokit_operator_to_string(op, &mut s), MldokitStatus::Ok);
    }
    assert_eq!(take(s), "-60*D + E2");
    let e4 = form("E4");
    let mut img = ptr::null_mut();
    unsafe {
        assert_eq!(mldokit_operator_apply(op, e4, &mut img), MldokitStatus::Ok);
        let mut w = 0;
        assert_eq!(mldokit_form_weight(img, &mut w), MldokitStatus::Ok);
        assert_eq!(w, 6);
        for h in [img, e4, f] {
            mldokit_form_free(h);
        }
        mldokit_operator_free(op);
    }
}

#[test]
fn errors_are_reported() {
    let src = CString::new("E2 + E4").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { mldokit_form_parse(src.as_ptr(), &mut out) };
    assert_eq!(st, MldokitStatus::Weight);
    assert!(out.is_null());
    assert_eq!(last_error().as_deref(), Some("mixed weights 2 and 4"));

    let bad = CString::new("E2 +").unwrap();
    let st = unsafe { mldokit_form_parse(bad.as_ptr(), &mut out) };
    assert_eq!(st, MldokitStatus::Parse);
    assert!(last_error().unwrap().starts_with("parse error at 1:"));

    let st = unsafe { mldokit_form_parse(ptr::null(), &mut out) };
    assert_eq!(st, MldokitStatus::NullPointer);

    let op = operator("D^2 + E4", "1");
    let basis = CString::new("kk").unwrap();
    let mut s = ptr::null_mut();
    let st = unsafe { mldokit_operator_to_basis(op, basis.as_ptr(), &mut s) };
    assert_eq!(st, MldokitStatus::NotModular);
    unsafe { mldokit_operator_free(op) };

    // success clears the error
    let mut d = 0usize;
    assert_eq!(unsafe { mldokit_dim_mldo(10, 5, &mut d) }, MldokitStatus::Ok);
    assert_eq!(d, 5);
    assert!(last_error().is_none());
    assert_eq!(unsafe { mldokit_dim_mldo(3, 1, &mut d) }, MldokitStatus::Weight);
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        mldokit_string_free(ptr::null_mut());
        mldokit_form_free(ptr::null_mut());
        mldokit_operator_free(ptr::null_mut());
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mldokit.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["mldokit_form_parse", "mldokit_last_error", "mldokit_string_free", "MLDOKIT_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    else {
        return;
    };
    assert!(status.success());
}
