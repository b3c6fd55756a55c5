//! C interface to `mldokit`.
//!
//! Forms and operators are handed out as opaque heap handles that the caller
//! releases with the matching `*_free` function. Every fallible call returns
//! an [`MldokitStatus`]; on failure the message is kept per thread and can be
//! fetched with [`mldokit_last_error`]. Strings returned by the library are
//! released with [`mldokit_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mldokit::mldo::{self, BasisTag, Mldo};
use mldokit::parse::{parse_form, parse_operator};
use mldokit::qmring::QuasiModularForm;
use mldokit::rational::parse_q;
use mldokit::{hsd, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MldokitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Weight = 4,
    NotModular = 5,
    Math = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// A quasimodular form.
pub struct MldokitForm {
    inner: QuasiModularForm,
}

/// A modular linear differential operator.
pub struct MldokitOperator {
    inner: Mldo,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(MldokitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => MldokitStatus::Parse,
            Error::MixedWeights(..) | Error::WeightMismatch(_) | Error::InvalidWeight(..) => {
                MldokitStatus::Weight
            }
            Error::NotModular { .. } => MldokitStatus::NotModular,
            Error::InvalidArgument(_) => MldokitStatus::InvalidArgument,
            _ => MldokitStatus::Math,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MldokitStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MldokitStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MldokitStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MldokitStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MldokitStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(MldokitStatus::NullPointer, format!("null {what}")))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(MldokitStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    check_out(out)?;
    let c = CString::new(s).map_err(|_| Failure(MldokitStatus::Math, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_form(out: *mut *mut MldokitForm, f: QuasiModularForm) -> Result<(), Failure> {
    check_out(out)?;
    *out = Box::into_raw(Box::new(MldokitForm { inner: f }));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The returned
/// string is owned by the caller.
#[no_mangle]
pub extern "C" fn mldokit_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(s) => s.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mldokit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_form_parse(
    src: *const c_char,
    out: *mut *mut MldokitForm,
) -> MldokitStatus {
    guard(|| {
        let f = parse_form(text(src)?)?;
        put_form(out, f)
    })
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_form_free(f: *mut MldokitForm) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_form_weight(f: *const MldokitForm, out: *mut u32) -> MldokitStatus {
    guard(|| {
        let f = borrow(f, "form")?;
        check_out(out)?;
        *out = f.inner.weight();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_form_depth(f: *const MldokitForm, out: *mut u32) -> MldokitStatus {
    guard(|| {
        let f = borrow(f, "form")?;
        check_out(out)?;
        *out = f.inner.depth();
        Ok(())
    })
}

/// Canonical text of a form.
#[no_mangle]
pub unsafe extern "C" fn mldokit_form_to_string(
    f: *const MldokitForm,
    out: *mut *mut c_char,
) -> MldokitStatus {
    guard(|| put_string(out, borrow(f, "form")?.inner.to_string()))
}

/// `D^n F`.
#[no_mangle]
pub unsafe extern "C" fn mldokit_form_derivative(
    f: *const MldokitForm,
    n: u32,
    out: *mut *mut MldokitForm,
) -> MldokitStatus {
    guard(|| put_form(out, borrow(f, "form")?.inner.derivative_n(n)))
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_form_projection(
    f: *const MldokitForm,
    out: *mut *mut MldokitForm,
) -> MldokitStatus {
    guard(|| put_form(out, borrow(f, "form")?.inner.primitive_projection()))
}

/// Coefficients of `q^0 .. q^n` as a comma separated list of rationals.
#[no_mangle]
pub unsafe extern "C" fn mldokit_form_qexp(
    f: *const MldokitForm,
    n: usize,
    out: *mut *mut c_char,
) -> MldokitStatus {
    guard(|| {
        let s = borrow(f, "form")?.inner.to_qseries(n);
        let coeffs: Vec<String> = (0..=n)
            .map(|j| {
                s.coeff_at(&mldokit::rational::q(j as i64))
                    .map(|c| mldokit::rational::format_q(&c))
                    .unwrap_or_else(|| "0".into())
            })
            .collect();
        put_string(out, coeffs.join(","))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_omega(m: u32, out: *mut *mut MldokitForm) -> MldokitStatus {
    guard(|| put_form(out, hsd::omega(m)))
}

/// Rankin-Cohen bracket `[F, G]_n` with the weights of the two forms.
#[no_mangle]
pub unsafe extern "C" fn mldokit_rc_bracket(
    f: *const MldokitForm,
    g: *const MldokitForm,
    n: u32,
    out: *mut *mut MldokitForm,
) -> MldokitStatus {
    guard(|| {
        let f = &borrow(f, "form")?.inner;
        let g = &borrow(g, "form")?.inner;
        let k = mldokit::rational::q(f.weight() as i64);
        let l = mldokit::rational::q(g.weight() as i64);
        put_form(out, hsd::rc_bracket(&k, &l, n, f, g))
    })
}

/// Parses an operator acting on weight `k` (a rational such as `"1/5"`).
#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_parse(
    src: *const c_char,
    k: *const c_char,
    out: *mut *mut MldokitOperator,
) -> MldokitStatus {
    guard(|| {
        let k = parse_q(text(k)?)?;
        let op = parse_operator(text(src)?, &k)?;
        check_out(out)?;
        *out = Box::into_raw(Box::new(MldokitOperator { inner: op }));
        Ok(())
    })
}

/// The operator `L_{F,k}` attached to a quasimodular form.
#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_from_form(
    f: *const MldokitForm,
    k: *const c_char,
    out: *mut *mut MldokitOperator,
) -> MldokitStatus {
    guard(|| {
        let k = parse_q(text(k)?)?;
        let op = mldo::l_from_qmf(&borrow(f, "form")?.inner, &k)?;
        check_out(out)?;
        *out = Box::into_raw(Box::new(MldokitOperator { inner: op }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_free(op: *mut MldokitOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_to_string(
    op: *const MldokitOperator,
    out: *mut *mut c_char,
) -> MldokitStatus {
    guard(|| put_string(out, borrow(op, "operator")?.inner.to_string()))
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_is_modular(
    op: *const MldokitOperator,
    out: *mut bool,
) -> MldokitStatus {
    guard(|| {
        let op = borrow(op, "operator")?;
        check_out(out)?;
        *out = op.inner.is_modular();
        Ok(())
    })
}

/// Coefficients in the basis `"d"`, `"serre"`, `"kk"` or `"vz"`, comma
/// separated.
#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_to_basis(
    op: *const MldokitOperator,
    basis: *const c_char,
    out: *mut *mut c_char,
) -> MldokitStatus {
    guard(|| {
        let tag: BasisTag = text(basis)?.parse()?;
        let b = borrow(op, "operator")?.inner.to_basis(tag)?;
        let parts: Vec<String> = b.iter().map(|f| f.to_string()).collect();
        put_string(out, parts.join(", "))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mldokit_operator_apply(
    op: *const MldokitOperator,
    f: *const MldokitForm,
    out: *mut *mut MldokitForm,
) -> MldokitStatus {
    guard(|| {
        let op = &borrow(op, "operator")?.inner;
        put_form(out, op.apply(&borrow(f, "form")?.inner))
    })
}

/// Dimension of the operators of weight `gain` and order at most `n`.
#[no_mangle]
pub unsafe extern "C" fn mldokit_dim_mldo(gain: u32, n: u32, out: *mut usize) -> MldokitStatus {
    guard(|| {
        check_out(out)?;
        *out = mldo::dim_mldo(gain, n)?;
        Ok(())
    })
}
