//! C ABI surface for the thetadef toolkit.
//!
//! Handles are opaque pointers owned by the library; every constructor has a
//! matching `_free`, and all fallible calls return a [`TdfStatus`] with
//! results written through out-pointers. Strings returned by the library
//! must be released with [`tdf_string_free`].

use std::ffi::{c_char, CStr, CString};

use thetadef::num_complex::Complex64;
use thetadef::{
    deformed_product, io, k0_pairing, powers_rieffel, star, trace_tau, BumpProfile,
    CyclicCochain, GradedElement, MatrixGradedElement, Weight,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TdfStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments failed validation (dimensions, cutoffs, tolerances).
    InvalidArgument = 2,
    /// Input text could not be parsed.
    ParseFailed = 3,
    /// The computation itself reported an error.
    ComputationFailed = 4,
}

/// Opaque handle to a weight-expansion element.
pub struct TdfElement(GradedElement);

/// Creates an empty (zero) element. Never fails.
#[no_mangle]
pub extern "C" fn tdf_element_new() -> *mut TdfElement {
    Box::into_raw(Box::new(TdfElement(GradedElement::zero())))
}

/// Creates the multiplicative unit.
#[no_mangle]
pub extern "C" fn tdf_element_one() -> *mut TdfElement {
    Box::into_raw(Box::new(TdfElement(GradedElement::one())))
}

/// Creates the first generator (weight (1, 0)).
#[no_mangle]
pub extern "C" fn tdf_element_u() -> *mut TdfElement {
    Box::into_raw(Box::new(TdfElement(GradedElement::u())))
}

/// Creates the second generator (weight (0, 1)).
#[no_mangle]
pub extern "C" fn tdf_element_v() -> *mut TdfElement {
    Box::into_raw(Box::new(TdfElement(GradedElement::v())))
}

/// Deep-copies an element into a fresh handle.
///
/// # Safety
/// `elem` must be a live pointer from this library.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_clone(elem: *const TdfElement) -> *mut TdfElement {
    match elem.as_ref() {
        Some(e) => Box::into_raw(Box::new(TdfElement(e.0.clone()))),
        None => std::ptr::null_mut(),
    }
}

/// Adds `re + i*im` at weight `(m, n)`.
///
/// # Safety
/// `elem` must be a live pointer from `tdf_element_new` (or null, which is
/// reported as an error).
#[no_mangle]
pub unsafe extern "C" fn tdf_element_add_term(
    elem: *mut TdfElement,
    m: i32,
    n: i32,
    re: f64,
    im: f64,
) -> TdfStatus {
    let Some(elem) = elem.as_mut() else {
        return TdfStatus::NullPointer;
    };
    if !re.is_finite() || !im.is_finite() {
        return TdfStatus::InvalidArgument;
    }
    elem.0.add_term(Weight::new(m, n), Complex64::new(re, im));
    TdfStatus::Ok
}

/// Reads the coefficient at weight `(m, n)` (zero when absent).
///
/// # Safety
/// `elem` must be live; `re`, `im` must be valid output locations.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_coeff(
    elem: *const TdfElement,
    m: i32,
    n: i32,
    re: *mut f64,
    im: *mut f64,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if re.is_null() || im.is_null() {
        return TdfStatus::NullPointer;
    }
    let c = elem.0.coeff(Weight::new(m, n));
    *re = c.re;
    *im = c.im;
    TdfStatus::Ok
}

/// Number of stored terms.
///
/// # Safety
/// `elem` must be live; `count` must be a valid output location.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_term_count(
    elem: *const TdfElement,
    count: *mut usize,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if count.is_null() {
        return TdfStatus::NullPointer;
    }
    *count = elem.0.iter_terms().count();
    TdfStatus::Ok
}

/// Largest coefficient magnitude.
///
/// # Safety
/// `elem` must be live; `out` must be a valid output location.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_norm_inf(
    elem: *const TdfElement,
    out: *mut f64,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    *out = elem.0.norm_inf();
    TdfStatus::Ok
}

/// Sum `a + b` into a fresh handle.
///
/// # Safety
/// `a`, `b` must be live element pointers and `out` a valid location for the
/// result pointer.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_add(
    a: *const TdfElement,
    b: *const TdfElement,
    out: *mut *mut TdfElement,
) -> TdfStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return TdfStatus::NullPointer;
    };
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(TdfElement(a.0.add(&b.0))));
    TdfStatus::Ok
}

/// Adjoint (conjugate at the opposite weight) into a fresh handle.
///
/// # Safety
/// `elem` must be live and `out` a valid location for the result pointer.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_star(
    elem: *const TdfElement,
    out: *mut *mut TdfElement,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(TdfElement(star(&elem.0))));
    TdfStatus::Ok
}

/// Computes the deformed product `a ∗_θ b` into a fresh handle.
///
/// # Safety
/// `a`, `b` must be live element pointers and `out` a valid location for the
/// result pointer.
#[no_mangle]
pub unsafe extern "C" fn tdf_deformed_product(
    a: *const TdfElement,
    b: *const TdfElement,
    theta: f64,
    out: *mut *mut TdfElement,
) -> TdfStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
        return TdfStatus::NullPointer;
    };
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    if !theta.is_finite() {
        return TdfStatus::InvalidArgument;
    }
    let p = deformed_product(&a.0, &b.0, theta);
    *out = Box::into_raw(Box::new(TdfElement(p)));
    TdfStatus::Ok
}

/// Canonical trace (the weight-(0,0) coefficient).
///
/// # Safety
/// `elem` must be live; `re`, `im` must be valid output locations.
#[no_mangle]
pub unsafe extern "C" fn tdf_trace(
    elem: *const TdfElement,
    re: *mut f64,
    im: *mut f64,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if re.is_null() || im.is_null() {
        return TdfStatus::NullPointer;
    }
    let t = trace_tau(&elem.0);
    *re = t.re;
    *im = t.im;
    TdfStatus::Ok
}

/// Builds the bump projection of trace `theta` at the given Fourier cutoff.
///
/// # Safety
/// `out` must be a valid location for the result pointer.
#[no_mangle]
pub unsafe extern "C" fn tdf_powers_rieffel(
    theta: f64,
    fourier_cutoff: u32,
    out: *mut *mut TdfElement,
) -> TdfStatus {
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    if !(theta > 0.0 && theta < 1.0) {
        return TdfStatus::InvalidArgument;
    }
    match powers_rieffel(theta, &BumpProfile::mollified(fourier_cutoff)) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(TdfElement(p.entry(0, 0).clone())));
            TdfStatus::Ok
        }
        Err(_) => TdfStatus::ComputationFailed,
    }
}

/// Pairs the canonical trace with a projection at `theta`; writes the
/// normalized value and its distance to the nearest integer.
///
/// # Safety
/// `p` must be live; the three output pointers must be valid locations.
#[no_mangle]
pub unsafe extern "C" fn tdf_trace_pairing(
    p: *const TdfElement,
    theta: f64,
    value_re: *mut f64,
    value_im: *mut f64,
    integer_distance: *mut f64,
) -> TdfStatus {
    let Some(p) = p.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if value_re.is_null() || value_im.is_null() || integer_distance.is_null() {
        return TdfStatus::NullPointer;
    }
    if !theta.is_finite() {
        return TdfStatus::InvalidArgument;
    }
    let mat = MatrixGradedElement::from_scalar(p.0.clone());
    match k0_pairing(&CyclicCochain::trace(theta), &mat, theta) {
        Ok(report) => {
            *value_re = report.normalized.re;
            *value_im = report.normalized.im;
            *integer_distance = report.integer_distance;
            TdfStatus::Ok
        }
        Err(_) => TdfStatus::ComputationFailed,
    }
}

/// Parses an element from its JSON file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid result location.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_from_json(
    json: *const c_char,
    out: *mut *mut TdfElement,
) -> TdfStatus {
    if json.is_null() || out.is_null() {
        return TdfStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return TdfStatus::ParseFailed;
    };
    match io::parse_element(text) {
        Ok(e) => {
            *out = Box::into_raw(Box::new(TdfElement(e)));
            TdfStatus::Ok
        }
        Err(_) => TdfStatus::ParseFailed,
    }
}

/// Renders an element to its JSON file format. The returned string must be
/// released with [`tdf_string_free`].
///
/// # Safety
/// `elem` must be live; `out` a valid location for the string pointer.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_to_json(
    elem: *const TdfElement,
    out: *mut *mut c_char,
) -> TdfStatus {
    let Some(elem) = elem.as_ref() else {
        return TdfStatus::NullPointer;
    };
    if out.is_null() {
        return TdfStatus::NullPointer;
    }
    let text = io::render_element(&elem.0);
    // JSON output never contains interior NULs.
    let c = CString::new(text).expect("no interior NUL");
    *out = c.into_raw();
    TdfStatus::Ok
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tdf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees an element handle. Null is a no-op.
///
/// # Safety
/// `elem` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tdf_element_free(elem: *mut TdfElement) {
    if !elem.is_null() {
        drop(Box::from_raw(elem));
    }
}
