//! Exercises the C ABI through its public symbols: handle lifecycles, error
//! codes on bad pointers, and a round trip through the JSON format.

use std::ffi::CString;
use std::ptr;

use thetadef_ffi::*;

#[test]
fn generator_product_carries_the_phase() {
    unsafe {
        let u = tdf_element_u();
        let v = tdf_element_v();
        let mut uv = ptr::null_mut();
        let mut vu = ptr::null_mut();
        assert_eq!(tdf_deformed_product(u, v, 0.25, &mut uv), TdfStatus::Ok);
        assert_eq!(tdf_deformed_product(v, u, 0.25, &mut vu), TdfStatus::Ok);
        let (mut re1, mut im1) = (0.0, 0.0);
        let (mut re2, mut im2) = (0.0, 0.0);
        assert_eq!(tdf_element_coeff(uv, 1, 1, &mut re1, &mut im1), TdfStatus::Ok);
        assert_eq!(tdf_element_coeff(vu, 1, 1, &mut re2, &mut im2), TdfStatus::Ok);
        // uv = e^{pi i / 4}, vu = e^{-pi i / 4}: the relation phase apart.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((re1 - h).abs() < 1e-15 && (im1 - h).abs() < 1e-15);
        assert!((re2 - h).abs() < 1e-15 && (im2 + h).abs() < 1e-15);
        for e in [u, v, uv, vu] {
            tdf_element_free(e);
        }
    }
}

#[test]
fn star_and_norm_work_through_handles() {
    unsafe {
        let a = tdf_element_new();
        assert_eq!(tdf_element_add_term(a, 2, -1, 0.6, -0.8), TdfStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(tdf_element_star(a, &mut s), TdfStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tdf_element_coeff(s, -2, 1, &mut re, &mut im), TdfStatus::Ok);
        assert_eq!((re, im), (0.6, 0.8));
        let mut norm = 0.0;
        assert_eq!(tdf_element_norm_inf(s, &mut norm), TdfStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-15);
        let mut count = 0usize;
        assert_eq!(tdf_element_term_count(s, &mut count), TdfStatus::Ok);
        assert_eq!(count, 1);
        tdf_element_free(a);
        tdf_element_free(s);
    }
}

#[test]
fn null_pointers_are_reported_not_dereferenced() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            tdf_deformed_product(ptr::null(), ptr::null(), 0.3, &mut out),
            TdfStatus::NullPointer
        );
        assert_eq!(
            tdf_element_add_term(ptr::null_mut(), 0, 0, 1.0, 0.0),
            TdfStatus::NullPointer
        );
        let a = tdf_element_one();
        assert_eq!(
            tdf_deformed_product(a, a, f64::NAN, &mut out),
            TdfStatus::InvalidArgument
        );
        let mut re = 0.0;
        assert_eq!(
            tdf_element_coeff(a, 0, 0, &mut re, ptr::null_mut()),
            TdfStatus::NullPointer
        );
        tdf_element_free(a);
        // Free of null is a safe no-op.
        tdf_element_free(ptr::null_mut());
        tdf_string_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip_preserves_terms() {
    unsafe {
        let a = tdf_element_new();
        tdf_element_add_term(a, 1, 2, 0.25, -0.5);
        tdf_element_add_term(a, -3, 0, 1.5, 0.0);
        let mut text = ptr::null_mut();
        assert_eq!(tdf_element_to_json(a, &mut text), TdfStatus::Ok);
        let mut b = ptr::null_mut();
        assert_eq!(tdf_element_from_json(text, &mut b), TdfStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        tdf_element_coeff(b, 1, 2, &mut re, &mut im);
        assert_eq!((re, im), (0.25, -0.5));
        tdf_element_coeff(b, -3, 0, &mut re, &mut im);
        assert_eq!((re, im), (1.5, 0.0));
        tdf_string_free(text);
        tdf_element_free(a);
        tdf_element_free(b);

        let bad = CString::new("not json").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(
            tdf_element_from_json(bad.as_ptr(), &mut out),
            TdfStatus::ParseFailed
        );
    }
}

#[test]
fn bump_projection_pairs_to_theta() {
    unsafe {
        let theta = 0.3;
        let mut p = ptr::null_mut();
        assert_eq!(tdf_powers_rieffel(theta, 64, &mut p), TdfStatus::Ok);
        let (mut re, mut im, mut dist) = (0.0, 0.0, 0.0);
        assert_eq!(
            tdf_trace_pairing(p, theta, &mut re, &mut im, &mut dist),
            TdfStatus::Ok
        );
        assert!((re - theta).abs() < 1e-6, "pairing {re}");
        assert!(im.abs() < 1e-9);
        // The unit generator is not a projection: the pairing refuses it.
        let u = tdf_element_u();
        assert_eq!(
            tdf_trace_pairing(u, theta, &mut re, &mut im, &mut dist),
            TdfStatus::ComputationFailed
        );
        assert_eq!(
            tdf_powers_rieffel(1.7, 64, &mut p),
            TdfStatus::InvalidArgument
        );
        tdf_element_free(u);
        tdf_element_free(p);
    }
}

#[test]
fn header_exports_the_full_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/thetadef.h"
    ))
    .expect("generated header present");
    for symbol in [
        "tdf_element_new",
        "tdf_element_one",
        "tdf_element_u",
        "tdf_element_v",
        "tdf_element_clone",
        "tdf_element_add_term",
        "tdf_element_coeff",
        "tdf_element_term_count",
        "tdf_element_norm_inf",
        "tdf_element_add",
        "tdf_element_star",
        "tdf_deformed_product",
        "tdf_trace",
        "tdf_powers_rieffel",
        "tdf_trace_pairing",
        "tdf_element_from_json",
        "tdf_element_to_json",
        "tdf_string_free",
        "tdf_element_free",
        "TdfStatus",
    ] {
        assert!(header.contains(symbol), "{symbol} missing from header");
    }
    // Handles stay opaque: the struct body is never emitted.
    assert!(header.contains("typedef struct TdfElement TdfElement;"));
}

#[test]
fn clone_is_independent() {
    unsafe {
        let a = tdf_element_u();
        let b = tdf_element_clone(a);
        tdf_element_add_term(a, 5, 5, 1.0, 0.0);
        let mut count = 0usize;
        tdf_element_term_count(b, &mut count);
        assert_eq!(count, 1);
        let mut summed = ptr::null_mut();
        assert_eq!(tdf_element_add(a, b, &mut summed), TdfStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        tdf_element_coeff(summed, 1, 0, &mut re, &mut im);
        assert_eq!(re, 2.0);
        let mut tr = (0.0, 0.0);
        assert_eq!(tdf_trace(summed, &mut tr.0, &mut tr.1), TdfStatus::Ok);
        assert_eq!(tr, (0.0, 0.0));
        for e in [a, b, summed] {
            tdf_element_free(e);
        }
        assert!(tdf_element_clone(ptr::null()).is_null());
    }
}
