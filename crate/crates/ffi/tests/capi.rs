use std::ffi::{CStr, CString};
use std::ptr;

use lotteryforge_ffi::*;

const FANO: [u32; 21] = [0, 1, 2, 0, 3, 4, 0, 5, 6, 1, 3, 5, 1, 4, 6, 2, 3, 6, 2, 4, 5];

fn params(n: u32, k: u32, r: u32, p: u32) -> LfParams {
    LfParams { n, k, r, p }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lf_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn system_round_trip() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(lf_system_new(7, 3, FANO.as_ptr(), 7, &mut sys), LfStatus::Ok);
        assert_eq!((lf_system_n(sys), lf_system_k(sys), lf_system_len(sys)), (7, 3, 7));
        let mut block = [0u32; 3];
        assert_eq!(lf_system_block(sys, 3, block.as_mut_ptr(), 3), LfStatus::Ok);
        assert_eq!(block, [1, 3, 5]);
        assert_eq!(lf_system_block(sys, 7, block.as_mut_ptr(), 3), LfStatus::Parameter);
        assert_eq!(lf_system_block(sys, 0, block.as_mut_ptr(), 2), LfStatus::BufferTooSmall);

        let mut text = ptr::null_mut();
        assert_eq!(lf_system_to_text(sys, &mut text), LfStatus::Ok);
        let mut parsed = ptr::null_mut();
        assert_eq!(lf_system_parse(text, &mut parsed), LfStatus::Ok);
        assert_eq!(lf_system_len(parsed), 7);
        assert!(CStr::from_ptr(text).to_str().unwrap().starts_with("lottery n=7 k=3"));
        lf_string_free(text);
        lf_system_free(parsed);
        lf_system_free(sys);
    }
}

#[test]
fn verdicts_and_witnesses() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(lf_system_new(7, 3, FANO.as_ptr(), 7, &mut sys), LfStatus::Ok);
        let mut v = LfVerdict::default();
        let mut w = [0u32; 8];
        assert_eq!(lf_verify_lottery(sys, params(7, 3, 2, 2), w.as_mut_ptr(), 8, &mut v), LfStatus::Ok);
        assert!(v.ok);
        assert_eq!(lf_verify_covering(sys, 2, w.as_mut_ptr(), 8, &mut v), LfStatus::Ok);
        assert!(v.ok);
        assert_eq!(lf_verify_covering(sys, 3, w.as_mut_ptr(), 8, &mut v), LfStatus::Ok);
        assert!(!v.ok);
        assert_eq!(&w[..v.witness_len], &[0, 1, 3]);
        lf_system_free(sys);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(lf_gdd(6, 4, 2, &mut sys), LfStatus::Precondition);
        assert!(sys.is_null());
        assert!(last_error().contains("mod 6"), "{}", last_error());

        let bad = CString::new("lottery n=4 k=2\n1 0\n").unwrap();
        assert_eq!(lf_system_parse(bad.as_ptr(), &mut sys), LfStatus::Parse);
        assert!(last_error().contains("line 2"), "{}", last_error());

        assert_eq!(lf_system_new(3, 2, [0u32, 5].as_ptr(), 1, &mut sys), LfStatus::Structural);
        assert_eq!(lf_system_parse(ptr::null(), &mut sys), LfStatus::NullPointer);
        let mut v = LfVerdict::default();
        assert_eq!(lf_verify_lottery(ptr::null(), params(4, 2, 2, 2), ptr::null_mut(), 0, &mut v), LfStatus::NullPointer);
        lf_system_free(ptr::null_mut());
    }
}

#[test]
fn constructions() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(lf_gdd(7, 4, 2, &mut sys), LfStatus::Ok);
        assert_eq!(lf_system_len(sys), 49);
        lf_system_free(sys);

        assert_eq!(lf_greedy_covering(4, 3, 2, &mut sys), LfStatus::Ok);
        assert_eq!(lf_system_len(sys), 3);
        lf_system_free(sys);

        assert_eq!(lf_patches(4, 4, 3, 2, &mut sys), LfStatus::Ok);
        assert_eq!(lf_system_len(sys), 12);
        lf_system_free(sys);

        let mut base = ptr::null_mut();
        assert_eq!(lf_system_new(4, 3, [0u32, 1, 2].as_ptr(), 1, &mut base), LfStatus::Ok);
        let mut rep = LfCompositionReport::default();
        assert_eq!(lf_compose(base, params(4, 3, 2, 3), 4, &mut sys, &mut rep), LfStatus::Ok);
        assert_eq!((rep.size_a, rep.size_b, rep.total), (16, 12, 28));
        assert_eq!((rep.density_num, rep.density_den), (7, 30));
        assert!(rep.verified);
        assert_eq!(lf_system_n(sys), 16);
        lf_system_free(sys);
        lf_system_free(base);

        let mut s = ptr::null_mut();
        assert_eq!(lf_m_lcm(5, 3, &mut s), LfStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "48");
        lf_string_free(s);
    }
}

#[test]
fn exact_solver() {
    unsafe {
        let mut bound = LfBound::default();
        let mut cert = ptr::null_mut();
        assert_eq!(lf_exact_min_lottery(params(7, 3, 2, 2), 0, false, &mut bound, &mut cert), LfStatus::Ok);
        assert!(bound.complete);
        assert_eq!((bound.lower, bound.upper), (7, 7));
        assert_eq!(lf_system_len(cert), 7);
        lf_system_free(cert);

        assert_eq!(lf_exact_min_lottery(params(11, 3, 2, 3), 10, false, &mut bound, ptr::null_mut()), LfStatus::Ok);
        assert!(!bound.complete);
        assert!(bound.lower < bound.upper);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lotteryforge.h")).unwrap();
    for name in [
        "lf_last_error",
        "lf_system_new",
        "lf_system_free",
        "lf_system_block",
        "lf_system_parse",
        "lf_verify_lottery",
        "lf_gdd",
        "lf_compose",
        "lf_exact_min_lottery",
        "lf_m_lcm",
        "LF_STATUS_OK",
        "typedef struct LfSystem LfSystem",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
