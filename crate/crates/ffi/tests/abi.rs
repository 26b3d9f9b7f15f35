use std::ffi::{CStr, CString};
use std::ptr;

use machine_space_ffi::*;

fn parse(text: &str) -> *mut MsMachine {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ms_parse(c.as_ptr(), &mut m) }, MsStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ms_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn parse_print_free() {
    let m = parse("(z0 | u0) & z1");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ms_machine_to_string(m, &mut s), MsStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "(z0 & z1) | (u0 & z1)");
        assert_eq!(ms_machine_branch_count(m), 2);
        assert_eq!(ms_machine_space(m), MsSpace::CantorDigits as i32);
        ms_string_free(s);
        ms_machine_free(m);
        ms_machine_free(ptr::null_mut());
        ms_string_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_status_and_message() {
    let c = CString::new("z0 &").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ms_parse(c.as_ptr(), &mut m) }, MsStatus::Syntax);
    assert!(m.is_null());
    assert!(last_error().contains("column 5"), "{}", last_error());
    assert_eq!(
        unsafe { ms_parse(ptr::null(), &mut m) },
        MsStatus::NullArgument
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { ms_parse(bad.as_ptr().cast(), &mut m) },
        MsStatus::InvalidUtf8
    );

    let m = parse("l\"0\"");
    let mut b = false;
    assert_eq!(
        unsafe { ms_covers(MsSpace::CantorDigits, m, &mut b) },
        MsStatus::Mismatch
    );
    let mut r = MsRunResult::default();
    let opts = MsRunOptions {
        fuel: 0,
        ..ms_default_options()
    };
    assert_eq!(
        unsafe { ms_forall(MsSpace::CantorPrefix, m, &opts, &mut r) },
        MsStatus::InvalidArgument
    );
    let opts = MsRunOptions {
        max_generator_index: 100,
        ..ms_default_options()
    };
    assert_eq!(
        unsafe { ms_forall(MsSpace::CantorPrefix, m, &opts, &mut r) },
        MsStatus::Limit
    );
    assert_eq!(
        unsafe { ms_covers(MsSpace::CantorPrefix, ptr::null(), &mut b) },
        MsStatus::NullArgument
    );
    unsafe { ms_machine_free(m) };
}

#[test]
fn covers_and_quantifiers() {
    let m = parse("z0 | u0");
    let mut b = false;
    let mut r = MsRunResult::default();
    unsafe {
        assert_eq!(ms_covers(MsSpace::CantorDigits, m, &mut b), MsStatus::Ok);
        assert!(b);
        assert_eq!(
            ms_forall(MsSpace::CantorDigits, m, ptr::null(), &mut r),
            MsStatus::Ok
        );
        assert!(r.halted && r.fuel_used > 0);
        ms_machine_free(m);
    }
    let m = parse("z0");
    let opts = MsRunOptions {
        fuel: 1000,
        ..ms_default_options()
    };
    unsafe {
        assert_eq!(
            ms_forall(MsSpace::CantorDigits, m, &opts, &mut r),
            MsStatus::Ok
        );
        assert!(!r.halted);
        assert_eq!(r.fuel_used, 1000);
        assert_eq!(
            ms_exists(MsSpace::CantorDigits, m, &opts, &mut r),
            MsStatus::Ok
        );
        assert!(r.halted);
        ms_machine_free(m);
    }
    let m = parse("i(0,1/2) | i(1/2,1)");
    unsafe {
        assert_eq!(ms_covers(MsSpace::Interval, m, &mut b), MsStatus::Ok);
        assert!(!b);
        ms_machine_free(m);
    }
}

#[test]
fn normalize_and_search() {
    let m = parse("z0 | (z0 & u1)");
    let mut n = ptr::null_mut();
    let mut word = ptr::null_mut();
    let mut status = MsSearchStatus::Undecided;
    unsafe {
        assert_eq!(ms_normalize(m, &mut n), MsStatus::Ok);
        assert_eq!(ms_machine_branch_count(n), 1);
        assert_eq!(
            ms_search(
                MsSpace::CantorDigits,
                m,
                3,
                u64::MAX,
                &mut status,
                &mut word
            ),
            MsStatus::Ok
        );
        assert_eq!(status, MsSearchStatus::Found);
        assert_eq!(CStr::from_ptr(word).to_str().unwrap(), "000");
        ms_string_free(word);
        ms_machine_free(n);
        ms_machine_free(m);
    }
    let m = parse("l\"11\" & l\"10\"");
    unsafe {
        assert_eq!(
            ms_search(
                MsSpace::CantorPrefix,
                m,
                -1,
                u64::MAX,
                &mut status,
                &mut word
            ),
            MsStatus::Ok
        );
        assert_eq!(status, MsSearchStatus::NoWitness);
        assert!(word.is_null());
        ms_machine_free(m);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/machine_space.h");
    for name in [
        "ms_last_error",
        "ms_default_options",
        "ms_parse",
        "ms_machine_free",
        "ms_machine_to_string",
        "ms_string_free",
        "ms_machine_branch_count",
        "ms_machine_space",
        "ms_normalize",
        "ms_covers",
        "ms_forall",
        "ms_exists",
        "ms_search",
        "typedef struct MsMachine MsMachine;",
        "MS_STATUS_SYNTAX = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
