use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use brattice_ffi::*;

const GICAR: &str = include_str!("../../core/corpus/gicar.bd");
const UHF2: &str = include_str!("../../core/corpus/uhf2.bd");
const EX35: &str = include_str!("../../core/corpus/ex35.bd");

fn last_error() -> String {
    unsafe { CStr::from_ptr(br_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    br_string_free(s);
    out
}

fn parse(text: &str) -> *mut BrDiagram {
    let spec = CString::new(text).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { br_diagram_parse(spec.as_ptr(), &mut d) }, BrStatus::Ok, "{}", last_error());
    d
}

#[test]
fn tree_dump_and_census() {
    unsafe {
        let d = parse(GICAR);
        assert_eq!(br_diagram_validate(d, 6), BrStatus::Ok);
        let name = CString::new("alternating").unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(br_tree_build(d, name.as_ptr(), 6, &mut t), BrStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(br_tree_dump(t, &mut s), BrStatus::Ok);
        assert!(take(s).starts_with("tree v1"));
        assert_eq!(br_tree_census(t, &mut s), BrStatus::Ok);
        assert_eq!(take(s), "ends: countably infinite; condensation: 2; certified");
        br_tree_free(t);
        br_diagram_free(d);
    }
}

#[test]
fn membership_through_handles() {
    unsafe {
        let d = parse(UHF2);
        let (mut c, mut t) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(br_chain_build(d, 6, &mut c), BrStatus::Ok);
        assert_eq!(br_tree_build(d, ptr::null(), 6, &mut t), BrStatus::Ok);
        let mut member = false;
        let mut w = ptr::null_mut();
        let half = CString::new("depth=0: 1/4").unwrap();
        assert_eq!(br_member(c, t, half.as_ptr(), &mut member, &mut w), BrStatus::Ok, "{}", last_error());
        assert!(member);
        assert!(take(w).starts_with("witness depth="));
        let third = CString::new("depth=0: 1/3").unwrap();
        assert_eq!(br_member(c, t, third.as_ptr(), &mut member, &mut w), BrStatus::Ok);
        assert!(!member);
        assert!(w.is_null());
        let mut s = ptr::null_mut();
        assert_eq!(br_chain_dump(c, true, &mut s), BrStatus::Ok);
        assert!(brattice::k0::parse_chain(&take(s)).is_ok());
        br_chain_free(c);
        br_tree_free(t);
        br_diagram_free(d);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let bad = CString::new("bdspec v1\nshape: nonsense\n").unwrap();
        let mut d = ptr::null_mut();
        assert_eq!(br_diagram_parse(bad.as_ptr(), &mut d), BrStatus::Parse);
        assert!(d.is_null());
        assert!(last_error().contains("parse error"));

        assert_eq!(br_diagram_parse(ptr::null(), &mut d), BrStatus::NullArgument);
        assert_eq!(br_diagram_validate(ptr::null(), 3), BrStatus::NullArgument);

        let d = parse(EX35);
        let mut t = ptr::null_mut();
        assert_eq!(br_tree_build(d, ptr::null(), 1, &mut t), BrStatus::RankDeficient);
        let name = CString::new("sideways").unwrap();
        assert_eq!(br_tree_build(d, name.as_ptr(), 1, &mut t), BrStatus::Unsupported);
        assert!(last_error().contains("sideways"));
        br_diagram_free(d);

        let g = parse(GICAR);
        assert_eq!(br_diagram_validate(g, 2), BrStatus::Ok);
        assert!(last_error().is_empty());
        br_diagram_free(g);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        br_diagram_free(ptr::null_mut());
        br_tree_free(ptr::null_mut());
        br_chain_free(ptr::null_mut());
        br_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/brattice.h")).unwrap();
    for name in [
        "br_last_error",
        "br_string_free",
        "br_diagram_parse",
        "br_diagram_free",
        "br_diagram_validate",
        "br_tree_build",
        "br_tree_free",
        "br_tree_dump",
        "br_tree_census",
        "br_chain_build",
        "br_chain_free",
        "br_chain_dump",
        "br_member",
        "BR_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/brattice.h");
    match std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Wextra", "-x", "c"]).arg(&header).status()
    {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("cc not found; skipping header compile check"),
    }
}
