use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use einfty_ffi::*;
use serde_json::Value;

const INVOLUTION: &str = include_str!("../../core/tests/fixtures/involution.json");
const CUP1: &str = include_str!("../../core/tests/fixtures/cup1.json");
const RP2: &str = include_str!("../../core/tests/fixtures/rp2.json");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    einfty_string_free(p);
    s
}

unsafe fn last_error() -> String {
    let p = einfty_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn element(json: &str, ring: EinftyRing) -> *mut EinftyElement {
    let mut x = ptr::null_mut();
    assert_eq!(einfty_element_from_json(c(json).as_ptr(), ring, &mut x), EinftyStatus::Ok);
    x
}

#[test]
fn involution_vanishes_only_with_surjection_rules() {
    unsafe {
        let x = element(INVOLUTION, EinftyRing::Mod2);
        for (scope, zero) in [(EinftyScope::S, 0), (EinftyScope::MS, 1)] {
            let mut y = ptr::null_mut();
            assert_eq!(einfty_element_reduce(x, scope, &mut y), EinftyStatus::Ok);
            let mut z = -1;
            assert_eq!(einfty_element_is_zero(y, &mut z), EinftyStatus::Ok);
            assert_eq!(z, zero);
            einfty_element_free(y);
        }
        einfty_element_free(x);
    }
}

#[test]
fn cup_one_on_a_triangle() {
    unsafe {
        let g = element(CUP1, EinftyRing::Integers);
        let mut x = ptr::null_mut();
        assert_eq!(einfty_sset_standard(2, &mut x), EinftyStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(einfty_coact(g, x, c("[0,1,2]").as_ptr(), &mut out), EinftyStatus::Ok);
        let v: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["terms"].as_array().unwrap().len(), 3);
        einfty_sset_free(x);
        einfty_element_free(g);
    }
}

#[test]
fn composition_and_differential() {
    unsafe {
        let g = element(CUP1, EinftyRing::Integers);
        let mut d = ptr::null_mut();
        assert_eq!(einfty_element_differential(g, &mut d), EinftyStatus::Ok);
        let mut dd = ptr::null_mut();
        assert_eq!(einfty_element_differential(d, &mut dd), EinftyStatus::Ok);
        let mut z = 0;
        einfty_element_is_zero(dd, &mut z);
        assert_eq!(z, 1);
        // a (1, 2) term cannot sit on top of another (1, 2) term
        let mut bad = ptr::null_mut();
        assert_eq!(einfty_element_compose(g, g, &mut bad), EinftyStatus::SemanticError);
        assert!(bad.is_null());
        assert!(last_error().contains("biarity"));
        let mut t = ptr::null_mut();
        assert_eq!(einfty_element_tensor(g, g, &mut t), EinftyStatus::Ok);
        let mut json = ptr::null_mut();
        einfty_element_to_json(t, &mut json);
        let v: Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!((v["n"].as_u64(), v["m"].as_u64()), (Some(2), Some(4)));
        for p in [g, d, dd, t] {
            einfty_element_free(p);
        }
    }
}

#[test]
fn steenrod_on_projective_plane() {
    unsafe {
        let mut x = ptr::null_mut();
        assert_eq!(einfty_sset_from_json(c(RP2).as_ptr(), &mut x), EinftyStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(einfty_steenrod(x, 1, &mut out), EinftyStatus::Ok);
        let v: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["tables"][1]["matrix"], serde_json::json!([[1]]));
        einfty_sset_free(x);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut x = ptr::null_mut();
        assert_eq!(einfty_element_from_json(c("{ nope").as_ptr(), EinftyRing::Integers, &mut x), EinftyStatus::ParseError);
        assert!(x.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            einfty_element_from_json(ptr::null(), EinftyRing::Integers, &mut x),
            EinftyStatus::NullArgument
        );
        let bad_utf8 = [0xffu8, 0];
        assert_eq!(
            einfty_element_from_json(bad_utf8.as_ptr().cast(), EinftyRing::Integers, &mut x),
            EinftyStatus::InvalidUtf8
        );
        let mut out = ptr::null_mut();
        assert_eq!(einfty_verify(c("nope").as_ptr(), 0, &mut out), EinftyStatus::SemanticError);
        // freeing null is a no-op
        einfty_element_free(ptr::null_mut());
        einfty_sset_free(ptr::null_mut());
        einfty_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_reports_status() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(einfty_verify(c("leibniz_witness").as_ptr(), 7, &mut out), EinftyStatus::Ok);
        let v: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(einfty_verify(c("cup_coherence").as_ptr(), 7, &mut out), EinftyStatus::VerificationFailed);
        let v: Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["status"], "fail");
        assert!(!CStr::from_ptr(einfty_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("einfty.h").exists());
    let dir = std::env::temp_dir().join(format!("einfty-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"einfty.h\"\n\
         int main(void) {\n\
           EinftySset *x = 0;\n\
           char *out = 0;\n\
           if (einfty_sset_standard(1, &x) != EINFTY_STATUS_OK) return 1;\n\
           if (einfty_steenrod(x, 0, &out) != EINFTY_STATUS_OK) return 2;\n\
           einfty_string_free(out);\n\
           einfty_sset_free(x);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    for (compiler, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let status = Command::new(compiler)
            .args(&extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(&include)
            .arg(&src)
            .status()
            .expect("a C compiler on PATH");
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_and_runs() {
    // test binaries live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let libdir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    assert!(libdir.join("libeinfty_ffi.so").exists() || libdir.join("libeinfty_ffi.dylib").exists(), "no shared library in {}", libdir.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = std::env::temp_dir().join(format!("einfty-link-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "einfty.h"

int main(void) {
  EinftySset *x = 0;
  EinftyElement *g = 0;
  char *out = 0;
  if (einfty_sset_standard(1, &x) != EINFTY_STATUS_OK) return 1;
  if (einfty_element_from_json("{\"n\":1,\"m\":1,\"vertices\":[],\"wires\":[[[\"in\",1],[\"out\",1]]]}",
                               EINFTY_RING_INTEGERS, &g) != EINFTY_STATUS_OK) return 2;
  if (einfty_coact(g, x, "[0,1]", &out) != EINFTY_STATUS_OK) return 3;
  puts(out);
  einfty_string_free(out);
  if (einfty_element_from_json("[", EINFTY_RING_INTEGERS, &g) != EINFTY_STATUS_PARSE_ERROR) return 4;
  if (strlen(einfty_last_error()) == 0) return 5;
  einfty_element_free(g);
  einfty_sset_free(x);
  return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("main");
    let status = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-L")
        .arg(&libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .arg("-leinfty_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status);
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&run.stdout).trim()).unwrap();
    assert_eq!(v["terms"][0][0], serde_json::json!(["[0,1]"]));
}
