use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use groupcount_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { gc_string_free(p) };
    s
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { gc_last_error(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    assert_eq!(s.len(), n.min(255));
    s
}

#[test]
fn classify_phi_psi() {
    let mut class = GcNumberClass::Cyclic;
    assert_eq!(unsafe { gc_classify(8, &mut class) }, GcStatus::Ok);
    assert_eq!(class, GcNumberClass::StrictlyNilpotent);
    assert_eq!(unsafe { gc_classify(45, &mut class) }, GcStatus::Ok);
    assert_eq!(class, GcNumberClass::StrictlyAbelian);
    assert_eq!(unsafe { gc_classify(6, &mut class) }, GcStatus::Ok);
    assert_eq!(class, GcNumberClass::NotNilpotent);

    let mut phi = 0;
    assert_eq!(unsafe { gc_euler_phi(12, &mut phi) }, GcStatus::Ok);
    assert_eq!(phi, 4);

    let mut psi = ptr::null_mut();
    assert_eq!(unsafe { gc_psi_string(45, &mut psi) }, GcStatus::Ok);
    assert_eq!(take_string(psi), "64");
}

#[test]
fn errors_carry_status_and_message() {
    let mut class = GcNumberClass::Cyclic;
    assert_eq!(unsafe { gc_classify(0, &mut class) }, GcStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { gc_classify(5, ptr::null_mut()) }, GcStatus::NullPointer);
    assert!(last_error().contains("class_out"));
    let mut v = 0.0;
    assert_eq!(unsafe { gc_gamma_derivative(1, 3, &mut v) }, GcStatus::Domain);
    assert_eq!(unsafe { gc_estimate(GcEstimate::Cyclic, 10.0, 0, f64::NAN, &mut v) }, GcStatus::Domain);
    // truncation keeps the terminator
    let mut tiny = [1 as c_char; 4];
    let full = unsafe { gc_last_error(tiny.as_mut_ptr(), tiny.len()) };
    assert!(full > 3);
    assert_eq!(tiny[3], 0);
}

#[test]
fn spf_handle() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { gc_spf_new(10_000, &mut t) }, GcStatus::Ok);
    let mut spf = 0;
    assert_eq!(unsafe { gc_spf_smallest_factor(t, 9797, &mut spf) }, GcStatus::Ok);
    assert_eq!(spf, 97);
    assert_eq!(unsafe { gc_spf_smallest_factor(t, 20_000, &mut spf) }, GcStatus::Domain);
    let mut class = GcNumberClass::Cyclic;
    assert_eq!(unsafe { gc_spf_classify(t, 99, &mut class) }, GcStatus::Ok);
    assert_eq!(class, GcNumberClass::StrictlyAbelian);
    unsafe { gc_spf_free(t) };
    unsafe { gc_spf_free(ptr::null_mut()) };
    assert_eq!(unsafe { gc_spf_smallest_factor(ptr::null(), 2, &mut spf) }, GcStatus::NullPointer);
}

#[test]
fn counts_and_series() {
    let mut c = GcClassCounts::default();
    assert_eq!(unsafe { gc_count(100, 1, &mut c) }, GcStatus::Ok);
    assert_eq!((c.cyclic, c.strictly_abelian, c.strictly_nilpotent, c.total), (37, 6, 6, 100));

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { gc_series_new(GcFamily::LowerB, 3, &mut s) }, GcStatus::Ok);
    let mut order = 0;
    assert_eq!(unsafe { gc_series_order(s, &mut order) }, GcStatus::Ok);
    assert_eq!(order, 3);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { gc_series_symbolic(s, 2, &mut text) }, GcStatus::Ok);
    assert_eq!(take_string(text), "3*gamma^2 + 1/4*pi^2");
    assert_eq!(unsafe { gc_series_numeric(s, 1, 12, &mut text) }, GcStatus::Ok);
    assert_eq!(take_string(text), "-1.15443132980");
    assert_eq!(unsafe { gc_series_symbolic(s, 4, &mut text) }, GcStatus::Domain);
    assert_eq!(unsafe { gc_series_numeric(s, 1, 80, &mut text) }, GcStatus::Resource);
    unsafe { gc_series_free(s) };
    assert_eq!(unsafe { gc_series_new(GcFamily::LowerD, 13, &mut s) }, GcStatus::Domain);

    let mut v = 0.0;
    assert_eq!(unsafe { gc_gamma_derivative(1, 2, &mut v) }, GcStatus::Ok);
    assert!((v - 0.422_784_335_098_467_1).abs() < 1e-13);
    assert_eq!(unsafe { gc_estimate(GcEstimate::StrictlyAbelian, 1e9, 1, 15.0, &mut v) }, GcStatus::Ok);
    assert!(v > 0.0);
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/groupcount.h")).unwrap();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn "))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!(" {name}(")), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let target = crate_dir().join("../../target/debug");
    let lib = target.join("libgroupcount_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let c_src = dir.path().join("smoke.c");
    std::fs::write(
        &c_src,
        r#"
#include <stdio.h>
#include <string.h>
#include "groupcount.h"
int main(void) {
    enum GcNumberClass c;
    if (gc_classify(8, &c) != GC_STATUS_OK || c != GC_NUMBER_CLASS_STRICTLY_NILPOTENT) return 1;
    char *psi = NULL;
    if (gc_psi_string(8, &psi) != GC_STATUS_OK || strcmp(psi, "21") != 0) return 2;
    gc_string_free(psi);
    struct GcSeries *s = NULL;
    if (gc_series_new(GC_FAMILY_LOWER_C, 2, &s) != GC_STATUS_OK) return 3;
    char *text = NULL;
    if (gc_series_symbolic(s, 2, &text) != GC_STATUS_OK) return 4;
    printf("%s\n", text);
    gc_string_free(text);
    gc_series_free(s);
    if (gc_classify(0, &c) != GC_STATUS_DOMAIN) return 5;
    char msg[128];
    if (gc_last_error(msg, sizeof msg) == 0) return 6;
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&c_src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "gamma^2 + 1/12*pi^2\n");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
