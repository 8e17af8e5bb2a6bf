use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use lbm_ffi::*;

const XOR: &str = "(x ^ y) <-> z\n";

fn compile(src: &str) -> *mut LbmModel {
    let kb = CString::new(src).unwrap();
    let mut m = ptr::null_mut();
    let status = unsafe { lbm_model_compile(kb.as_ptr(), 0.5, &mut m) };
    assert_eq!(status, LbmStatus::Ok, "{}", last_error());
    m
}

fn last_error() -> String {
    let p = lbm_last_error();
    if p.is_null() {
        return String::new();
    }
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rows(s: *const LbmSolutions, n: usize) -> Vec<(Vec<u8>, f64, f64)> {
    (0..unsafe { lbm_solutions_len(s) })
        .map(|k| {
            let mut bits = vec![0u8; n];
            let (mut fe, mut p) = (0.0, 0.0);
            let st = unsafe { lbm_solutions_get(s, k, bits.as_mut_ptr(), n, &mut fe, &mut p) };
            assert_eq!(st, LbmStatus::Ok);
            (bits, fe, p)
        })
        .collect()
}

#[test]
fn compile_and_score() {
    let m = compile(XOR);
    unsafe {
        assert_eq!(lbm_model_n_visible(m), 3);
        assert_eq!(lbm_model_n_hidden(m), 4);
        let mut e = 1.0;
        assert_eq!(lbm_model_min_energy(m, [1, 1, 0].as_ptr(), 3, &mut e), LbmStatus::Ok);
        assert_eq!(e, -0.5);
        assert_eq!(lbm_model_min_energy(m, [1, 1, 1].as_ptr(), 3, &mut e), LbmStatus::Ok);
        assert_eq!(e, 0.0);
        let mut f = 0.0;
        assert_eq!(
            lbm_model_free_energy(m, [0, 0, 0].as_ptr(), 3, 5.0, &mut f),
            LbmStatus::Ok
        );
        assert!(f < -2.5, "{f}");
        let mut idx = 9;
        let z = CString::new("z").unwrap();
        assert_eq!(lbm_model_var_index(m, z.as_ptr(), &mut idx), LbmStatus::Ok);
        assert_eq!(idx, 2);
        lbm_model_free(m);
    }
}

#[test]
fn solve_with_evidence() {
    let m = compile(XOR);
    let opts = LbmSolveOptions {
        seed: 3,
        max_samples: 20_000,
        ..lbm_solve_options_default()
    };
    let clamp: [i8; 3] = [1, -1, -1];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(lbm_solve(m, clamp.as_ptr(), 3, &opts, &mut s), LbmStatus::Ok);
        assert_eq!(lbm_solutions_samples_drawn(s), 20_000);
        let found = rows(s, 3);
        let bits: Vec<Vec<u8>> = found.iter().map(|r| r.0.clone()).collect();
        assert_eq!(bits, [vec![1, 0, 1], vec![1, 1, 0]]);
        assert!(found.iter().all(|r| r.2.is_nan()));
        lbm_solutions_free(s);

        // Defaults when no options are given; the search is reproducible.
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(lbm_solve(m, ptr::null(), 0, ptr::null(), &mut a), LbmStatus::Ok);
        assert_eq!(lbm_solve(m, ptr::null(), 0, ptr::null(), &mut b), LbmStatus::Ok);
        assert_eq!(rows(a, 3).len(), 4);
        assert_eq!(
            rows(a, 3).iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
            rows(b, 3).iter().map(|r| r.0.clone()).collect::<Vec<_>>()
        );
        lbm_solutions_free(a);
        lbm_solutions_free(b);
        lbm_model_free(m);
    }
}

#[test]
fn rank_orders_by_free_energy() {
    let m = compile(XOR);
    let clamp: [i8; 3] = [1, 1, -1];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(lbm_rank(m, clamp.as_ptr(), 3, 5.0, &mut s), LbmStatus::Ok);
        let r = rows(s, 3);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].0, [1, 1, 0]);
        assert!(r[0].1 < r[1].1);
        assert!((r[0].2 + r[1].2 - 1.0).abs() < 1e-12);
        assert!(r[0].2 > 0.9);
        lbm_solutions_free(s);
        lbm_model_free(m);
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.json").to_str().unwrap()).unwrap();
    let m = compile("1000 : r <- n\n10 : p <- q\n");
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(lbm_model_save(m, path.as_ptr()), LbmStatus::Ok);
        assert_eq!(lbm_model_load(path.as_ptr(), &mut back), LbmStatus::Ok);
        assert_eq!(lbm_model_n_hidden(back), lbm_model_n_hidden(m));
        for k in 0..16u8 {
            let x: Vec<u8> = (0..4).map(|i| (k >> i) & 1).collect();
            let (mut a, mut b) = (0.0, 0.0);
            lbm_model_free_energy(m, x.as_ptr(), 4, 5.0, &mut a);
            lbm_model_free_energy(back, x.as_ptr(), 4, 5.0, &mut b);
            assert_eq!(a, b);
        }
        lbm_model_free(m);
        lbm_model_free(back);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut m = ptr::null_mut();
    unsafe {
        let bad = CString::new("a &\n").unwrap();
        assert_eq!(lbm_model_compile(bad.as_ptr(), 0.5, &mut m), LbmStatus::Parse);
        assert!(last_error().contains("line 1"), "{}", last_error());
        assert!(m.is_null());

        let unsat = CString::new("a & ~a\n").unwrap();
        assert_eq!(lbm_model_compile(unsat.as_ptr(), 0.5, &mut m), LbmStatus::Unsatisfiable);
        let ok = CString::new("a\n").unwrap();
        assert_eq!(lbm_model_compile(ok.as_ptr(), 1.5, &mut m), LbmStatus::InvalidArgument);
        assert_eq!(lbm_model_compile(ptr::null(), 0.5, &mut m), LbmStatus::NullPointer);
        assert_eq!(
            lbm_model_compile(ok.as_ptr(), 0.5, ptr::null_mut()),
            LbmStatus::NullPointer
        );

        let missing = CString::new("/nonexistent/model.json").unwrap();
        assert_eq!(lbm_model_load(missing.as_ptr(), &mut m), LbmStatus::Io);

        let xor = compile(XOR);
        let mut e = 0.0;
        assert_eq!(
            lbm_model_min_energy(xor, [1, 0].as_ptr(), 2, &mut e),
            LbmStatus::DimensionMismatch
        );
        let mut s = ptr::null_mut();
        assert_eq!(
            lbm_solve(xor, [2i8, 0, 0].as_ptr(), 3, ptr::null(), &mut s),
            LbmStatus::InvalidArgument
        );
        let nope = CString::new("w").unwrap();
        let mut idx = 0;
        assert_eq!(
            lbm_model_var_index(xor, nope.as_ptr(), &mut idx),
            LbmStatus::InvalidArgument
        );

        assert_eq!(lbm_rank(xor, ptr::null(), 0, 5.0, &mut s), LbmStatus::Ok);
        let mut bits = [0u8; 3];
        let st = lbm_solutions_get(s, 99, bits.as_mut_ptr(), 3, ptr::null_mut(), ptr::null_mut());
        assert_eq!(st, LbmStatus::OutOfRange);
        let st = lbm_solutions_get(s, 0, bits.as_mut_ptr(), 2, ptr::null_mut(), ptr::null_mut());
        assert_eq!(st, LbmStatus::DimensionMismatch);
        lbm_solutions_free(s);
        lbm_model_free(xor);

        assert_eq!(lbm_model_n_visible(ptr::null()), 0);
        lbm_model_free(ptr::null_mut());
        lbm_solutions_free(ptr::null_mut());
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "lbm.h"

int main(void) {
    LbmModel *m = NULL;
    if (lbm_model_compile("(x ^ y) <-> z\n", 0.5, &m) != LBM_STATUS_OK) return 1;
    LbmSolutions *s = NULL;
    int8_t clamp[3] = {1, 1, -1};
    if (lbm_rank(m, clamp, 3, 5.0, &s) != LBM_STATUS_OK) return 2;
    uint8_t bits[3];
    double fe, p;
    if (lbm_solutions_get(s, 0, bits, 3, &fe, &p) != LBM_STATUS_OK) return 3;
    printf("%d%d%d %.3f\n", bits[0], bits[1], bits[2], p);
    lbm_solutions_free(s);
    if (lbm_model_compile("a &", 0.5, &m) != LBM_STATUS_PARSE) return 4;
    printf("%s\n", lbm_last_error());
    lbm_model_free(m);
    return 0;
}
"#;

#[test]
fn header_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("lbm.h").exists());
    // The integration test binary sits in target/<profile>/deps.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("liblbm_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("smoke");
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let out = String::from_utf8(run.stdout).unwrap();
    let mut lines = out.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("110 0.9"), "{first}");
    assert!(lines.next().unwrap().contains("syntax error"));
}
