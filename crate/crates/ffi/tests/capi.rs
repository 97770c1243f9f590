use std::ffi::{CStr, CString};
use std::ptr;

use ultrachain_ffi::*;

const U4: &str = r#"{"points":["a","b","c","d"],
  "dist":[["0","1","2","8"],["1","0","2","8"],["2","2","0","8"],["8","8","8","0"]]}"#;

const T3: &str = r#"{"nodes":[
  {"id":"x","level":1,"succ":"u"},{"id":"y","level":1,"succ":"u"},{"id":"z","level":1,"succ":"v"},
  {"id":"u","level":2,"succ":"w"},{"id":"v","level":2,"succ":"w"},{"id":"w","level":3}]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(uc_last_error()).to_str().unwrap().to_owned() }
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    uc_string_free(s);
    out
}

#[test]
fn space_roundtrip() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(uc_space_from_json(c(U4).as_ptr(), &mut s), UcStatus::Ok);
        let mut n = 0;
        assert_eq!(uc_space_len(s, &mut n), UcStatus::Ok);
        assert_eq!(n, 4);
        let mut d = ptr::null_mut();
        assert_eq!(uc_space_distance(s, 0, 3, &mut d), UcStatus::Ok);
        assert_eq!(take(d), "8");
        assert_eq!(uc_space_distance(s, 0, 4, &mut d), UcStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        uc_space_free(s);
    }
}

#[test]
fn check_reports_triple() {
    let bad = r#"{"points":["p","q","r"],"dist":[["0","1","3"],["1","0","1"],["3","1","0"]]}"#;
    unsafe {
        let mut ok = true;
        let mut t = [9usize; 3];
        assert_eq!(uc_check_ultrametric(c(bad).as_ptr(), &mut ok, t.as_mut_ptr()), UcStatus::Ok);
        assert!(!ok);
        assert_eq!((t[0], t[1]), (0, 2));
        assert_eq!(uc_check_ultrametric(c(U4).as_ptr(), &mut ok, ptr::null_mut()), UcStatus::Ok);
        assert!(ok);

        let mut s = ptr::null_mut();
        assert_eq!(uc_space_from_json(c(bad).as_ptr(), &mut s), UcStatus::Malformed);
        assert!(s.is_null());
        assert!(last_error().contains("not an ultrametric"));
    }
}

#[test]
fn bad_input_statuses() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(uc_space_from_json(ptr::null(), &mut s), UcStatus::NullPointer);
        assert_eq!(uc_space_from_json(c("{").as_ptr(), &mut s), UcStatus::Json);
        assert_eq!(uc_space_from_json(c(U4).as_ptr(), ptr::null_mut()), UcStatus::NullPointer);
        let bytes = [0xffu8, 0];
        assert_eq!(uc_space_from_json(bytes.as_ptr().cast(), &mut s), UcStatus::InvalidUtf8);
        let mut n = 0;
        assert_eq!(uc_space_len(ptr::null(), &mut n), UcStatus::NullPointer);
        uc_space_free(ptr::null_mut());
        uc_string_free(ptr::null_mut());
    }
}

#[test]
fn chain_levels() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(uc_space_from_json(c(U4).as_ptr(), &mut s), UcStatus::Ok);
        let mut ch = ptr::null_mut();
        assert_eq!(uc_chain_from_space(s, UcFlavor::D, &mut ch), UcStatus::Ok);
        let (mut lo, mut hi) = (0, 0);
        assert_eq!(uc_chain_window(ch, &mut lo, &mut hi), UcStatus::Ok);
        let mut sizes = Vec::new();
        for k in lo..=hi {
            let mut n = 0;
            assert_eq!(uc_chain_level_len(ch, k, &mut n), UcStatus::Ok);
            sizes.push(n);
        }
        assert_eq!(sizes, [4, 3, 2, 2, 1]);
        let mut n = 0;
        assert_eq!(uc_chain_level_len(ch, hi + 1, &mut n), UcStatus::OutOfWindow);
        let mut dot = ptr::null_mut();
        assert_eq!(uc_chain_dot(ch, &mut dot), UcStatus::Ok);
        assert_eq!(take(dot).matches("rank=same").count(), 5);
        uc_chain_free(ch);
        uc_space_free(s);
    }
}

#[test]
fn tower_metric_and_mask() {
    unsafe {
        let mut mask = 0;
        assert_eq!(uc_tower_validate(c(T3).as_ptr(), &mut mask), UcStatus::Ok);
        assert_eq!(mask, 0b1111);
        let broken = T3.replace(r#"{"id":"z","level":1,"succ":"v"}"#, r#"{"id":"z","level":2,"succ":"w"}"#);
        assert_eq!(uc_tower_validate(c(&broken).as_ptr(), &mut mask), UcStatus::Ok);
        assert_eq!(mask & 0b1000, 0);

        let mut t = ptr::null_mut();
        assert_eq!(uc_tower_from_json(c(&broken).as_ptr(), &mut t), UcStatus::Malformed);
        assert_eq!(uc_tower_from_json(c(T3).as_ptr(), &mut t), UcStatus::Ok);
        let idx = |id: &str| {
            let mut i = 0;
            assert_eq!(uc_tower_index_of(t, c(id).as_ptr(), &mut i), UcStatus::Ok);
            i
        };
        let mut m = 0;
        for (a, b, want) in [("x", "y", 2), ("x", "z", 4), ("x", "u", 1)] {
            assert_eq!(uc_tower_metric(t, idx(a), idx(b), &mut m), UcStatus::Ok);
            assert_eq!(m, want, "{a} {b}");
        }
        let mut i = 0;
        assert_eq!(uc_tower_index_of(t, c("nope").as_ptr(), &mut i), UcStatus::OutOfRange);
        let mut dot = ptr::null_mut();
        assert_eq!(uc_tower_dot(t, &mut dot), UcStatus::Ok);
        assert!(take(dot).starts_with("digraph tower"));
        uc_tower_free(t);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(uc_space_from_json(c("[]").as_ptr(), &mut s), UcStatus::Json);
    }
    let other = std::thread::spawn(|| uc_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!uc_last_error().is_null());
}
