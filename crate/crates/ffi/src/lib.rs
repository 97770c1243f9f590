//! C ABI over `ultrachain`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`UcStatus`]; on failure the message is available from [`uc_last_error`]
//! on the same thread until the next failing call. Strings returned through
//! `out` parameters are owned by the caller and released with
//! [`uc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ultrachain::chain::{chain_of_space, Chain, Flavor};
use ultrachain::dot::{chain_dot, tower_dot};
use ultrachain::io::SpaceFile;
use ultrachain::tower::{path_metric, validate_tower, Tower, TowerSpec};
use ultrachain::{Error, UltraSpace, UltrametricVerdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    OutOfWindow = 4,
    Domain = 5,
    ContractViolation = 6,
    Precondition = 7,
    Io = 8,
    Json = 9,
    OutOfRange = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcFlavor {
    D = 0,
    DPlus = 1,
    DMinus = 2,
}

impl From<UcFlavor> for Flavor {
    fn from(f: UcFlavor) -> Flavor {
        match f {
            UcFlavor::D => Flavor::D,
            UcFlavor::DPlus => Flavor::DPlus,
            UcFlavor::DMinus => Flavor::DMinus,
        }
    }
}

/// Finite ultrametric space.
pub struct UcSpace(UltraSpace);

/// Chain of partitions built from a space.
pub struct UcChain(Chain);

/// Validated tower.
pub struct UcTower(Tower);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(UcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match &e {
            Error::Malformed(_) => UcStatus::Malformed,
            Error::OutOfWindow(_) => UcStatus::OutOfWindow,
            Error::Domain(_) => UcStatus::Domain,
            Error::ContractViolation(_) => UcStatus::ContractViolation,
            Error::Precondition(_) => UcStatus::Precondition,
            Error::Io { .. } => UcStatus::Io,
            Error::Json { .. } => UcStatus::Json,
        };
        Fail(status, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Fail {
        Fail(UcStatus::Json, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside ultrachain".into());
            UcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(UcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(UcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(UcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(UcStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

fn index(i: usize, len: usize) -> Result<usize, Fail> {
    if i < len {
        Ok(i)
    } else {
        Err(Fail(UcStatus::OutOfRange, format!("index {i} out of range for {len} points")))
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failing call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn uc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks the strong triangle inequality on a `{"points":..,"dist":..}`
/// document. `out_valid` receives the verdict; on a violation `out_triple`
/// (three entries, may be null) receives `(x, y, z)` with `d(x,y)` offending.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_valid` must be writable;
/// `out_triple` must be null or point to three writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn uc_check_ultrametric(
    json: *const c_char,
    out_valid: *mut bool,
    out_triple: *mut usize,
) -> UcStatus {
    guard(|| {
        let file: SpaceFile = serde_json::from_str(str_arg(json, "json")?)?;
        match file.matrix()?.verify_ultrametric() {
            UltrametricVerdict::Valid => put(out_valid, true),
            UltrametricVerdict::Violation { triple: (x, y, z), .. } => {
                if !out_triple.is_null() {
                    out_triple.write(x);
                    out_triple.add(1).write(y);
                    out_triple.add(2).write(z);
                }
                put(out_valid, false)
            }
        }
    })
}

/// Parses a `{"points":..,"dist":..}` document into a space handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_space_from_json(json: *const c_char, out: *mut *mut UcSpace) -> UcStatus {
    guard(|| {
        let file: SpaceFile = serde_json::from_str(str_arg(json, "json")?)?;
        let space = file.space()?;
        put(out, Box::into_raw(Box::new(UcSpace(space))))
    })
}

/// # Safety
/// `s` must be null or a handle from [`uc_space_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_space_free(s: *mut UcSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live space handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_space_len(s: *const UcSpace, out: *mut usize) -> UcStatus {
    guard(|| put(out, obj(s, "space")?.0.len()))
}

/// Exact distance between points `i` and `j`, as a fraction string
/// such as `"3/4"`.
///
/// # Safety
/// `s` must be a live space handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_space_distance(s: *const UcSpace, i: usize, j: usize, out: *mut *mut c_char) -> UcStatus {
    guard(|| {
        let s = &obj(s, "space")?.0;
        let d = s.dist(index(i, s.len())?, index(j, s.len())?);
        put(out, c_string(d.to_string()))
    })
}

/// # Safety
/// `s` must be a live space handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_chain_from_space(s: *const UcSpace, flavor: UcFlavor, out: *mut *mut UcChain) -> UcStatus {
    guard(|| {
        let c = chain_of_space(&obj(s, "space")?.0, flavor.into())?;
        put(out, Box::into_raw(Box::new(UcChain(c))))
    })
}

/// # Safety
/// `c` must be null or a handle from [`uc_chain_from_space`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_chain_free(c: *mut UcChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Window `[lo, hi]` of stored levels.
///
/// # Safety
/// `c` must be a live chain handle; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_chain_window(c: *const UcChain, lo: *mut i64, hi: *mut i64) -> UcStatus {
    guard(|| {
        let c = &obj(c, "chain")?.0;
        put(lo, c.lo)?;
        put(hi, c.hi())
    })
}

/// Number of elements at level `k`.
///
/// # Safety
/// `c` must be a live chain handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_chain_level_len(c: *const UcChain, k: i64, out: *mut usize) -> UcStatus {
    guard(|| {
        let c = &obj(c, "chain")?.0;
        if !c.contains(k) {
            return Err(Fail(UcStatus::OutOfWindow, format!("level {k} outside [{}, {}]", c.lo, c.hi())));
        }
        put(out, c.level(k).len())
    })
}

/// # Safety
/// `c` must be a live chain handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_chain_dot(c: *const UcChain, out: *mut *mut c_char) -> UcStatus {
    guard(|| put(out, c_string(chain_dot(&obj(c, "chain")?.0))))
}

/// Evaluates the four tower conditions on a `{"nodes":[..]}` document without
/// requiring them to hold. Bit `n - 1` of `out_mask` is set when condition
/// `n` passes.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_mask` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_validate(json: *const c_char, out_mask: *mut u32) -> UcStatus {
    guard(|| {
        let spec: TowerSpec = serde_json::from_str(str_arg(json, "json")?)?;
        let mask = validate_tower(&spec)?
            .iter()
            .filter(|v| v.pass)
            .fold(0u32, |m, v| m | 1 << (v.condition - 1));
        put(out_mask, mask)
    })
}

/// Parses a tower; fails with `Malformed` unless all four conditions hold.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_from_json(json: *const c_char, out: *mut *mut UcTower) -> UcStatus {
    guard(|| {
        let spec: TowerSpec = serde_json::from_str(str_arg(json, "json")?)?;
        let t = Tower::from_spec(&spec)?;
        put(out, Box::into_raw(Box::new(UcTower(t))))
    })
}

/// # Safety
/// `t` must be null or a handle from [`uc_tower_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_free(t: *mut UcTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Index of the node with the given id.
///
/// # Safety
/// `t` must be a live tower handle, `id` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_index_of(t: *const UcTower, id: *const c_char, out: *mut usize) -> UcStatus {
    guard(|| {
        let t = &obj(t, "tower")?.0;
        let id = str_arg(id, "id")?;
        let i = t.index_of(id).ok_or_else(|| Fail(UcStatus::OutOfRange, format!("no node {id:?}")))?;
        put(out, i)
    })
}

/// Path metric between nodes `x` and `y`.
///
/// # Safety
/// `t` must be a live tower handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_metric(t: *const UcTower, x: usize, y: usize, out: *mut u32) -> UcStatus {
    guard(|| {
        let t = &obj(t, "tower")?.0;
        put(out, path_metric(t, index(x, t.len())?, index(y, t.len())?))
    })
}

/// # Safety
/// `t` must be a live tower handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_tower_dot(t: *const UcTower, out: *mut *mut c_char) -> UcStatus {
    guard(|| put(out, c_string(tower_dot(&obj(t, "tower")?.0))))
}
