//! C ABI for the cpinf workbench.
//!
//! Every function returns a [`CpStatus`]. On failure a message is kept per
//! thread and can be read with [`cp_last_error`]. Lattices are opaque
//! handles created by `cp_lattice_*` constructors and released with
//! [`cp_lattice_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cpinf::curve_homalg::{default_cutoff, ext_table, CurveError, ObjectSpec};
use cpinf::monomial_geometry::{cohomology_ruled, RuledBundle};
use cpinf::mutation_engine::{left_mutate, paper_collection, right_mutate, EulerLattice, MutationError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    /// The truncation did not stabilize; raise the cutoff.
    Unstable = 4,
    /// Any other computation failure.
    ComputationFailed = 5,
    Panic = 6,
}

/// Opaque handle to an exceptional collection in the numerical Grothendieck group.
pub struct CpLattice {
    inner: EulerLattice,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(status: CpStatus, msg: impl Into<String>) -> CpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CpStatus) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CpStatus::Panic, "internal panic"),
    }
}

fn curve_status(e: CurveError) -> CpStatus {
    let status = match e {
        CurveError::UnstableTruncation { .. } => CpStatus::Unstable,
        CurveError::BadSpec(_) => CpStatus::InvalidArgument,
        _ => CpStatus::ComputationFailed,
    };
    fail(status, e.to_string())
}

fn mutation_status(e: MutationError) -> CpStatus {
    let status = match e {
        MutationError::IndexOutOfRange { .. } => CpStatus::InvalidArgument,
        _ => CpStatus::ComputationFailed,
    };
    fail(status, e.to_string())
}

unsafe fn parse_spec(s: *const c_char) -> Result<ObjectSpec, CpStatus> {
    if s.is_null() {
        return Err(fail(CpStatus::NullPointer, "object spec is null"));
    }
    let text = CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CpStatus::InvalidArgument, "object spec is not UTF-8"))?;
    text.parse::<ObjectSpec>()
        .map_err(|e| fail(CpStatus::InvalidArgument, e.to_string()))
}

/// Writes `dim Ext^k(source, target)` to `out[k]` for `0 <= k <= max_degree`.
///
/// `source` and `target` are object specs such as `"P(-1)"`, `"L(2)"`,
/// `"O(1,-1)"` or `"Q"`. A `cutoff` of 0 selects the default. `len` must be
/// at least `max_degree + 1`.
///
/// # Safety
/// `source` and `target` must be NUL-terminated strings; `out` must point to
/// `len` writable `size_t` values.
#[no_mangle]
pub unsafe extern "C" fn cp_ext_dims(
    source: *const c_char,
    target: *const c_char,
    max_degree: usize,
    cutoff: usize,
    out: *mut usize,
    len: usize,
) -> CpStatus {
    guard(|| {
        let (s, t) = match (parse_spec(source), parse_spec(target)) {
            (Ok(s), Ok(t)) => (s, t),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        if out.is_null() {
            return fail(CpStatus::NullPointer, "output buffer is null");
        }
        if len < max_degree + 1 {
            return fail(CpStatus::BufferTooSmall, format!("need {} entries", max_degree + 1));
        }
        let cutoff = if cutoff == 0 { default_cutoff(max_degree) } else { cutoff };
        match ext_table(&s, &t, max_degree, cutoff) {
            Ok(dims) => {
                let buf = std::slice::from_raw_parts_mut(out, len);
                for (k, slot) in buf.iter_mut().enumerate().take(max_degree + 1) {
                    *slot = dims.get(k as i64);
                }
                CpStatus::Ok
            }
            Err(e) => curve_status(e),
        }
    })
}

/// Writes `h^0, h^1, h^2` of `O(m, n)` on the ruled surface `P(O ⊕ O(a))` to `out[0..3]`.
///
/// # Safety
/// `out` must point to 3 writable `size_t` values.
#[no_mangle]
pub unsafe extern "C" fn cp_cohomology_ruled(a: i64, m: i64, n: i64, out: *mut usize) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpStatus::NullPointer, "output buffer is null");
        }
        let h = cohomology_ruled(&RuledBundle::new(m, n, a));
        let buf = std::slice::from_raw_parts_mut(out, 3);
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = h.get(i as i64);
        }
        CpStatus::Ok
    })
}

/// Creates the six-object threefold collection from the shipped tables.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_paper(out: *mut *mut CpLattice) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpStatus::NullPointer, "output handle is null");
        }
        match paper_collection() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CpLattice { inner }));
                CpStatus::Ok
            }
            Err(e) => mutation_status(e),
        }
    })
}

/// Creates a collection from a row-major `n × n` Gram matrix, labelled `X0, X1, …`.
///
/// # Safety
/// `gram` must point to `n * n` readable values and `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_from_gram(gram: *const i64, n: usize, out: *mut *mut CpLattice) -> CpStatus {
    guard(|| {
        if gram.is_null() || out.is_null() {
            return fail(CpStatus::NullPointer, "gram or output handle is null");
        }
        let flat = std::slice::from_raw_parts(gram, n * n);
        let rows = flat.chunks(n.max(1)).take(n).map(|r| r.to_vec()).collect();
        let labels = (0..n).map(|i| format!("X{i}")).collect();
        match EulerLattice::from_gram(labels, rows) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CpLattice { inner }));
                CpStatus::Ok
            }
            Err(e) => mutation_status(e),
        }
    })
}

/// Number of objects, or 0 for a null handle.
///
/// # Safety
/// `lat` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_size(lat: *const CpLattice) -> usize {
    lat.as_ref().map(|l| l.inner.size()).unwrap_or(0)
}

/// Writes `χ(object i, object j)` to `out`.
///
/// # Safety
/// `lat` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_gram_entry(lat: *const CpLattice, i: usize, j: usize, out: *mut i64) -> CpStatus {
    guard(|| {
        let Some(l) = lat.as_ref() else {
            return fail(CpStatus::NullPointer, "lattice handle is null");
        };
        if out.is_null() {
            return fail(CpStatus::NullPointer, "output is null");
        }
        let n = l.inner.size();
        if i >= n || j >= n {
            return fail(CpStatus::InvalidArgument, format!("index out of range for size {n}"));
        }
        *out = l.inner.gram_entry(i, j);
        CpStatus::Ok
    })
}

unsafe fn mutate_in_place(
    lat: *mut CpLattice,
    i: usize,
    f: fn(&EulerLattice, usize) -> Result<EulerLattice, MutationError>,
) -> CpStatus {
    guard(|| {
        let Some(l) = lat.as_mut() else {
            return fail(CpStatus::NullPointer, "lattice handle is null");
        };
        match f(&l.inner, i) {
            Ok(next) => {
                l.inner = next;
                CpStatus::Ok
            }
            Err(e) => mutation_status(e),
        }
    })
}

/// Replaces objects `i, i+1` by their left mutation. On failure the handle is unchanged.
///
/// # Safety
/// `lat` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_left_mutate(lat: *mut CpLattice, i: usize) -> CpStatus {
    mutate_in_place(lat, i, left_mutate)
}

/// Replaces objects `i, i+1` by their right mutation. On failure the handle is unchanged.
///
/// # Safety
/// `lat` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_right_mutate(lat: *mut CpLattice, i: usize) -> CpStatus {
    mutate_in_place(lat, i, right_mutate)
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `lat` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cp_lattice_free(lat: *mut CpLattice) {
    if !lat.is_null() {
        drop(Box::from_raw(lat));
    }
}

/// The last error message on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(ptr::null()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
