//! C ABI for `cavity-entangle`.
//!
//! Every fallible function returns a [`CeStatus`]; on failure a message is
//! available from [`ce_last_error`] on the calling thread. Density matrices
//! cross the boundary as two row-major arrays of 16 doubles (real and
//! imaginary parts) in the basis |++>, |+->, |-+>, |-->.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cavity_entangle::model::{AtomicProductState, DEFAULT_TAIL_TOLERANCE};
use cavity_entangle::{entanglement, Error, ReducedStateSolver, SystemConfig};
use nalgebra::Matrix4;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    Panic = 4,
}

/// Model parameters. `omega` is in units of g.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CeParams {
    pub nbar: f64,
    pub alpha: f64,
    pub omega: f64,
    pub tail_tolerance: f64,
}

/// Product of `cos(theta) |+> + e^{i phi} sin(theta) |->` for each atom.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CeAtomicState {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

/// Opaque solver handle.
pub struct CeSolver {
    inner: ReducedStateSolver,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn fail(status: CeStatus, msg: impl Into<String>) -> CeStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> CeStatus {
    let status = match err {
        Error::NotHermitian(_) => CeStatus::NotHermitian,
        _ => CeStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

fn guarded(f: impl FnOnce() -> CeStatus) -> CeStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(CeStatus::Panic, "internal panic"))
}

impl From<CeAtomicState> for AtomicProductState {
    fn from(s: CeAtomicState) -> Self {
        AtomicProductState::new(s.theta1, s.theta2, s.phi1, s.phi2)
    }
}

/// Defaults: vacuum field, no dipole coupling, resonant frame at rest,
/// thermal tail tolerance 1e-10.
#[no_mangle]
pub extern "C" fn ce_default_params() -> CeParams {
    CeParams {
        nbar: 0.0,
        alpha: 0.0,
        omega: 0.0,
        tail_tolerance: DEFAULT_TAIL_TOLERANCE,
    }
}

/// Creates a solver. On success `*out` owns a handle that must be released
/// with [`ce_solver_free`].
///
/// # Safety
/// `params` must point to a valid `CeParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ce_solver_new(params: *const CeParams, out: *mut *mut CeSolver) -> CeStatus {
    guarded(|| {
        if params.is_null() || out.is_null() {
            return fail(CeStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let p = *params;
        let config = match SystemConfig::new(p.nbar, p.alpha)
            .map(|c| c.with_omega(p.omega))
            .and_then(|c| c.with_tail_tolerance(p.tail_tolerance))
            .and_then(|c| c.validate().map(|_| c))
        {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        match ReducedStateSolver::new(config) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CeSolver { inner }));
                CeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle from [`ce_solver_new`]. Null is ignored.
///
/// # Safety
/// `solver` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ce_solver_free(solver: *mut CeSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Largest photon number kept in the thermal average.
///
/// # Safety
/// `solver` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ce_solver_cutoff(solver: *const CeSolver, out: *mut usize) -> CeStatus {
    guarded(|| {
        if solver.is_null() || out.is_null() {
            return fail(CeStatus::NullPointer, "null pointer argument");
        }
        *out = (*solver).inner.thermal().cutoff();
        CeStatus::Ok
    })
}

/// Reduced two-atom density matrix at time `gt`.
///
/// # Safety
/// `solver` must be a live handle, `state` valid, and `re`, `im` must each
/// have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn ce_reduced_density(
    solver: *const CeSolver,
    state: *const CeAtomicState,
    gt: f64,
    re: *mut f64,
    im: *mut f64,
) -> CeStatus {
    guarded(|| {
        if solver.is_null() || state.is_null() || re.is_null() || im.is_null() {
            return fail(CeStatus::NullPointer, "null pointer argument");
        }
        if !gt.is_finite() {
            return fail(CeStatus::InvalidArgument, format!("time must be finite, got {gt}"));
        }
        let rho = (*solver).inner.reduced_density(&(*state).into(), gt);
        let (re, im) = (slice::from_raw_parts_mut(re, 16), slice::from_raw_parts_mut(im, 16));
        for i in 0..4 {
            for j in 0..4 {
                let z = rho.matrix[(i, j)];
                re[4 * i + j] = z.re;
                im[4 * i + j] = z.im;
            }
        }
        CeStatus::Ok
    })
}

/// Negativity at each point of an ascending time grid of length `len`.
///
/// # Safety
/// `solver` must be a live handle, `state` valid, and `grid` and `out` must
/// each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ce_negativity_series(
    solver: *const CeSolver,
    state: *const CeAtomicState,
    grid: *const f64,
    len: usize,
    out: *mut f64,
) -> CeStatus {
    guarded(|| {
        if solver.is_null() || state.is_null() || grid.is_null() || out.is_null() {
            return fail(CeStatus::NullPointer, "null pointer argument");
        }
        let grid = slice::from_raw_parts(grid, len);
        match (*solver).inner.negativity_series(&(*state).into(), grid) {
            Ok(series) => {
                slice::from_raw_parts_mut(out, len).copy_from_slice(&series.negativity);
                CeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Negativity of an arbitrary two-qubit density matrix given as row-major
/// real and imaginary parts.
///
/// # Safety
/// `re` and `im` must each hold 16 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ce_negativity(re: *const f64, im: *const f64, out: *mut f64) -> CeStatus {
    guarded(|| {
        if re.is_null() || im.is_null() || out.is_null() {
            return fail(CeStatus::NullPointer, "null pointer argument");
        }
        let (re, im) = (slice::from_raw_parts(re, 16), slice::from_raw_parts(im, 16));
        if re.iter().chain(im).any(|x| !x.is_finite()) {
            return fail(CeStatus::InvalidArgument, "matrix entries must be finite");
        }
        let rho = Matrix4::from_fn(|i, j| Complex64::new(re[4 * i + j], im[4 * i + j]));
        match entanglement::negativity(&rho) {
            Ok(eps) => {
                *out = eps;
                CeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Message for the most recent failure on this thread, or an empty string.
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ce_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ce_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
