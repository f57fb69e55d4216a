use std::ffi::CStr;
use std::ptr;

use cavity_entangle::model::AtomicProductState;
use cavity_entangle::{ReducedStateSolver, SystemConfig};
use cavity_entangle_ffi::*;

struct Handle(*mut CeSolver);

impl Handle {
    fn new(params: CeParams) -> Self {
        let mut raw = ptr::null_mut();
        assert_eq!(unsafe { ce_solver_new(&params, &mut raw) }, CeStatus::Ok);
        assert!(!raw.is_null());
        Handle(raw)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { ce_solver_free(self.0) };
    }
}

fn params(nbar: f64, alpha: f64) -> CeParams {
    CeParams {
        nbar,
        alpha,
        ..ce_default_params()
    }
}

const EXCITED_GROUND: CeAtomicState = CeAtomicState {
    theta1: 0.0,
    theta2: std::f64::consts::FRAC_PI_2,
    phi1: 0.0,
    phi2: 0.0,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(ce_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn density_matches_rust_api() {
    let solver = Handle::new(params(1.0, 0.5));
    let state = CeAtomicState {
        theta1: 0.4,
        theta2: 2.1,
        phi1: 1.3,
        phi2: -0.7,
    };
    let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
    let status = unsafe { ce_reduced_density(solver.0, &state, 7.5, re.as_mut_ptr(), im.as_mut_ptr()) };
    assert_eq!(status, CeStatus::Ok);

    let reference = ReducedStateSolver::new(SystemConfig::new(1.0, 0.5).unwrap())
        .unwrap()
        .reduced_density(&AtomicProductState::new(0.4, 2.1, 1.3, -0.7), 7.5);
    for i in 0..4 {
        for j in 0..4 {
            let z = reference.matrix[(i, j)];
            assert_eq!(re[4 * i + j], z.re);
            assert_eq!(im[4 * i + j], z.im);
        }
    }
    let trace: f64 = (0..4).map(|i| re[5 * i]).sum();
    assert!((trace - 1.0).abs() < 1e-9);
}

#[test]
fn series_matches_density_route() {
    let solver = Handle::new(params(0.01, 0.5));
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.75).collect();
    let mut series = vec![f64::NAN; grid.len()];
    let status = unsafe {
        ce_negativity_series(
            solver.0,
            &EXCITED_GROUND,
            grid.as_ptr(),
            grid.len(),
            series.as_mut_ptr(),
        )
    };
    assert_eq!(status, CeStatus::Ok);
    for (&gt, &eps) in grid.iter().zip(&series) {
        let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
        let mut direct = f64::NAN;
        unsafe {
            assert_eq!(
                ce_reduced_density(solver.0, &EXCITED_GROUND, gt, re.as_mut_ptr(), im.as_mut_ptr()),
                CeStatus::Ok
            );
            assert_eq!(ce_negativity(re.as_ptr(), im.as_ptr(), &mut direct), CeStatus::Ok);
        }
        assert!((eps - direct).abs() < 1e-14, "gt={gt}: {eps} vs {direct}");
    }
    assert!(series.iter().cloned().fold(0.0, f64::max) > 0.1);
}

#[test]
fn bell_state_negativity_is_one() {
    let (mut re, im) = ([0.0; 16], [0.0; 16]);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[4 * i + j] = 0.5;
    }
    let mut eps = 0.0;
    assert_eq!(
        unsafe { ce_negativity(re.as_ptr(), im.as_ptr(), &mut eps) },
        CeStatus::Ok
    );
    assert!((eps - 1.0).abs() < 1e-12);
}

#[test]
fn non_hermitian_input_is_reported() {
    let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
    re[0] = 1.0;
    im[1] = 0.3;
    im[4] = 0.3;
    let mut eps = -1.0;
    let status = unsafe { ce_negativity(re.as_ptr(), im.as_ptr(), &mut eps) };
    assert_eq!(status, CeStatus::NotHermitian);
    assert_eq!(eps, -1.0);
    assert!(last_error().contains("Hermitian"));
}

#[test]
fn invalid_parameters_are_rejected() {
    for bad in [
        params(-0.5, 0.5),
        params(f64::NAN, 0.5),
        params(1.0, f64::INFINITY),
        CeParams {
            tail_tolerance: 0.0,
            ..params(1.0, 0.5)
        },
        CeParams {
            omega: f64::NAN,
            ..params(1.0, 0.5)
        },
    ] {
        let mut raw = ptr::null_mut();
        assert_eq!(
            unsafe { ce_solver_new(&bad, &mut raw) },
            CeStatus::InvalidArgument,
            "{bad:?}"
        );
        assert!(raw.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn bad_grid_is_rejected() {
    let solver = Handle::new(params(0.5, 0.5));
    let grid = [1.0, 0.5];
    let mut out = [0.0; 2];
    let status = unsafe { ce_negativity_series(solver.0, &EXCITED_GROUND, grid.as_ptr(), 2, out.as_mut_ptr()) };
    assert_eq!(status, CeStatus::InvalidArgument);
    let status = unsafe { ce_negativity_series(solver.0, &EXCITED_GROUND, grid.as_ptr(), 0, out.as_mut_ptr()) };
    assert_eq!(status, CeStatus::InvalidArgument);
}

#[test]
fn null_pointers_are_rejected() {
    let solver = Handle::new(params(0.5, 0.5));
    let mut buf = [0.0; 16];
    let mut cutoff = 0usize;
    unsafe {
        assert_eq!(ce_solver_new(ptr::null(), &mut ptr::null_mut()), CeStatus::NullPointer);
        assert_eq!(ce_solver_cutoff(ptr::null(), &mut cutoff), CeStatus::NullPointer);
        assert_eq!(
            ce_reduced_density(solver.0, ptr::null(), 1.0, buf.as_mut_ptr(), buf.as_mut_ptr()),
            CeStatus::NullPointer
        );
        assert_eq!(
            ce_negativity(buf.as_ptr(), ptr::null(), ptr::null_mut()),
            CeStatus::NullPointer
        );
    }
}

#[test]
fn cutoff_follows_thermal_tail() {
    let solver = Handle::new(params(2.0, 0.5));
    let mut cutoff = 0usize;
    assert_eq!(unsafe { ce_solver_cutoff(solver.0, &mut cutoff) }, CeStatus::Ok);
    assert_eq!(cutoff, 56);

    let vacuum = Handle::new(params(0.0, 0.5));
    assert_eq!(unsafe { ce_solver_cutoff(vacuum.0, &mut cutoff) }, CeStatus::Ok);
    assert_eq!(cutoff, 0);
}

#[test]
fn non_finite_time_is_rejected() {
    let solver = Handle::new(params(0.5, 0.5));
    let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
    let status = unsafe { ce_reduced_density(solver.0, &EXCITED_GROUND, f64::NAN, re.as_mut_ptr(), im.as_mut_ptr()) };
    assert_eq!(status, CeStatus::InvalidArgument);
}

#[test]
fn header_declares_exported_symbols() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cavity_entangle.h")).unwrap();
    for symbol in [
        "ce_default_params",
        "ce_solver_new",
        "ce_solver_free",
        "ce_solver_cutoff",
        "ce_reduced_density",
        "ce_negativity_series",
        "ce_negativity",
        "ce_last_error",
        "ce_version",
        "typedef struct CeSolver CeSolver",
        "CE_STATUS_NOT_HERMITIAN = 3",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}
