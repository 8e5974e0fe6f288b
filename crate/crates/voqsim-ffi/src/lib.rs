//! C ABI for the voqsim teleportation simulator.
//!
//! Conventions: handles are opaque and freed by their matching `_free`
//! function; fallible calls return a [`VoqStatus`] and write results through
//! out pointers, touching them only on `VOQ_STATUS_OK`; the message behind
//! the most recent failure on the current thread is available from
//! [`voq_last_error_message`] until the next failing call. Pair-indexed
//! arrays are ordered (D1-D1*, D1-D2*, D2-D1*, D2-D2*).
//!
//! Safety: pointer arguments must be valid for the access the signature
//! implies (readable, or writable for out pointers), arrays must match
//! their length arguments, and strings must be NUL-terminated.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::AssertUnwindSafe;

use voqsim::error::Error;
use voqsim::fit::fit_visibility;
use voqsim::mc::simulate_counts;
use voqsim::protocol::{
    bell_statistics, fringe_scan, mirror_to_phase, phase_to_mirror, visibility_sweep,
    ExperimentConfig, FringeRecord, MirrorSweep, PairId, PhaseSweep, Variant,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidConfig = 2,
    Runtime = 3,
    InvalidUtf8 = 4,
}

/// Protocol variant selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoqVariant {
    Passive = 0,
    Active = 1,
}

/// Coincidence pair selector, same order as the pair-indexed arrays.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoqPair {
    D1D1s = 0,
    D1D2s = 1,
    D2D1s = 2,
    D2D2s = 3,
}

impl VoqPair {
    fn id(self) -> PairId {
        PairId::ALL[self as usize]
    }
}

/// Opaque experiment configuration handle.
pub struct VoqConfig {
    inner: ExperimentConfig,
}

/// One sweep point of a fringe scan or counting run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VoqFringePoint {
    pub phi_rad: f64,
    pub mirror_um: f64,
    pub p_joint: [f64; 4],
    pub p_conditional: [f64; 4],
    pub counts: [u64; 4],
}

/// Bell-outcome probabilities of Alice's measurement.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VoqBellStats {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
}

/// One visibility point; `degenerate` marks a fringe with no amplitude.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VoqVisibilityPoint {
    pub alpha_sq: f64,
    pub visibility: f64,
    pub degenerate: bool,
}

/// Least-squares fringe fit A(1 + V cos(phi + phi0)) with standard errors.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VoqFitResult {
    pub v: f64,
    pub phi0: f64,
    pub a: f64,
    pub residual_norm: f64,
    pub v_stderr: f64,
    pub phi0_stderr: f64,
    pub a_stderr: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: VoqStatus, msg: &str) -> VoqStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> VoqStatus {
    match err {
        Error::InvalidConfig(_)
        | Error::InvalidEfficiency(_)
        | Error::InvalidWavelength(_)
        | Error::Json(_) => VoqStatus::InvalidConfig,
        _ => VoqStatus::Runtime,
    }
}

fn report(err: Error) -> VoqStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn guarded(run: impl FnOnce() -> VoqStatus) -> VoqStatus {
    match std::panic::catch_unwind(AssertUnwindSafe(run)) {
        Ok(status) => status,
        Err(_) => fail(VoqStatus::Runtime, "internal panic"),
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            return fail(VoqStatus::NullArgument, concat!(stringify!($ptr), " is null"));
        }
    };
}

fn point_of(record: &FringeRecord) -> VoqFringePoint {
    let mut point = VoqFringePoint {
        phi_rad: record.phi,
        mirror_um: record.mirror_um,
        p_joint: [0.0; 4],
        p_conditional: [0.0; 4],
        counts: [0; 4],
    };
    for pair in PairId::ALL {
        let p = record.pair(pair);
        point.p_joint[pair.index()] = p.joint;
        point.p_conditional[pair.index()] = p.conditional;
        point.counts[pair.index()] = p.counts;
    }
    point
}

fn leak_slice<T>(values: Vec<T>, out_ptr: *mut *mut T, out_len: *mut usize) {
    let boxed = values.into_boxed_slice();
    let len = boxed.len();
    unsafe {
        *out_ptr = Box::into_raw(boxed) as *mut T;
        *out_len = len;
    }
}

unsafe fn free_slice<T>(ptr: *mut T, len: usize) {
    if !ptr.is_null() {
        drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(ptr, len)));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn voq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread; empty string if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn voq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// New configuration with default settings (matched verification splitter,
/// eta = 1, passive variant, 65-point phase sweep over one full period).
#[no_mangle]
pub extern "C" fn voq_config_new() -> *mut VoqConfig {
    Box::into_raw(Box::new(VoqConfig { inner: ExperimentConfig::default() }))
}

/// Parses a configuration from its JSON form. Returns null and sets the
/// error message on failure.
#[no_mangle]
pub unsafe extern "C" fn voq_config_from_json(json: *const c_char) -> *mut VoqConfig {
    if json.is_null() {
        set_error("json is null");
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("json is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match serde_json::from_str::<ExperimentConfig>(text).map_err(Error::from) {
        Ok(inner) => match inner.validate() {
            Ok(()) => Box::into_raw(Box::new(VoqConfig { inner })),
            Err(e) => {
                set_error(&e.to_string());
                std::ptr::null_mut()
            }
        },
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_clone(config: *const VoqConfig) -> *mut VoqConfig {
    if config.is_null() {
        set_error("config is null");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(VoqConfig { inner: (*config).inner.clone() }))
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_free(config: *mut VoqConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Serializes the configuration to JSON; free the string with
/// [`voq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn voq_config_to_json(
    config: *const VoqConfig,
    out_json: *mut *mut c_char,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(out_json);
    guarded(|| match serde_json::to_string(&(*config).inner) {
        Ok(text) => {
            let c = CString::new(text).expect("JSON has no NUL bytes");
            *out_json = c.into_raw();
            VoqStatus::Ok
        }
        Err(e) => report(Error::from(e)),
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn update(
    config: *mut VoqConfig,
    apply: impl FnOnce(&mut ExperimentConfig),
) -> VoqStatus {
    nonnull!(config);
    let current = &mut (*config).inner;
    let mut candidate = current.clone();
    apply(&mut candidate);
    match candidate.validate() {
        Ok(()) => {
            *current = candidate;
            VoqStatus::Ok
        }
        Err(e) => report(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_alpha_sq(
    config: *mut VoqConfig,
    alpha_sq: f64,
) -> VoqStatus {
    update(config, |c| c.alpha_sq = alpha_sq)
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_bsb_r_sq(config: *mut VoqConfig, r_sq: f64) -> VoqStatus {
    update(config, |c| c.bsb_r_sq = Some(r_sq))
}

/// Removes the explicit verification reflectivity so it matches alpha_sq.
#[no_mangle]
pub unsafe extern "C" fn voq_config_match_bsb(config: *mut VoqConfig) -> VoqStatus {
    update(config, |c| c.bsb_r_sq = None)
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_eta(config: *mut VoqConfig, eta: f64) -> VoqStatus {
    update(config, |c| c.eta = eta)
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_variant(
    config: *mut VoqConfig,
    variant: VoqVariant,
) -> VoqStatus {
    update(config, |c| {
        c.variant = match variant {
            VoqVariant::Passive => Variant::Passive,
            VoqVariant::Active => Variant::Active,
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_shots(config: *mut VoqConfig, shots: u64) -> VoqStatus {
    update(config, |c| c.shots = shots)
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_seed(config: *mut VoqConfig, seed: u64) -> VoqStatus {
    update(config, |c| c.seed = seed)
}

/// Sets a phase sweep in radians, replacing any mirror sweep.
#[no_mangle]
pub unsafe extern "C" fn voq_config_set_phase_sweep(
    config: *mut VoqConfig,
    start_rad: f64,
    stop_rad: f64,
    steps: usize,
) -> VoqStatus {
    update(config, |c| {
        c.phase = Some(PhaseSweep { start: start_rad, stop: stop_rad, steps });
        c.mirror = None;
    })
}

/// Sets a mirror-position sweep in micrometers, replacing any phase sweep.
#[no_mangle]
pub unsafe extern "C" fn voq_config_set_mirror_sweep(
    config: *mut VoqConfig,
    start_um: f64,
    stop_um: f64,
    steps: usize,
) -> VoqStatus {
    update(config, |c| {
        c.mirror = Some(MirrorSweep { start_um, stop_um, steps, lambda_um: None });
        c.phase = None;
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_config_set_lambda_um(
    config: *mut VoqConfig,
    lambda_um: f64,
) -> VoqStatus {
    update(config, |c| c.lambda_um = lambda_um)
}

/// Analytic fringe scan over the configured sweep. On success writes a
/// heap-allocated array; release it with [`voq_fringe_points_free`].
#[no_mangle]
pub unsafe extern "C" fn voq_fringe_scan(
    config: *const VoqConfig,
    out_points: *mut *mut VoqFringePoint,
    out_len: *mut usize,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(out_points);
    nonnull!(out_len);
    guarded(|| match fringe_scan(&(*config).inner) {
        Ok(records) => {
            let points: Vec<VoqFringePoint> = records.iter().map(point_of).collect();
            leak_slice(points, out_points, out_len);
            VoqStatus::Ok
        }
        Err(e) => report(e),
    })
}

/// Monte Carlo counting run; the returned points carry sampled coincidence
/// counts alongside the analytic probabilities.
#[no_mangle]
pub unsafe extern "C" fn voq_simulate_counts(
    config: *const VoqConfig,
    out_points: *mut *mut VoqFringePoint,
    out_len: *mut usize,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(out_points);
    nonnull!(out_len);
    guarded(|| match simulate_counts(&(*config).inner) {
        Ok(run) => {
            let points: Vec<VoqFringePoint> =
                run.points.iter().map(|p| point_of(&p.record)).collect();
            leak_slice(points, out_points, out_len);
            VoqStatus::Ok
        }
        Err(e) => report(e),
    })
}

/// Full counting-run report (config echo, per-point tallies and fits) as a
/// JSON string; free it with [`voq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn voq_simulate_counts_json(
    config: *const VoqConfig,
    out_json: *mut *mut c_char,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(out_json);
    guarded(|| {
        let run = match simulate_counts(&(*config).inner) {
            Ok(run) => run,
            Err(e) => return report(e),
        };
        match serde_json::to_string(&run) {
            Ok(text) => {
                let c = CString::new(text).expect("JSON has no NUL bytes");
                *out_json = c.into_raw();
                VoqStatus::Ok
            }
            Err(e) => report(Error::from(e)),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_fringe_points_free(points: *mut VoqFringePoint, len: usize) {
    free_slice(points, len);
}

/// Bell-outcome probabilities for the configured input qubit.
#[no_mangle]
pub unsafe extern "C" fn voq_bell_stats(
    config: *const VoqConfig,
    out_stats: *mut VoqBellStats,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(out_stats);
    guarded(|| {
        let input = match (*config).inner.input() {
            Ok(input) => input,
            Err(e) => return report(e),
        };
        match bell_statistics(&input) {
            Ok(stats) => {
                *out_stats = VoqBellStats {
                    psi1: stats.psi1,
                    psi2: stats.psi2,
                    psi3: stats.psi3,
                    psi4: stats.psi4,
                };
                VoqStatus::Ok
            }
            Err(e) => report(e),
        }
    })
}

/// Visibility of one pair's conditional fringe for each alpha_sq in the
/// given grid. Release the array with [`voq_visibility_points_free`].
#[no_mangle]
pub unsafe extern "C" fn voq_visibility_sweep(
    config: *const VoqConfig,
    pair: VoqPair,
    alpha_sq: *const f64,
    alpha_len: usize,
    out_points: *mut *mut VoqVisibilityPoint,
    out_len: *mut usize,
) -> VoqStatus {
    nonnull!(config);
    nonnull!(alpha_sq);
    nonnull!(out_points);
    nonnull!(out_len);
    guarded(|| {
        let grid = std::slice::from_raw_parts(alpha_sq, alpha_len);
        match visibility_sweep(&(*config).inner, grid, pair.id()) {
            Ok(points) => {
                let points: Vec<VoqVisibilityPoint> = points
                    .iter()
                    .map(|p| VoqVisibilityPoint {
                        alpha_sq: p.alpha_sq,
                        visibility: p.visibility,
                        degenerate: p.degenerate,
                    })
                    .collect();
                leak_slice(points, out_points, out_len);
                VoqStatus::Ok
            }
            Err(e) => report(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_visibility_points_free(
    points: *mut VoqVisibilityPoint,
    len: usize,
) {
    free_slice(points, len);
}

/// Least-squares fringe fit on (phi, value) samples of equal length.
#[no_mangle]
pub unsafe extern "C" fn voq_fit(
    phi_rad: *const f64,
    values: *const f64,
    len: usize,
    out_fit: *mut VoqFitResult,
) -> VoqStatus {
    nonnull!(phi_rad);
    nonnull!(values);
    nonnull!(out_fit);
    guarded(|| {
        let phi = std::slice::from_raw_parts(phi_rad, len);
        let val = std::slice::from_raw_parts(values, len);
        let samples: Vec<(f64, f64)> = phi.iter().copied().zip(val.iter().copied()).collect();
        match fit_visibility(&samples) {
            Ok(fit) => {
                *out_fit = VoqFitResult {
                    v: fit.v,
                    phi0: fit.phi0,
                    a: fit.a,
                    residual_norm: fit.residual_norm,
                    v_stderr: fit.v_stderr,
                    phi0_stderr: fit.phi0_stderr,
                    a_stderr: fit.a_stderr,
                };
                VoqStatus::Ok
            }
            Err(e) => report(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn voq_mirror_to_phase(
    x_um: f64,
    lambda_um: f64,
    out_phi_rad: *mut f64,
) -> VoqStatus {
    nonnull!(out_phi_rad);
    match mirror_to_phase(x_um, lambda_um) {
        Ok(phi) => {
            *out_phi_rad = phi;
            VoqStatus::Ok
        }
        Err(e) => report(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn voq_phase_to_mirror(
    phi_rad: f64,
    lambda_um: f64,
    out_x_um: *mut f64,
) -> VoqStatus {
    nonnull!(out_x_um);
    match phase_to_mirror(phi_rad, lambda_um) {
        Ok(x) => {
            *out_x_um = x;
            VoqStatus::Ok
        }
        Err(e) => report(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(voq_last_error_message()).to_str().unwrap().to_string() }
    }

    #[test]
    fn version_is_a_static_string() {
        let v = unsafe { CStr::from_ptr(voq_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn setters_validate_and_report_errors() {
        let config = voq_config_new();
        unsafe {
            assert_eq!(voq_config_set_alpha_sq(config, 0.3), VoqStatus::Ok);
            assert_eq!(voq_config_set_alpha_sq(config, 1.5), VoqStatus::InvalidConfig);
            assert!(last_error().contains("alpha_sq"));
            assert_eq!(voq_config_set_eta(config, -0.1), VoqStatus::InvalidConfig);
            let mut json: *mut c_char = std::ptr::null_mut();
            assert_eq!(voq_config_to_json(config, &mut json), VoqStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"alpha_sq\":0.3"));
            voq_string_free(json);
            voq_config_free(config);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut len = 0usize;
            let mut points: *mut VoqFringePoint = std::ptr::null_mut();
            assert_eq!(
                voq_fringe_scan(std::ptr::null(), &mut points, &mut len),
                VoqStatus::NullArgument
            );
            assert!(!last_error().is_empty());
            let config = voq_config_new();
            assert_eq!(
                voq_fringe_scan(config, std::ptr::null_mut(), &mut len),
                VoqStatus::NullArgument
            );
            assert_eq!(voq_bell_stats(config, std::ptr::null_mut()), VoqStatus::NullArgument);
            voq_config_free(config);
            assert!(voq_config_from_json(std::ptr::null()).is_null());
        }
    }

    #[test]
    fn fringe_scan_matches_the_symmetric_form() {
        let config = voq_config_new();
        unsafe {
            assert_eq!(voq_config_set_alpha_sq(config, 0.5), VoqStatus::Ok);
            assert_eq!(voq_config_set_bsb_r_sq(config, 0.5), VoqStatus::Ok);
            assert_eq!(
                voq_config_set_phase_sweep(config, 0.0, std::f64::consts::TAU, 9),
                VoqStatus::Ok
            );
            let mut points: *mut VoqFringePoint = std::ptr::null_mut();
            let mut len = 0usize;
            assert_eq!(voq_fringe_scan(config, &mut points, &mut len), VoqStatus::Ok);
            assert_eq!(len, 9);
            let slice = std::slice::from_raw_parts(points, len);
            for p in slice {
                let like = 0.5 * (p.phi_rad / 2.0).sin().powi(2);
                assert!((p.p_conditional[VoqPair::D1D1s as usize] - like).abs() < 1e-12);
                assert!((p.p_conditional[VoqPair::D2D2s as usize] - like).abs() < 1e-12);
            }
            voq_fringe_points_free(points, len);
            voq_config_free(config);
        }
    }

    #[test]
    fn bell_stats_match_the_branch_probabilities() {
        let config = voq_config_new();
        unsafe {
            assert_eq!(voq_config_set_alpha_sq(config, 0.3), VoqStatus::Ok);
            let mut stats = VoqBellStats { psi1: 0.0, psi2: 0.0, psi3: 0.0, psi4: 0.0 };
            assert_eq!(voq_bell_stats(config, &mut stats), VoqStatus::Ok);
            assert!((stats.psi1 - 0.15).abs() < 1e-12);
            assert!((stats.psi2 - 0.35).abs() < 1e-12);
            assert!((stats.psi3 - 0.25).abs() < 1e-12);
            assert!((stats.psi4 - 0.25).abs() < 1e-12);
            voq_config_free(config);
        }
    }

    #[test]
    fn visibility_peaks_where_the_splitter_matches() {
        let config = voq_config_new();
        unsafe {
            assert_eq!(voq_config_set_bsb_r_sq(config, 0.2), VoqStatus::Ok);
            let grid = [0.2f64, 0.5, 0.8];
            let mut points: *mut VoqVisibilityPoint = std::ptr::null_mut();
            let mut len = 0usize;
            assert_eq!(
                voq_visibility_sweep(config, VoqPair::D1D1s, grid.as_ptr(), 3, &mut points, &mut len),
                VoqStatus::Ok
            );
            let slice = std::slice::from_raw_parts(points, len);
            assert!((slice[2].visibility - 1.0).abs() < 1e-9);
            assert!((slice[1].visibility - 0.8).abs() < 1e-9);
            assert!(!slice[0].degenerate);
            voq_visibility_points_free(points, len);
            voq_config_free(config);
        }
    }

    #[test]
    fn fit_recovers_a_clean_fringe() {
        let phi: Vec<f64> = (0..16).map(|i| std::f64::consts::TAU * i as f64 / 16.0).collect();
        let values: Vec<f64> = phi.iter().map(|p| 2.0 * (1.0 + 0.5 * p.cos())).collect();
        let mut fit = VoqFitResult {
            v: 0.0,
            phi0: 0.0,
            a: 0.0,
            residual_norm: 0.0,
            v_stderr: 0.0,
            phi0_stderr: 0.0,
            a_stderr: 0.0,
        };
        unsafe {
            assert_eq!(voq_fit(phi.as_ptr(), values.as_ptr(), 16, &mut fit), VoqStatus::Ok);
        }
        assert!((fit.v - 0.5).abs() < 1e-9);
        assert!((fit.a - 2.0).abs() < 1e-9);

        unsafe {
            assert_eq!(
                voq_fit(phi.as_ptr(), values.as_ptr(), 3, &mut fit),
                VoqStatus::Runtime
            );
            assert!(!last_error().is_empty());
        }
    }

    #[test]
    fn counting_runs_are_deterministic_through_the_abi() {
        let config = voq_config_new();
        unsafe {
            assert_eq!(voq_config_set_bsb_r_sq(config, 0.5), VoqStatus::Ok);
            assert_eq!(voq_config_set_shots(config, 2000), VoqStatus::Ok);
            assert_eq!(voq_config_set_seed(config, 11), VoqStatus::Ok);
            assert_eq!(
                voq_config_set_phase_sweep(config, std::f64::consts::PI, std::f64::consts::PI, 1),
                VoqStatus::Ok
            );
            let mut a: *mut c_char = std::ptr::null_mut();
            let mut b: *mut c_char = std::ptr::null_mut();
            assert_eq!(voq_simulate_counts_json(config, &mut a), VoqStatus::Ok);
            assert_eq!(voq_simulate_counts_json(config, &mut b), VoqStatus::Ok);
            assert_eq!(CStr::from_ptr(a).to_bytes(), CStr::from_ptr(b).to_bytes());
            voq_string_free(a);
            voq_string_free(b);

            let mut points: *mut VoqFringePoint = std::ptr::null_mut();
            let mut len = 0usize;
            assert_eq!(voq_simulate_counts(config, &mut points, &mut len), VoqStatus::Ok);
            assert_eq!(len, 1);
            let total: u64 = (*points).counts.iter().sum();
            assert!(total > 0 && total <= 2000);
            voq_fringe_points_free(points, len);
            voq_config_free(config);
        }
    }

    #[test]
    fn json_round_trip_preserves_the_config() {
        let json = r#"{"alpha_sq": 0.3, "bsb_r_sq": 0.2, "eta": 0.45, "seed": 5}"#;
        let c_json = CString::new(json).unwrap();
        unsafe {
            let config = voq_config_from_json(c_json.as_ptr());
            assert!(!config.is_null());
            let mut out: *mut c_char = std::ptr::null_mut();
            assert_eq!(voq_config_to_json(config, &mut out), VoqStatus::Ok);
            let text = CStr::from_ptr(out).to_str().unwrap().to_string();
            assert!(text.contains("\"eta\":0.45"));
            voq_string_free(out);
            voq_config_free(config);

            let bad = CString::new(r#"{"alpha_sq": 7.0}"#).unwrap();
            assert!(voq_config_from_json(bad.as_ptr()).is_null());
            assert!(last_error().contains("alpha_sq"));
        }
    }

    #[test]
    fn mirror_conversion_round_trips() {
        let mut phi = 0.0f64;
        let mut x = 0.0f64;
        unsafe {
            assert_eq!(
                voq_phase_to_mirror(std::f64::consts::TAU, 0.7276, &mut x),
                VoqStatus::Ok
            );
            assert!((x - 0.7276 / 2.0f64.sqrt()).abs() < 1e-12);
            assert_eq!(voq_mirror_to_phase(x, 0.7276, &mut phi), VoqStatus::Ok);
            assert!((phi - std::f64::consts::TAU).abs() < 1e-12);
            assert_eq!(voq_mirror_to_phase(x, 0.0, &mut phi), VoqStatus::InvalidConfig);
        }
    }

    #[test]
    fn generated_header_declares_the_api() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("voqsim.h");
        let text = std::fs::read_to_string(&header)
            .unwrap_or_else(|e| panic!("{}: {e}", header.display()));
        for symbol in [
            "voq_config_new",
            "voq_fringe_scan",
            "voq_simulate_counts_json",
            "voq_bell_stats",
            "voq_visibility_sweep",
            "voq_fit",
            "voq_last_error_message",
            "VoqFringePoint",
            "VOQ_STATUS_OK",
        ] {
            assert!(text.contains(symbol), "header is missing {symbol}");
        }
    }
}
