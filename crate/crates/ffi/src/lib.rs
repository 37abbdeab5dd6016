//! C ABI over `bec_coupling`.
//!
//! Every fallible call returns a [`BecStatus`]. On failure the message is
//! available from [`bec_last_error_message`] on the same thread. Handles are
//! created by `*_new`/`*_construct` and released by the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bec_coupling::de::{bp_threshold_coupled, Coupled, DeConfig, DeSystem, Variant};
use bec_coupling::distance::ss_exponent;
use bec_coupling::exit::{ebp_curve, map_threshold_via_area};
use bec_coupling::fp::{
    construct_one_sided_fp, family_area, FpConfig, InterpolatedFamily, OneSidedFP,
};
use bec_coupling::landscape::h_landscape;
use bec_coupling::thresholds::thresholds_regular;
use bec_coupling::{Error, RegularEnsemble};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecStatus {
    Ok = 0,
    /// Null pointer, out-of-range parameter or malformed input.
    InvalidArgument = 1,
    Precondition = 2,
    NoBracket = 3,
    NoNontrivialFixedPoint = 4,
    NoConvergence = 5,
    Unreachable = 6,
    Quadrature = 7,
    Empty = 8,
    BufferTooSmall = 9,
    /// A Rust panic was caught at the boundary.
    Panic = 10,
}

/// Density-evolution variant accepted by [`bec_system_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecVariant {
    Uncoupled = 0,
    Chain = 1,
    Smoothed = 2,
}

/// Regular `(l, r)` ensemble.
pub struct BecEnsemble {
    inner: RegularEnsemble,
}

/// Uncoupled, chain or smoothed DE system.
pub struct BecSystem {
    inner: Coupled,
}

/// One-sided fixed point.
pub struct BecFixedPoint {
    inner: OneSidedFP,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecThresholds {
    pub eps_bp: f64,
    pub eps_map: f64,
    pub x_bp: f64,
    pub x_map: f64,
    pub tolerance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecLandscape {
    pub eps: f64,
    pub x_u: f64,
    pub x_s: f64,
    pub x_star: f64,
    pub x_upstar: f64,
    pub kappa_star: f64,
    pub lambda_star: f64,
    pub kappa_upstar: f64,
    pub lambda_upstar: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecSsExponent {
    pub x_hat: f64,
    pub omega_hat: f64,
    pub l_omega_hat: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecFixedPointSummary {
    pub eps_star: f64,
    pub chi: f64,
    pub residual: f64,
    pub eps_spread: f64,
    pub length_bound: f64,
    pub proper: bool,
    pub v_iterations: usize,
    /// Number of sections, `L' + 1`.
    pub sections: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecArea {
    pub area: f64,
    pub bound: f64,
    pub design_rate: f64,
    pub residual: f64,
    pub intervals: usize,
    pub refinement_delta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(BecStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidParams(_) => BecStatus::InvalidArgument,
            Error::Precondition(_) => BecStatus::Precondition,
            Error::NoBracket { .. } => BecStatus::NoBracket,
            Error::NoNontrivialFixedPoint { .. } => BecStatus::NoNontrivialFixedPoint,
            Error::NoConvergence { .. } => BecStatus::NoConvergence,
            Error::Unreachable { .. } => BecStatus::Unreachable,
            Error::Quadrature(_) => BecStatus::Quadrature,
            Error::Empty(_) => BecStatus::Empty,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> BecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BecStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside bec_coupling".into());
            BecStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(BecStatus::InvalidArgument, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, v: T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

fn de_config(tolerance: f64, max_iterations: usize) -> DeConfig {
    DeConfig {
        tolerance,
        max_iterations,
        ..DeConfig::default()
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn bec_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(s) => s,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL after a success.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_new(l: u32, r: u32, out: *mut *mut BecEnsemble) -> BecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = RegularEnsemble::new(l, r)?;
        out.write(Box::into_raw(Box::new(BecEnsemble { inner })));
        Ok(())
    })
}

/// # Safety
/// `e` must be NULL or a handle from [`bec_ensemble_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_free(e: *mut BecEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_design_rate(
    e: *const BecEnsemble,
    out: *mut f64,
) -> BecStatus {
    guard(|| write(out, deref(e, "ensemble")?.inner.design_rate(), "out"))
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_thresholds(
    e: *const BecEnsemble,
    tol: f64,
    out: *mut BecThresholds,
) -> BecStatus {
    guard(|| {
        let t = thresholds_regular(&deref(e, "ensemble")?.inner, tol)?;
        let v = BecThresholds {
            eps_bp: t.eps_bp,
            eps_map: t.eps_map,
            x_bp: t.x_bp,
            x_map: t.x_map,
            tolerance: t.tolerance,
        };
        write(out, v, "out")
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_map_threshold_via_area(
    e: *const BecEnsemble,
    quad_tol: f64,
    out: *mut f64,
) -> BecStatus {
    guard(|| {
        write(
            out,
            map_threshold_via_area(&deref(e, "ensemble")?.inner, quad_tol)?,
            "out",
        )
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_h_landscape(
    e: *const BecEnsemble,
    eps: f64,
    tol: f64,
    out: *mut BecLandscape,
) -> BecStatus {
    guard(|| {
        let h = h_landscape(eps, &deref(e, "ensemble")?.inner, tol)?;
        let v = BecLandscape {
            eps: h.eps,
            x_u: h.x_u,
            x_s: h.x_s,
            x_star: h.x_star,
            x_upstar: h.x_upstar,
            kappa_star: h.kappa_star,
            lambda_star: h.lambda_star,
            kappa_upstar: h.kappa_upstar,
            lambda_upstar: h.lambda_upstar,
        };
        write(out, v, "out")
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ss_exponent(
    e: *const BecEnsemble,
    tol: f64,
    out: *mut BecSsExponent,
) -> BecStatus {
    guard(|| {
        let s = ss_exponent(&deref(e, "ensemble")?.inner, tol)?;
        write(
            out,
            BecSsExponent {
                x_hat: s.x_hat,
                omega_hat: s.omega_hat,
                l_omega_hat: s.l_omega_hat,
            },
            "out",
        )
    })
}

/// `variant` is a [`BecVariant`] value; `w` is ignored unless it is `BEC_VARIANT_SMOOTHED`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_system_new(
    variant: u32,
    l: u32,
    r: u32,
    half_length: usize,
    w: usize,
    out: *mut *mut BecSystem,
) -> BecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = match variant {
            0 => Variant::Uncoupled,
            1 => Variant::Chain,
            2 => Variant::Smoothed,
            other => {
                return Err(Fail(
                    BecStatus::InvalidArgument,
                    format!("unknown variant {other}"),
                ))
            }
        };
        let inner = Coupled::build(v, l, r, half_length, w)?;
        out.write(Box::into_raw(Box::new(BecSystem { inner })));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`bec_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bec_system_free(s: *mut BecSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_system_sections(s: *const BecSystem, out: *mut usize) -> BecStatus {
    guard(|| write(out, deref(s, "system")?.inner.sections(), "out"))
}

/// BP threshold of the system by bisection on forward-DE outcomes.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_system_bp_threshold(
    s: *const BecSystem,
    de_tol: f64,
    max_iterations: usize,
    bisect_tol: f64,
    out: *mut f64,
) -> BecStatus {
    guard(|| {
        let t = bp_threshold_coupled(
            &deref(s, "system")?.inner,
            &de_config(de_tol, max_iterations),
            bisect_tol,
        )?;
        write(out, t.eps, "out")
    })
}

/// EBP curve on `n` entropies; writes `n` values into each output array.
///
/// # Safety
/// `chi` must point to `n` readable doubles; `eps_out` and `h_out` to `n`
/// writable doubles; `converged_out` to `n` writable bytes or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bec_system_ebp_curve(
    s: *const BecSystem,
    chi: *const f64,
    n: usize,
    de_tol: f64,
    max_iterations: usize,
    eps_out: *mut f64,
    h_out: *mut f64,
    converged_out: *mut u8,
) -> BecStatus {
    guard(|| {
        let sys = deref(s, "system")?;
        if chi.is_null() || eps_out.is_null() || h_out.is_null() {
            return Err(null("chi/eps_out/h_out"));
        }
        let grid = std::slice::from_raw_parts(chi, n);
        let curve = ebp_curve(&sys.inner, grid, &de_config(de_tol, max_iterations))?;
        for (k, p) in curve.points.iter().enumerate() {
            eps_out.add(k).write(p.eps);
            h_out.add(k).write(p.h_ebp);
            if !converged_out.is_null() {
                converged_out.add(k).write(u8::from(p.converged));
            }
        }
        Ok(())
    })
}

/// One-sided fixed point of length `lp` at entropy `chi`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_fp_construct(
    l: u32,
    r: u32,
    w: usize,
    lp: usize,
    chi: f64,
    enforce_length_bound: bool,
    out: *mut *mut BecFixedPoint,
) -> BecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = FpConfig {
            enforce_length_bound,
            ..FpConfig::default()
        };
        let inner = construct_one_sided_fp(l, r, w, lp, chi, &cfg)?;
        out.write(Box::into_raw(Box::new(BecFixedPoint { inner })));
        Ok(())
    })
}

/// # Safety
/// `fp` must be NULL or a handle from [`bec_fp_construct`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bec_fp_free(fp: *mut BecFixedPoint) {
    if !fp.is_null() {
        drop(Box::from_raw(fp));
    }
}

/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_fp_summary(
    fp: *const BecFixedPoint,
    out: *mut BecFixedPointSummary,
) -> BecStatus {
    guard(|| {
        let f = &deref(fp, "fixed point")?.inner;
        let v = BecFixedPointSummary {
            eps_star: f.eps_star,
            chi: f.chi,
            residual: f.residual,
            eps_spread: f.eps_spread,
            length_bound: f.length_bound,
            proper: f.is_proper(),
            v_iterations: f.v_iterations,
            sections: f.length() + 1,
        };
        write(out, v, "out")
    })
}

/// Copies the sections `x_{-L'}, ..., x_0` into `buf`.
///
/// # Safety
/// `fp` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bec_fp_values(
    fp: *const BecFixedPoint,
    buf: *mut f64,
    len: usize,
) -> BecStatus {
    guard(|| {
        let f = &deref(fp, "fixed point")?.inner;
        let need = f.length() + 1;
        if len < need {
            return Err(Fail(
                BecStatus::BufferTooSmall,
                format!("buffer holds {len} values, need {need}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let lp = f.length() as isize;
        for (k, i) in (-lp..=0).enumerate() {
            buf.add(k).write(f.x.get(i));
        }
        Ok(())
    })
}

/// EXIT area of the interpolated family of half-length `half_length`.
///
/// # Safety
/// `fp` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bec_fp_family_area(
    fp: *const BecFixedPoint,
    half_length: usize,
    intervals: usize,
    out: *mut BecArea,
) -> BecStatus {
    guard(|| {
        let family = InterpolatedFamily::new(deref(fp, "fixed point")?.inner.clone(), half_length)?;
        let a = family_area(&family, intervals)?;
        let v = BecArea {
            area: a.a,
            bound: a.bound,
            design_rate: a.design_rate,
            residual: a.residual,
            intervals: a.intervals,
            refinement_delta: a.refinement_delta,
        };
        write(out, v, "out")
    })
}
