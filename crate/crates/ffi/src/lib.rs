//! C ABI for `renyi-epi`.
//!
//! Densities and grids are opaque heap handles that the caller releases with
//! the matching `*_free` function. Every function returns a [`ReStatus`];
//! results go through out-pointers. On failure the message is available
//! from [`re_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use renyi_epi::counterexamples::{epi_check, g_criterion};
use renyi_epi::density::{common_step, discretize_step, AnalyticDensity, GridConfig, GridDensity};
use renyi_epi::numerics::convolve;
use renyi_epi::renyi::{renyi_power, RenyiOrder};
use renyi_epi::specfun::{digamma, log_gamma};
use renyi_epi::young::{a_r, alpha_of_r};
use renyi_epi::Error;

/// Opaque analytic density.
pub struct ReDensity(AnalyticDensity);

/// Opaque sampled density.
pub struct ReGrid(GridDensity);

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    InvalidDensity = 4,
    InvalidGrid = 5,
    Truncation = 6,
    SpacingMismatch = 7,
    Numerical = 8,
    NotDifferentiable = 9,
    Inadmissible = 10,
    Parse = 11,
    Io = 12,
    Panic = 99,
}

/// Outcome of an inequality check: `holds` is `slack >= -tol`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReInequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ReStatus {
    match e {
        Error::Domain { .. } => ReStatus::Domain,
        Error::InvalidDensity(_) => ReStatus::InvalidDensity,
        Error::InvalidGrid(_) => ReStatus::InvalidGrid,
        Error::Truncation { .. } => ReStatus::Truncation,
        Error::SpacingMismatch(..) => ReStatus::SpacingMismatch,
        Error::Numerical(_) => ReStatus::Numerical,
        Error::NotDifferentiable(_) => ReStatus::NotDifferentiable,
        Error::Inadmissible(_) => ReStatus::Inadmissible,
        Error::Parse(_) => ReStatus::Parse,
        Error::Io(_) => ReStatus::Io,
    }
}

struct Fail(ReStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(ReStatus::NullPointer, format!("{name} is null"))
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ReStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ReStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            ReStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(v);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

fn order(r: f64) -> Result<RenyiOrder, Fail> {
    Ok(RenyiOrder::new(r)?)
}

fn scalar(out: *mut f64, f: impl FnOnce() -> renyi_epi::Result<f64>) -> ReStatus {
    guard(|| unsafe { write(out, f()?) })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn re_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn re_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn re_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a density such as `gaussian:1`, `uniform:0,1@2,0` or `beta`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_density_parse(text: *const c_char, out: *mut *mut ReDensity) -> ReStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(ReStatus::InvalidUtf8, e.to_string()))?;
        let d: AnalyticDensity = s.parse()?;
        write(out, Box::into_raw(Box::new(ReDensity(d))))
    })
}

/// # Safety
/// `d` must come from [`re_density_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn re_density_free(d: *mut ReDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Canonical text form of a density; release with [`re_string_free`].
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_density_to_string(d: *const ReDensity, out: *mut *mut c_char) -> ReStatus {
    guard(|| {
        let d = borrow(d, "density")?;
        let s = CString::new(d.0.to_string()).map_err(|e| Fail(ReStatus::InvalidUtf8, e.to_string()))?;
        write(out, s.into_raw())
    })
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_density_eval(d: *const ReDensity, x: f64, out: *mut f64) -> ReStatus {
    guard(|| write(out, borrow(d, "density")?.0.eval(x)))
}

/// Entropy power `N_r` from closed forms. `r = 1` is Shannon and
/// `r = INFINITY` the sup order.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_density_renyi_power(d: *const ReDensity, r: f64, out: *mut f64) -> ReStatus {
    guard(|| {
        let d = borrow(d, "density")?;
        write(out, renyi_power(&d.0, order(r)?)?)
    })
}

/// Samples a density with `grid_n` points across its default window.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_density_discretize(
    d: *const ReDensity,
    grid_n: usize,
    window_factor: f64,
    out: *mut *mut ReGrid,
) -> ReStatus {
    guard(|| {
        let d = borrow(d, "density")?;
        let config = GridConfig { n: grid_n, window_factor };
        let dx = common_step(&[d.0], &config)?;
        let g = discretize_step(&d.0, dx, window_factor)?;
        write(out, Box::into_raw(Box::new(ReGrid(g))))
    })
}

/// Builds a grid from `len` samples at `x0 + i·dx`, renormalized to unit mass.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_grid_new(
    x0: f64,
    dx: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut ReGrid,
) -> ReStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let g = GridDensity::normalized(x0, dx, v)?;
        write(out, Box::into_raw(Box::new(ReGrid(g))))
    })
}

/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn re_grid_free(g: *mut ReGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn re_grid_len(g: *const ReGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `g` must be a live handle; `x0` and `dx` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_grid_geometry(g: *const ReGrid, x0: *mut f64, dx: *mut f64) -> ReStatus {
    guard(|| {
        let g = borrow(g, "grid")?;
        write(x0, g.0.x0())?;
        write(dx, g.0.dx())
    })
}

/// Borrowed pointer to the samples, valid while the handle lives.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn re_grid_values(g: *const ReGrid) -> *const f64 {
    g.as_ref().map_or(ptr::null(), |g| g.0.values().as_ptr())
}

/// Density of the sum of independent variables with grids `a` and `b`,
/// which must share a spacing.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_grid_convolve(a: *const ReGrid, b: *const ReGrid, out: *mut *mut ReGrid) -> ReStatus {
    guard(|| {
        let c = convolve(&borrow(a, "a")?.0, &borrow(b, "b")?.0)?;
        write(out, Box::into_raw(Box::new(ReGrid(c))))
    })
}

/// Entropy power of a grid by quadrature; orders as in
/// [`re_density_renyi_power`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_grid_renyi_power(g: *const ReGrid, r: f64, out: *mut f64) -> ReStatus {
    guard(|| {
        let g = borrow(g, "grid")?;
        write(out, renyi_power(&g.0, order(r)?)?)
    })
}

/// `N_r(X+Y)^α ≥ N_r(X)^α + N_r(Y)^α` with the sum convolved on a grid.
///
/// # Safety
/// `x`, `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_epi_check(
    x: *const ReDensity,
    y: *const ReDensity,
    r: f64,
    alpha: f64,
    grid_n: usize,
    window_factor: f64,
    out: *mut ReInequalityReport,
) -> ReStatus {
    guard(|| {
        let config = GridConfig { n: grid_n, window_factor };
        let rep = epi_check(&borrow(x, "x")?.0, &borrow(y, "y")?.0, r, alpha, &config)?;
        write(
            out,
            ReInequalityReport {
                lhs: rep.lhs,
                rhs: rep.rhs,
                slack: rep.slack,
                tol: rep.tol,
                holds: rep.holds,
            },
        )
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_a_r(r: f64, out: *mut f64) -> ReStatus {
    scalar(out, || a_r(r))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_alpha_of_r(r: f64, out: *mut f64) -> ReStatus {
    scalar(out, || alpha_of_r(r))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_g_criterion(p: f64, r: f64, out: *mut f64) -> ReStatus {
    scalar(out, || g_criterion(p, r))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_log_gamma(x: f64, out: *mut f64) -> ReStatus {
    scalar(out, || log_gamma(x))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn re_digamma(x: f64, out: *mut f64) -> ReStatus {
    scalar(out, || digamma(x))
}
