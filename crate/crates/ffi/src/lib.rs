//! C ABI over the solwave library.
//!
//! Every fallible function returns an `SwStatus`; on failure the message is
//! available from `sw_last_error_message` on the same thread. Handles are
//! opaque, owned by the caller, and released with their `*_free` function.
//! Panics never cross the boundary; they surface as `SW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use solwave::closed_form;
use solwave::config::parse_config;
use solwave::dynamics::{evolve, symmetry_distance, EvolutionConfig};
use solwave::field::{Field, Grid, State};
use solwave::groundstate::{minimize, ConstraintPair, GroundState, MinimizerConfig};
use solwave::model::{self, Coupling, ModelParams, MultiplierPair};
use solwave::run::execute;
use solwave::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    DegenerateConstraint = 4,
    InvalidFamily = 5,
    SupportOverlap = 6,
    Diverged = 7,
    NumericalBlowup = 8,
    Io = 9,
    Internal = 10,
    Panic = 11,
}

impl From<&Error> for SwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => SwStatus::InvalidArgument,
            Error::DegenerateConstraint(_) => SwStatus::DegenerateConstraint,
            Error::InvalidFamily(_) => SwStatus::InvalidFamily,
            Error::SupportOverlap { .. } => SwStatus::SupportOverlap,
            Error::Diverged { .. } => SwStatus::Diverged,
            Error::NumericalBlowup { .. } => SwStatus::NumericalBlowup,
            Error::Config { .. } | Error::Json(_) => SwStatus::Config,
            Error::Io(_) | Error::Csv(_) => SwStatus::Io,
            _ => SwStatus::Internal,
        }
    }
}

/// Model parameters.
pub struct SwParams(ModelParams);
/// Periodic grid.
pub struct SwGrid(Grid);
/// Two-component complex state on a grid.
pub struct SwState(State);
/// Result of a constrained minimization.
pub struct SwGroundState(GroundState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(SwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(SwStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SwStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SwStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sw_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr().cast()
}

/// Build model parameters with `n_couplings` terms `(tau[k], q[k])`.
///
/// # Safety
/// `tau` and `q` must point to `n_couplings` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_params_new(
    alpha: f64,
    beta: f64,
    p: f64,
    r: f64,
    tau: *const f64,
    q: *const f64,
    n_couplings: usize,
    out: *mut *mut SwParams,
) -> SwStatus {
    guard(|| {
        let tau = slice(tau, n_couplings, "tau")?;
        let q = slice(q, n_couplings, "q")?;
        let couplings = tau.iter().zip(q).map(|(&tau, &q)| Coupling { tau, q }).collect();
        let params = ModelParams::new(alpha, beta, p, r, couplings)?;
        write_out(out, boxed(SwParams(params)), "out")
    })
}

/// # Safety
/// `params` must come from `sw_params_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sw_params_free(params: *mut SwParams) {
    free(params)
}

/// Periodic grid on `[-half_length, half_length)` with `n` points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_grid_new(half_length: f64, n: usize, out: *mut *mut SwGrid) -> SwStatus {
    guard(|| write_out(out, boxed(SwGrid(Grid::new(half_length, n)?)), "out"))
}

/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn sw_grid_len(grid: *const SwGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must come from `sw_grid_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sw_grid_free(grid: *mut SwGrid) {
    free(grid)
}

/// State from split real and imaginary sample arrays of the grid's length.
///
/// # Safety
/// Each array must hold `sw_grid_len(grid)` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_state_new(
    grid: *const SwGrid,
    u_re: *const f64,
    u_im: *const f64,
    v_re: *const f64,
    v_im: *const f64,
    out: *mut *mut SwState,
) -> SwStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        let n = g.len();
        let field = |re: &[f64], im: &[f64]| {
            Field::from_values(g, re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
        };
        let u = field(slice(u_re, n, "u_re")?, slice(u_im, n, "u_im")?);
        let v = field(slice(v_re, n, "v_re")?, slice(v_im, n, "v_im")?);
        write_out(out, boxed(SwState(State::new(u, v))), "out")
    })
}

/// Number of samples per component.
///
/// # Safety
/// `state` must be null or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn sw_state_len(state: *const SwState) -> usize {
    state.as_ref().map_or(0, |s| s.0.grid().len())
}

/// Copy the samples into caller arrays of length `len`, which must equal
/// `sw_state_len(state)`. Null arrays are skipped.
///
/// # Safety
/// Non-null arrays must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sw_state_copy(
    state: *const SwState,
    u_re: *mut f64,
    u_im: *mut f64,
    v_re: *mut f64,
    v_im: *mut f64,
    len: usize,
) -> SwStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        if len != s.grid().len() {
            return Err(Failure(
                SwStatus::InvalidArgument,
                format!("buffer length {len} does not match the grid ({})", s.grid().len()),
            ));
        }
        for (f, re, im) in [(&s.u, u_re, u_im), (&s.v, v_re, v_im)] {
            for (i, z) in f.values().iter().enumerate() {
                if !re.is_null() {
                    re.add(i).write(z.re);
                }
                if !im.is_null() {
                    im.add(i).write(z.im);
                }
            }
        }
        Ok(())
    })
}

/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sw_state_free(state: *mut SwState) {
    free(state)
}

/// Closed-form `(φ, φ)` pair at frequency `omega` for equal self-interaction `alpha`.
///
/// # Safety
/// `grid` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_symmetric_pair(grid: *const SwGrid, alpha: f64, omega: f64, out: *mut *mut SwState) -> SwStatus {
    guard(|| {
        let s = closed_form::symmetric_pair(alpha, omega, &deref(grid, "grid")?.0)?;
        write_out(out, boxed(SwState(s)), "out")
    })
}

/// Energy of a state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_energy(params: *const SwParams, state: *const SwState, out: *mut f64) -> SwStatus {
    guard(|| {
        let e = model::energy(&deref(params, "params")?.0, &deref(state, "state")?.0);
        write_out(out, e, "out")
    })
}

/// Masses of both components.
///
/// # Safety
/// `state` must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_mass(state: *const SwState, out_u: *mut f64, out_v: *mut f64) -> SwStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        write_out(out_u, model::mass(&s.u), "out_u")?;
        write_out(out_v, model::mass(&s.v), "out_v")
    })
}

/// Euler-Lagrange residual under multipliers `(omega1, omega2)`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_el_residual(
    params: *const SwParams,
    state: *const SwState,
    omega1: f64,
    omega2: f64,
    out: *mut f64,
) -> SwStatus {
    guard(|| {
        let r = model::el_residual(
            &deref(params, "params")?.0,
            &deref(state, "state")?.0,
            MultiplierPair { omega1, omega2 },
        );
        write_out(out, r, "out")
    })
}

/// Minimize the energy at masses `(s, t)` on the grid with default
/// multistart settings and tolerance `tol`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_minimize(
    params: *const SwParams,
    grid: *const SwGrid,
    s: f64,
    t: f64,
    tol: f64,
    max_iter: usize,
    out: *mut *mut SwGroundState,
) -> SwStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        let cfg = MinimizerConfig {
            half_length: g.half_length(),
            points: g.len(),
            tol,
            max_iter,
            ..Default::default()
        };
        let gs = minimize(&deref(params, "params")?.0, ConstraintPair::new(s, t)?, &cfg)?;
        write_out(out, boxed(SwGroundState(gs)), "out")
    })
}

/// Energy, multipliers, residual and iteration count of a ground state.
/// Null outputs are skipped.
///
/// # Safety
/// `gs` must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_ground_state_info(
    gs: *const SwGroundState,
    theta: *mut f64,
    omega1: *mut f64,
    omega2: *mut f64,
    residual: *mut f64,
    iterations: *mut usize,
) -> SwStatus {
    guard(|| {
        let g = &deref(gs, "ground_state")?.0;
        for (p, v) in [
            (theta, g.theta),
            (omega1, g.multipliers.omega1),
            (omega2, g.multipliers.omega2),
            (residual, g.residual),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        if !iterations.is_null() {
            iterations.write(g.iterations);
        }
        Ok(())
    })
}

/// Copy of the minimizing profile as a new state handle.
///
/// # Safety
/// `gs` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_ground_state_profile(gs: *const SwGroundState, out: *mut *mut SwState) -> SwStatus {
    guard(|| {
        let g = &deref(gs, "ground_state")?.0;
        write_out(out, boxed(SwState(g.profile.clone())), "out")
    })
}

/// # Safety
/// `gs` must come from `sw_minimize` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sw_ground_state_free(gs: *mut SwGroundState) {
    free(gs)
}

/// Integrate from `state` to time `horizon` with step `dt`, returning the
/// final state and the relative energy drift.
///
/// # Safety
/// Handles must be live; `out` must be writable; `drift_h` may be null.
#[no_mangle]
pub unsafe extern "C" fn sw_evolve(
    params: *const SwParams,
    state: *const SwState,
    dt: f64,
    horizon: f64,
    out: *mut *mut SwState,
    drift_h: *mut f64,
) -> SwStatus {
    guard(|| {
        let cfg = EvolutionConfig {
            dt,
            horizon,
            ..Default::default()
        };
        let (end, report) = evolve(&deref(params, "params")?.0, &deref(state, "state")?.0, &cfg)?;
        if !drift_h.is_null() {
            drift_h.write(report.drift_h);
        }
        write_out(out, boxed(SwState(end)), "out")
    })
}

/// Distance from `state` to the symmetry orbit of `reference`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_symmetry_distance(state: *const SwState, reference: *const SwState, out: *mut f64) -> SwStatus {
    guard(|| {
        let a = symmetry_distance(&deref(state, "state")?.0, &deref(reference, "reference")?.0)?;
        write_out(out, a.distance, "out")
    })
}

/// Run a JSON run configuration and return its JSON summary, to be
/// released with `sw_string_free`. Check failures still return `SW_STATUS_OK`;
/// inspect the summary.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_run_json(config_json: *const c_char, out: *mut *mut c_char) -> SwStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| Failure(SwStatus::Config, format!("config is not UTF-8: {e}")))?;
        let outcome = execute(&parse_config(text)?)?;
        let c = CString::new(outcome.summary).map_err(|e| Failure(SwStatus::Internal, e.to_string()))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
