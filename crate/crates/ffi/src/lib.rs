//! C ABI for `telescore`.
//!
//! Every fallible function returns a [`TsStatus`]; on failure a message is
//! kept per thread and can be read with [`ts_last_error`]. Handles are opaque
//! and must be released with their `_free` function. Panics never cross the
//! boundary; they become `TS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use telescore::metrics::{evaluate, k_star, AverageMethod, Resource, ScoreRecord};
use telescore::sweep::{find_alpha_nk, sweep_alpha, SweepRow};
use telescore::teleport::{teleport_fidelity, ChainSpec};
use telescore::{BlochParam, Error, NoiseModel, SchmidtParam};

#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    TS_OK = 0,
    TS_NULL_POINTER = 1,
    TS_INVALID_ARGUMENT = 2,
    TS_INVALID_MODEL = 3,
    TS_NUMERICAL = 4,
    TS_OUT_OF_RANGE = 5,
    TS_INVALID_UTF8 = 6,
    TS_PANIC = 7,
}

/// A parsed noise model.
pub struct TsNoiseModel {
    inner: NoiseModel,
}

/// Rows produced by [`ts_sweep_run`].
pub struct TsSweep {
    rows: Vec<SweepRow>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsScore {
    pub f: f64,
    pub d: f64,
    pub k: f64,
    pub tau: f64,
    pub tau_classical: f64,
    pub quantum_useful: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsSweepRow {
    pub alpha: f64,
    pub k: f64,
    pub f: f64,
    pub d: f64,
    pub tau: f64,
    pub tau_noiseless: f64,
    pub tau_classical: f64,
    pub nonclassical: bool,
    pub beats_noiseless: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsCrossover {
    pub p: f64,
    pub k: f64,
    pub alpha_cl: f64,
    /// Meaningful only when `has_alpha_nk` is set.
    pub alpha_nk: f64,
    pub has_alpha_nk: bool,
    /// `|closed form - bisection|`.
    pub route_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.as_bytes().to_vec());
}

fn status_of(e: &Error) -> TsStatus {
    match e {
        Error::ModelSpec { .. } => TsStatus::TS_INVALID_MODEL,
        Error::InvalidParameter { .. } | Error::EmptyGrid | Error::InvalidGrid => {
            TsStatus::TS_INVALID_ARGUMENT
        }
        _ => TsStatus::TS_NUMERICAL,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (TsStatus, String)>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsStatus::TS_OK,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsStatus::TS_PANIC
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (TsStatus, String)>;
}

impl<T> IntoFfi<T> for telescore::Result<T> {
    fn ffi(self) -> Result<T, (TsStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (TsStatus, String) {
    (TsStatus::TS_NULL_POINTER, format!("`{what}` is null"))
}

unsafe fn model_ref<'a>(m: *const TsNoiseModel) -> Result<&'a NoiseModel, (TsStatus, String)> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (TsStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(
    p: *const f64,
    len: usize,
    what: &str,
) -> Result<&'a [f64], (TsStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

fn to_score(r: ScoreRecord) -> TsScore {
    TsScore {
        f: r.f,
        d: r.d,
        k: r.k,
        tau: r.tau,
        tau_classical: r.tau_classical,
        quantum_useful: r.quantum_useful,
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ts_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ts_status_message(status: TsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        TsStatus::TS_OK => c"ok",
        TsStatus::TS_NULL_POINTER => c"null pointer",
        TsStatus::TS_INVALID_ARGUMENT => c"invalid argument",
        TsStatus::TS_INVALID_MODEL => c"invalid model spec",
        TsStatus::TS_NUMERICAL => c"numerical failure",
        TsStatus::TS_OUT_OF_RANGE => c"index out of range",
        TsStatus::TS_INVALID_UTF8 => c"string is not UTF-8",
        TsStatus::TS_PANIC => c"internal panic",
    };
    s.as_ptr()
}

/// Parses a model spec such as `bit_flip:p=0.7,q=1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_model_parse(
    spec: *const c_char,
    out: *mut *mut TsNoiseModel,
) -> TsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if spec.is_null() {
            return Err(null("spec"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| (TsStatus::TS_INVALID_UTF8, "spec is not UTF-8".to_string()))?;
        let inner: NoiseModel = text.parse().ffi()?;
        *out = Box::into_raw(Box::new(TsNoiseModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`ts_model_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_model_free(model: *mut TsNoiseModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Canonical spec string of `model`, written like [`ts_last_error`]. Returns
/// the full length, or 0 if `model` is null.
///
/// # Safety
/// `model` must be null or a live handle; `buf` null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ts_model_spec(
    model: *const TsNoiseModel,
    buf: *mut c_char,
    len: usize,
) -> usize {
    let Some(m) = model.as_ref() else { return 0 };
    let s = m.inner.to_string();
    if !buf.is_null() && len > 0 {
        let n = s.len().min(len - 1);
        ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), n);
        *buf.add(n) = 0;
    }
    s.len()
}

/// Score of an `n`-link resource (`n = 1` for a single link) from the
/// closed-form catalog, falling back to quadrature.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_score(
    model: *const TsNoiseModel,
    alpha: f64,
    n: u32,
    k: f64,
    out: *mut TsScore,
) -> TsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_ref(out, "out")?;
        let a = SchmidtParam::new(alpha).ffi()?;
        let resource = if n == 1 {
            Resource::Schmidt(a)
        } else {
            Resource::Chain(ChainSpec::new(n, a).ffi()?)
        };
        let e = evaluate(m, resource, AverageMethod::ClosedForm).ffi()?;
        *out = to_score(ScoreRecord::new(e.fidelity, e.deviation, k).ffi()?);
        Ok(())
    })
}

/// Fidelity of teleporting the input at Bloch angles `(theta, phi)`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_teleport_fidelity(
    model: *const TsNoiseModel,
    alpha: f64,
    theta: f64,
    phi: f64,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_ref(out, "out")?;
        let resource = m.resource(SchmidtParam::new(alpha).ffi()?).ffi()?;
        let input = BlochParam::new(theta, phi).ffi()?;
        *out = teleport_fidelity(&resource, input).ffi()?;
        Ok(())
    })
}

/// `k* = min F/D` over `[lo, hi]` and the minimizing alpha.
///
/// # Safety
/// `model` must be a live handle; `k_star_out` and `alpha_out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_k_star(
    model: *const TsNoiseModel,
    lo: f64,
    hi: f64,
    k_star_out: *mut f64,
    alpha_out: *mut f64,
) -> TsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let ks_out = out_ref(k_star_out, "k_star_out")?;
        let a_out = out_ref(alpha_out, "alpha_out")?;
        let ks = k_star(m, (lo, hi)).ffi()?;
        *ks_out = ks.k_star;
        *a_out = ks.alpha;
        Ok(())
    })
}

/// Global-depolarizing crossover at state weight `p` and sensitivity `k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_alpha_nk(p: f64, k: f64, out: *mut TsCrossover) -> TsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = find_alpha_nk(p, k).ffi()?;
        *out = TsCrossover {
            p: c.p,
            k: c.k,
            alpha_cl: c.alpha_cl,
            alpha_nk: c.alpha_nk.unwrap_or(f64::NAN),
            has_alpha_nk: c.alpha_nk.is_some(),
            route_residual: c.route_residual,
        };
        Ok(())
    })
}

/// Sweeps `grid` (sorted, within `[0, 1/2]`) for every `k` in `ks`.
///
/// # Safety
/// `model` must be a live handle; `ks` and `grid` valid for their lengths;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sweep_run(
    model: *const TsNoiseModel,
    ks: *const f64,
    ks_len: usize,
    grid: *const f64,
    grid_len: usize,
    out: *mut *mut TsSweep,
) -> TsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let m = model_ref(model)?;
        let ks = slice(ks, ks_len, "ks")?;
        let grid = slice(grid, grid_len, "grid")?;
        let rows = sweep_alpha(m, ks, grid).ffi()?;
        *out = Box::into_raw(Box::new(TsSweep { rows }));
        Ok(())
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_sweep_len(sweep: *const TsSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.rows.len())
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sweep_row(
    sweep: *const TsSweep,
    index: usize,
    out: *mut TsSweepRow,
) -> TsStatus {
    guard(|| {
        let s = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        let out = out_ref(out, "out")?;
        let r = s.rows.get(index).ok_or_else(|| {
            (
                TsStatus::TS_OUT_OF_RANGE,
                format!("row {index} of {}", s.rows.len()),
            )
        })?;
        *out = TsSweepRow {
            alpha: r.alpha,
            k: r.k,
            f: r.f,
            d: r.d,
            tau: r.tau,
            tau_noiseless: r.tau_noiseless,
            tau_classical: r.tau_classical,
            nonclassical: r.nonclassical,
            beats_noiseless: r.beats_noiseless,
        };
        Ok(())
    })
}

/// # Safety
/// `sweep` must come from [`ts_sweep_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_sweep_free(sweep: *mut TsSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}
