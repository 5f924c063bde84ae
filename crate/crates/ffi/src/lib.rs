//! C ABI over the `rabivar` library.
//!
//! Every function returns a [`RabivarStatus`]; results are written through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`rabivar_last_error_message`]. States are opaque heap handles released
//! with [`rabivar_state_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rabivar::ansatz::{self, NOQParams, SchmidtParams};
use rabivar::eig;
use rabivar::model::{self, GStarForm, ModelParams};
use rabivar::optimize::{self, DEConfig, FidelityObjective};
use rabivar::qops::StateVector;
use rabivar::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabivarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    /// Truncation loss, vanishing norm or a non-Hermitian input.
    Numerical = 4,
    NonConvergence = 5,
    InvalidRegime = 6,
    InvalidConfig = 7,
    BufferTooSmall = 8,
    Panic = 9,
    Other = 10,
}

impl From<&Error> for RabivarStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidDimension(_) | Error::InvalidParameter(_) | Error::OutOfRange(_) | Error::Parse(_) => {
                RabivarStatus::InvalidParameter
            }
            Error::DimensionMismatch(_) => RabivarStatus::DimensionMismatch,
            Error::TruncationLoss { .. } | Error::VanishingNorm(_) | Error::NonHermitian(_) => RabivarStatus::Numerical,
            Error::ConvergenceFailure { .. } | Error::NonConvergence { .. } | Error::DegenerateObjective(_) => {
                RabivarStatus::NonConvergence
            }
            Error::Resonance(_) | Error::Instability { .. } | Error::InvalidRegime(_) => RabivarStatus::InvalidRegime,
            Error::InvalidConfig(_) => RabivarStatus::InvalidConfig,
            _ => RabivarStatus::Other,
        }
    }
}

/// Model parameters `(ω_c, ω_q, g)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabivarModel {
    pub omega_c: f64,
    pub omega_q: f64,
    pub g: f64,
}

/// NOQ parameters `(α_c, r, φ)` with `φ ∈ [π/2, π]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabivarNoq {
    pub alpha_c: f64,
    pub r: f64,
    pub phi: f64,
}

/// Schmidt parameters `(p₋, α_c, r)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabivarSchmidt {
    pub p_minus: f64,
    pub alpha_c: f64,
    pub r: f64,
}

/// Outcome of an NOQ fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabivarFit {
    pub noq: RabivarNoq,
    pub p_minus: f64,
    /// `1 − |⟨trial|exact⟩|` against the exact ground state.
    pub infidelity: f64,
    /// `⟨trial|H|trial⟩ − E₀`.
    pub energy_error: f64,
    pub generations: usize,
    pub converged: bool,
    pub dim: usize,
}

/// Opaque state handle.
pub struct RabivarState(StateVector);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F>(f: F) -> RabivarStatus
where
    F: FnOnce() -> Result<(), (RabivarStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RabivarStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RabivarStatus::Panic
        }
    }
}

fn lib<T>(r: rabivar::Result<T>) -> Result<T, (RabivarStatus, String)> {
    r.map_err(|e| (RabivarStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (RabivarStatus, String) {
    (RabivarStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RabivarStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), (RabivarStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn model_params(m: &RabivarModel) -> Result<ModelParams, (RabivarStatus, String)> {
    lib(ModelParams::new(m.omega_c, m.omega_q, m.g))
}

fn boxed(s: StateVector) -> *mut RabivarState {
    Box::into_raw(Box::new(RabivarState(s)))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rabivar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rabivar_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Crossover coupling `g*`; `exact != 0` selects the exact form.
///
/// # Safety
/// `model` must point to a valid struct and `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rabivar_g_star(model: *const RabivarModel, exact: i32, out: *mut f64) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        let form = if exact != 0 { GStarForm::Exact } else { GStarForm::Approximate };
        write(out, lib(model::g_star(&p, form))?, "out")
    })
}

/// Second-order squeezing parameter below `g*`.
///
/// # Safety
/// As [`rabivar_g_star`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_weak_coupling_squeeze(model: *const RabivarModel, out: *mut f64) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        write(out, lib(model::weak_coupling_squeeze(&p))?, "out")
    })
}

/// Cavity dimension used for exact diagonalization before convergence checks.
///
/// # Safety
/// As [`rabivar_g_star`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_truncation_dim(model: *const RabivarModel, out: *mut usize) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        lib(p.validate())?;
        write(out, eig::truncation_dim(&p), "out")
    })
}

/// Converged exact ground state and its energy. `energy` may be null.
///
/// # Safety
/// `model` must be valid; `out` writable. The returned handle must be
/// released with [`rabivar_state_free`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_ground_state(
    model: *const RabivarModel,
    out: *mut *mut RabivarState,
    energy: *mut f64,
) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (res, _) = lib(eig::converged_ground_state(&p))?;
        let state = lib(res.state(0))?;
        if !energy.is_null() {
            energy.write(res.eigenvalues[0]);
        }
        write(out, boxed(state), "out")
    })
}

/// NOQ ground state in a `dim`-level cavity.
///
/// # Safety
/// As [`rabivar_ground_state`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_noq_ground(
    params: *const RabivarNoq,
    dim: usize,
    out: *mut *mut RabivarState,
) -> RabivarStatus {
    guard(|| {
        let q = read(params, "params")?;
        let q = lib(NOQParams::new(q.alpha_c, q.r, q.phi))?;
        let s = lib(ansatz::noq_ground(&q, dim))?;
        write(out, boxed(s), "out")
    })
}

/// Entangled cat `(|α⟩|+x⟩ − |−α⟩|−x⟩)/√2` in a `dim`-level cavity.
///
/// # Safety
/// `out` must be writable; release the handle with [`rabivar_state_free`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_ecs_ground(alpha: f64, dim: usize, out: *mut *mut RabivarState) -> RabivarStatus {
    guard(|| write(out, boxed(lib(ansatz::ecs_ground(alpha, dim))?), "out"))
}

/// Releases a state handle; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rabivar_state_free(state: *mut RabivarState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Cavity dimension of a state; the state has `2 × dim` amplitudes.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rabivar_state_dim(state: *const RabivarState, out: *mut usize) -> RabivarStatus {
    guard(|| write(out, read(state, "state")?.0.dim_cavity(), "out"))
}

/// Copies the amplitudes as interleaved `(re, im)` pairs; `len` is the number
/// of doubles available at `buf` and must be at least `4 × dim`. Amplitude
/// `s × dim + n` belongs to qubit state `s` (`0 = |+z⟩`) and Fock number `n`.
///
/// # Safety
/// `state` must be live and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rabivar_state_amplitudes(
    state: *const RabivarState,
    buf: *mut f64,
    len: usize,
) -> RabivarStatus {
    guard(|| {
        let amps = read(state, "state")?.0.amplitudes();
        let need = 2 * amps.len();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < need {
            return Err((RabivarStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (i, z) in amps.iter().enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        Ok(())
    })
}

/// `⟨ψ|H|ψ⟩`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabivar_state_energy(
    state: *const RabivarState,
    model: *const RabivarModel,
    out: *mut f64,
) -> RabivarStatus {
    guard(|| {
        let s = &read(state, "state")?.0;
        let p = model_params(read(model, "model")?)?;
        write(out, model::rabi_energy(&p, s), "out")
    })
}

/// Purity of the reduced cavity state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabivar_state_cavity_purity(state: *const RabivarState, out: *mut f64) -> RabivarStatus {
    guard(|| write(out, ansatz::cavity_purity(&read(state, "state")?.0), "out"))
}

/// `|⟨a|b⟩|`; the smaller state is zero-padded to the larger dimension.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabivar_fidelity(
    a: *const RabivarState,
    b: *const RabivarState,
    out: *mut f64,
) -> RabivarStatus {
    guard(|| {
        let (a, b) = (&read(a, "a")?.0, &read(b, "b")?.0);
        let dim = a.dim_cavity().max(b.dim_cavity());
        let (a, b) = (lib(a.padded(dim))?, lib(b.padded(dim))?);
        write(out, ansatz::fidelity(&a, &b), "out")
    })
}

fn fit_report(p: &ModelParams, q: NOQParams, generations: usize, converged: bool) -> rabivar::Result<RabivarFit> {
    let (exact, dim) = eig::converged_ground_state(p)?;
    let target = exact.state(0)?;
    let trial = ansatz::noq_ground(&q, dim)?;
    Ok(RabivarFit {
        noq: RabivarNoq { alpha_c: q.alpha_c, r: q.r, phi: q.phi },
        p_minus: ansatz::schmidt_from_noq(&q)?.p_minus,
        infidelity: 1.0 - ansatz::fidelity(&trial, &target),
        energy_error: optimize::energy_error_with(&trial, p, exact.eigenvalues[0]),
        generations,
        converged,
        dim,
    })
}

/// Fidelity-optimized NOQ ground state (default optimizer settings).
///
/// # Safety
/// `model` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rabivar_optimize_noq(
    model: *const RabivarModel,
    seed: u64,
    out: *mut RabivarFit,
) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = lib((|| {
            let (exact, _) = eig::converged_ground_state(&p)?;
            let obj = FidelityObjective::new(optimize::Ansatz::NoqGround, exact.state(0)?);
            let res = obj.optimize(&DEConfig::new(optimize::noq_bounds(&p), seed))?;
            let x = &res.best_params;
            fit_report(&p, NOQParams::new(x[0], x[1], x[2])?, res.generations_used, res.converged)
        })())?;
        write(out, report, "out")
    })
}

/// Energy-minimized NOQ ground state (analytic energy, default optimizer settings).
///
/// # Safety
/// As [`rabivar_optimize_noq`].
#[no_mangle]
pub unsafe extern "C" fn rabivar_minimize_energy(
    model: *const RabivarModel,
    seed: u64,
    out: *mut RabivarFit,
) -> RabivarStatus {
    guard(|| {
        let p = model_params(read(model, "model")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = lib((|| {
            let res = optimize::minimize_energy(&p, &DEConfig::new(optimize::schmidt_bounds(&p), seed))?;
            let x = &res.best_params;
            let q = ansatz::noq_from_schmidt(&SchmidtParams::new(x[0], x[1], x[2])?)?;
            fit_report(&p, q, res.generations_used, res.converged)
        })())?;
        write(out, report, "out")
    })
}

/// Closed-form `⟨H⟩` of the NOQ state in Schmidt form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rabivar_energy_analytic(
    params: *const RabivarSchmidt,
    model: *const RabivarModel,
    out: *mut f64,
) -> RabivarStatus {
    guard(|| {
        let s = read(params, "params")?;
        let s = lib(SchmidtParams::new(s.p_minus, s.alpha_c, s.r))?;
        let p = model_params(read(model, "model")?)?;
        write(out, lib(optimize::energy_expectation_analytic(&s, &p))?, "out")
    })
}
