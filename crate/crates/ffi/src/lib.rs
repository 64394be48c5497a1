//! C ABI over `nonherm-core`.
//!
//! Every fallible function returns an [`NhStatus`]; on failure a message is
//! available from [`nh_last_error_message`] on the same thread. Complex
//! numbers cross the boundary as [`NhComplex`], matrices in row-major order.
//! Trained circuits live behind the opaque [`NhPqc`] handle and must be
//! released with [`nh_pqc_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nonherm::hamiltonian::{self, HeffParams, KrausMode, PtPhase};
use nonherm::linalg::{c, CMatrix, CVector};
use nonherm::observables;
use nonherm::vqc::{self, Checkpoint, Optimizer, ParamVector, TrainingConfig, NUM_PARAMS};
use nonherm::{DensityMatrix, Error, PureState};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    ZeroProbability = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhPhase {
    Symmetric = 0,
    Broken = 1,
    ExceptionalPoint = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NhKrausMode {
    Exact = 0,
    Gaussian = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NhComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhSpectrum {
    pub lambda_plus: NhComplex,
    pub lambda_minus: NhComplex,
    pub phase: NhPhase,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhTrainOptions {
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub target_cost: f64,
    /// Non-zero selects Adam(0.9, 0.999, 1e-8); zero selects plain gradient descent.
    pub use_adam: i32,
    pub seed: u64,
}

/// Trained or loaded variational circuit.
pub struct NhPqc {
    params: ParamVector,
    checkpoint: Option<Checkpoint>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> NhStatus {
    match err {
        Error::ZeroProbability { .. } => NhStatus::ZeroProbability,
        Error::InvalidParams(_) | Error::InvalidState(_) | Error::DimensionMismatch(_) => {
            NhStatus::InvalidArgument
        }
        e if e.is_config() => NhStatus::Config,
        _ => NhStatus::Numerical,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NhStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            NhStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            NhStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn read_qubit(p: *const NhComplex, what: &'static str) -> Result<PureState, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    let s = std::slice::from_raw_parts(p, 2);
    Ok(PureState::new(CVector::new(s.iter().map(|z| c(z.re, z.im)).collect()))?)
}

unsafe fn write_qubit(p: *mut NhComplex, state: &PureState, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    let out = std::slice::from_raw_parts_mut(p, 2);
    for (o, a) in out.iter_mut().zip(state.amplitudes().iter()) {
        *o = NhComplex { re: a.re, im: a.im };
    }
    Ok(())
}

unsafe fn read_path<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Config("path is not UTF-8".into()))?;
    Ok(Path::new(s))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Eigenvalues and PT phase of `H = [[iΓ/2, ω/2], [ω/2, −iΓ/2]]`.
///
/// # Safety
/// `out` must point to writable memory for one `NhSpectrum`.
#[no_mangle]
pub unsafe extern "C" fn nh_spectrum(omega: f64, gamma: f64, out: *mut NhSpectrum) -> NhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let p = HeffParams::new(omega, gamma)?;
        let s = hamiltonian::spectrum(p);
        *out = NhSpectrum {
            lambda_plus: NhComplex { re: s.lambda_plus.re, im: s.lambda_plus.im },
            lambda_minus: NhComplex { re: s.lambda_minus.re, im: s.lambda_minus.im },
            phase: match p.phase() {
                PtPhase::Symmetric => NhPhase::Symmetric,
                PtPhase::Broken => NhPhase::Broken,
                PtPhase::ExceptionalPoint => NhPhase::ExceptionalPoint,
            },
        };
        Ok(())
    })
}

/// Normalized exact evolution `A_t|ψ⟩/‖A_t|ψ⟩‖` of a single qubit.
///
/// # Safety
/// `input` must point to 2 readable and `out` to 2 writable `NhComplex`.
#[no_mangle]
pub unsafe extern "C" fn nh_evolve_pure(
    omega: f64,
    gamma: f64,
    t: f64,
    input: *const NhComplex,
    out: *mut NhComplex,
) -> NhStatus {
    guard(|| {
        let psi = read_qubit(input, "input")?;
        let p = HeffParams::new(omega, gamma)?;
        let evolved = hamiltonian::evolve_pure(p, t, &psi)?;
        write_qubit(out, &evolved, "out")
    })
}

/// `steps` postselected Trotter steps over `[0, t]`. `mode` is an
/// `NhKrausMode` value. Writes the final state and, if
/// `cumulative_probability` is not NULL, the product of the per-step
/// success probabilities.
///
/// # Safety
/// `input` must point to 2 readable and `out` to 2 writable `NhComplex`;
/// `cumulative_probability` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn nh_trotter_evolve(
    omega: f64,
    gamma: f64,
    t: f64,
    steps: usize,
    mode: i32,
    input: *const NhComplex,
    out: *mut NhComplex,
    cumulative_probability: *mut f64,
) -> NhStatus {
    guard(|| {
        let psi = read_qubit(input, "input")?;
        let p = HeffParams::new(omega, gamma)?;
        let mode = match mode {
            m if m == NhKrausMode::Exact as i32 => KrausMode::ExactKraus,
            m if m == NhKrausMode::Gaussian as i32 => KrausMode::GaussianKraus,
            m => return Err(Error::InvalidParams(format!("unknown Kraus mode {m}")).into()),
        };
        let run = hamiltonian::trotter_evolve(&psi, p, t, steps, mode)?;
        write_qubit(out, &run.state, "out")?;
        if let Some(c) = cumulative_probability.as_mut() {
            *c = run.cumulative_probability;
        }
        Ok(())
    })
}

/// Stationary `M_z` reached from `I/2` (0 in the PT-symmetric phase).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nh_asymptotic_mz(omega: f64, gamma: f64, out: *mut f64) -> NhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = observables::asymptotic_mz(HeffParams::new(omega, gamma)?)?;
        Ok(())
    })
}

/// Wootters concurrence of a two-qubit density matrix given as 16 entries
/// in row-major order.
///
/// # Safety
/// `rho` must point to 16 readable `NhComplex`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nh_concurrence(rho: *const NhComplex, out: *mut f64) -> NhStatus {
    guard(|| {
        if rho.is_null() {
            return Err(Failure::Null("rho"));
        }
        let out = deref_mut(out, "out")?;
        let entries = std::slice::from_raw_parts(rho, 16);
        let m = CMatrix::from_vec(4, 4, entries.iter().map(|z| c(z.re, z.im)).collect())?;
        *out = observables::concurrence(&DensityMatrix::new(m)?)?.value;
        Ok(())
    })
}

/// Defaults used by the CLI: plain gradient descent, rate 0.05, 2000
/// iterations, target cost 1e-4, seed 0.
#[no_mangle]
pub extern "C" fn nh_train_options_default() -> NhTrainOptions {
    let d = TrainingConfig::default();
    NhTrainOptions {
        learning_rate: d.learning_rate,
        max_iterations: d.max_iterations,
        target_cost: d.target_cost,
        use_adam: 0,
        seed: d.seed,
    }
}

fn boxed(pqc: NhPqc, out: &mut *mut NhPqc) {
    *out = Box::into_raw(Box::new(pqc));
}

/// Trains the circuit for `(omega, gamma, t)` on the four tomographic inputs.
/// The handle is written even when the target cost is missed; check
/// [`nh_pqc_converged`].
///
/// # Safety
/// `options` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_train(
    omega: f64,
    gamma: f64,
    t: f64,
    options: *const NhTrainOptions,
    out: *mut *mut NhPqc,
) -> NhStatus {
    guard(|| {
        let opts = deref(options, "options")?;
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let p = HeffParams::new(omega, gamma)?;
        let cfg = TrainingConfig {
            learning_rate: opts.learning_rate,
            max_iterations: opts.max_iterations,
            target_cost: opts.target_cost,
            optimizer: if opts.use_adam != 0 {
                Optimizer::adam_default()
            } else {
                Optimizer::PlainGd
            },
            seed: opts.seed,
            ..TrainingConfig::default()
        };
        let ts = vqc::build_training_set(p, t)?;
        let outcome = vqc::train(&ts, &cfg)?;
        let checkpoint = Checkpoint::new(p, t, 1.0, &cfg, &outcome);
        boxed(
            NhPqc {
                params: outcome.params,
                checkpoint: Some(checkpoint),
            },
            out,
        );
        Ok(())
    })
}

/// Handle from 24 raw angles (no training metadata).
///
/// # Safety
/// `params` must point to 24 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_from_params(params: *const f64, out: *mut *mut NhPqc) -> NhStatus {
    guard(|| {
        if params.is_null() {
            return Err(Failure::Null("params"));
        }
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let values = std::slice::from_raw_parts(params, NUM_PARAMS);
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()).into());
        }
        boxed(
            NhPqc {
                params: ParamVector::from_slice(values)?,
                checkpoint: None,
            },
            out,
        );
        Ok(())
    })
}

/// Loads a checkpoint file written by `nonherm train`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_load(path: *const c_char, out: *mut *mut NhPqc) -> NhStatus {
    guard(|| {
        let path = read_path(path)?;
        let out = deref_mut(out, "out")?;
        *out = ptr::null_mut();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let ck = Checkpoint::from_json(&text)?;
        boxed(
            NhPqc {
                params: ck.params,
                checkpoint: Some(ck),
            },
            out,
        );
        Ok(())
    })
}

/// Writes the handle's checkpoint. Fails with `NH_STATUS_INVALID_ARGUMENT`
/// for handles built from raw parameters.
///
/// # Safety
/// `pqc` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_save(pqc: *const NhPqc, path: *const c_char) -> NhStatus {
    guard(|| {
        let pqc = deref(pqc, "pqc")?;
        let path = read_path(path)?;
        let ck = pqc
            .checkpoint
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("handle has no training metadata".into()))?;
        std::fs::write(path, ck.to_json()?).map_err(Error::from)?;
        Ok(())
    })
}

/// Runs the postselected circuit on a single-qubit input.
///
/// # Safety
/// `pqc` must be a live handle; `input`/`out` point to 2 `NhComplex`;
/// `success_probability` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_apply(
    pqc: *const NhPqc,
    input: *const NhComplex,
    out: *mut NhComplex,
    success_probability: *mut f64,
) -> NhStatus {
    guard(|| {
        let pqc = deref(pqc, "pqc")?;
        let psi = read_qubit(input, "input")?;
        let (state, prob) = vqc::pqc_output(&pqc.params, &psi)?;
        write_qubit(out, &state, "out")?;
        if let Some(p) = success_probability.as_mut() {
            *p = prob;
        }
        Ok(())
    })
}

/// Copies the 24 angles into `out`.
///
/// # Safety
/// `pqc` must be a live handle; `out` must have room for 24 doubles.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_params(pqc: *const NhPqc, out: *mut f64) -> NhStatus {
    guard(|| {
        let pqc = deref(pqc, "pqc")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        std::slice::from_raw_parts_mut(out, NUM_PARAMS).copy_from_slice(pqc.params.as_slice());
        Ok(())
    })
}

/// Final training cost, or NaN for handles built from raw parameters.
///
/// # Safety
/// `pqc` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_final_cost(pqc: *const NhPqc) -> f64 {
    pqc.as_ref()
        .and_then(|p| p.checkpoint.as_ref())
        .map_or(f64::NAN, |c| c.final_cost)
}

/// 1 if training reached its target cost, 0 otherwise (including raw handles).
///
/// # Safety
/// `pqc` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_converged(pqc: *const NhPqc) -> i32 {
    pqc.as_ref()
        .and_then(|p| p.checkpoint.as_ref())
        .map_or(0, |c| c.converged as i32)
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `pqc` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nh_pqc_free(pqc: *mut NhPqc) {
    if !pqc.is_null() {
        drop(Box::from_raw(pqc));
    }
}
