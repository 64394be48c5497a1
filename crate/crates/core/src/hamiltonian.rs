//! The single-qubit Hamiltonian `H = (ω/2)σx + (iΓ/2)σz`.
//!
//! Its spectrum is closed-form, so nothing here needs a general
//! non-Hermitian eigensolver. The exact propagator uses
//! `e^{-iHt} = cos(λt)·I - i·(sin(λt)/λ)·H`, valid because `H² = λ²·I`.
//!
//! The Trotterized route factorizes one step of length `τ` as
//! `diag(1, κ)·Rx(ωτ)` and realizes `κ` by an ancilla-postselected
//! controlled rotation, paying a success probability per step.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, paulis, CMatrix, CVector, C64, I, ONE, ZERO};
use crate::quantum::{
    apply_1q, apply_controlled, apply_local_operator, postselect_zero, rx_matrix, DensityMatrix,
    PureState,
};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeffParams {
    pub omega: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PtPhase {
    /// `|ω| > Γ`, real spectrum.
    Symmetric,
    /// `|ω| < Γ`, imaginary conjugate pair.
    Broken,
    ExceptionalPoint,
}

impl fmt::Display for PtPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PtPhase::Symmetric => "Symmetric",
            PtPhase::Broken => "Broken",
            PtPhase::ExceptionalPoint => "ExceptionalPoint",
        })
    }
}

impl HeffParams {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !omega.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParams("omega and gamma must be finite".into()));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must be >= 0")));
        }
        Ok(Self { omega, gamma })
    }

    /// `Γ = ω / ratio`, the parameterization used by the experiments.
    pub fn from_ratio(omega: f64, omega_over_gamma: f64) -> Result<Self> {
        if !(omega_over_gamma.is_finite() && omega_over_gamma != 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega/gamma ratio {omega_over_gamma} must be finite and nonzero"
            )));
        }
        Self::new(omega, (omega / omega_over_gamma).abs())
    }

    pub fn phase(&self) -> PtPhase {
        let scale = self.omega.abs().max(self.gamma).max(1.0);
        let gap = self.omega.abs() - self.gamma;
        if gap.abs() <= tol::EXCEPTIONAL_POINT * scale {
            PtPhase::ExceptionalPoint
        } else if gap > 0.0 {
            PtPhase::Symmetric
        } else {
            PtPhase::Broken
        }
    }

    /// Principal `√(ω² - Γ²)`: `+i√|·|` for a negative radicand.
    pub fn root(&self) -> C64 {
        let r = self.omega * self.omega - self.gamma * self.gamma;
        if r >= 0.0 {
            c(r.sqrt(), 0.0)
        } else {
            c(0.0, (-r).sqrt())
        }
    }

    /// `λ₊ = √(ω² - Γ²)/2`.
    pub fn lambda(&self) -> C64 {
        self.root() * 0.5
    }

    /// Rate `√|Γ² - ω²|` that sets the relaxation / oscillation timescale.
    pub fn rate(&self) -> f64 {
        (self.gamma * self.gamma - self.omega * self.omega).abs().sqrt()
    }
}

pub fn build_heff(p: HeffParams) -> CMatrix {
    let w = c(p.omega / 2.0, 0.0);
    let g = c(0.0, p.gamma / 2.0);
    CMatrix::from_rows(&[[g, w], [w, -g]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub phi_plus: CVector,
    pub phi_minus: CVector,
    pub is_defective: bool,
}

/// The coalesced eigenvector at `ω = ±Γ`.
pub fn exceptional_eigenvector(omega_sign_positive: bool) -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let second = if omega_sign_positive { -h } else { h };
    CVector::new(vec![c(h, 0.0), c(0.0, second)])
}

fn normalize(v: CVector) -> Option<CVector> {
    let n = v.norm();
    (n > 1e-300).then(|| v.scale(c(1.0 / n, 0.0)))
}

fn eigenvector(p: &HeffParams, sign: f64) -> CVector {
    let root = p.root() * sign;
    // Layout (ω, -iΓ ± √(ω²-Γ²)) with a real positive normalization.
    let primary = CVector::new(vec![c(p.omega, 0.0), c(0.0, -p.gamma) + root]);
    // At ω = 0 that layout vanishes for one branch; use the second-row form instead.
    let scale = p.omega.abs().max(p.gamma);
    if primary.norm() > 1e-8 * scale {
        return normalize(primary).expect("nonzero");
    }
    let fallback = CVector::new(vec![c(0.0, p.gamma) + root, c(p.omega, 0.0)]);
    normalize(fallback).unwrap_or_else(|| {
        CVector::basis(2, if sign > 0.0 { 0 } else { 1 })
    })
}

pub fn spectrum(p: HeffParams) -> Spectrum {
    let lambda_plus = p.lambda();
    let lambda_minus = -lambda_plus;
    if p.phase() == PtPhase::ExceptionalPoint {
        let v = exceptional_eigenvector(p.omega >= 0.0);
        return Spectrum {
            lambda_plus: ZERO,
            lambda_minus: ZERO,
            phi_plus: v.clone(),
            phi_minus: v,
            is_defective: true,
        };
    }
    Spectrum {
        lambda_plus,
        lambda_minus,
        phi_plus: eigenvector(&p, 1.0),
        phi_minus: eigenvector(&p, -1.0),
        is_defective: false,
    }
}

/// `P·T` with `P = σx`: `σx · conj(v)`.
pub fn pt_apply(v: &CVector) -> CVector {
    paulis::x().mul_vec(&v.conj())
}

/// Rephases `v` so that `PT v = v` holds literally.
///
/// `PT` is antilinear, so if `PT v = e^{iγ} v` then `e^{iγ/2} v` is a fixed
/// point. Returns `None` unless `v` spans a `PT`-invariant ray.
pub fn pt_fixed_representative(v: &CVector) -> Option<CVector> {
    let image = pt_apply(v);
    let overlap = v.inner(&image);
    let n2 = v.norm_sqr();
    if n2 == 0.0 || (overlap.norm() - n2).abs() > 1e-12 * n2 {
        return None;
    }
    let gamma = overlap.arg();
    Some(v.scale(C64::from_polar(1.0, gamma / 2.0)))
}

/// Max entrywise `|σx·conj(H)·σx - H|`.
pub fn pt_invariance_check(p: HeffParams) -> f64 {
    let h = build_heff(p);
    let x = paulis::x();
    x.matmul(&h.conj()).matmul(&x).max_abs_diff(&h)
}

/// `t·sin(z)/z` evaluated at `z = λt`, continuous through `λ = 0`.
fn sinc_times_t(lambda: C64, t: f64) -> C64 {
    let z = lambda * t;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        (ONE - z2 / 6.0 + z2 * z2 / 120.0) * t
    } else {
        z.sin() / lambda
    }
}

/// `A_t = e^{-iHt}` in closed form.
///
/// For `|λt| ≤ 1` this is `cos(λt)·I - i·t·sinc(λt)·H`. Beyond that the
/// equivalent spectral form `e^{-iλt}P₊ + e^{iλt}P₋`, `P± = (I ± H/λ)/2`, is
/// used so a decaying mode is not computed as a difference of growing ones.
pub fn exact_propagator(p: HeffParams, t: f64) -> Result<CMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("time {t} must be finite and >= 0")));
    }
    let lambda = if p.phase() == PtPhase::ExceptionalPoint {
        ZERO
    } else {
        p.lambda()
    };
    let h = build_heff(p);
    let id = CMatrix::identity(2);
    if (lambda * t).norm() <= 1.0 {
        let cos = (lambda * t).cos();
        let sinc = sinc_times_t(lambda, t);
        return Ok(&id.scale(cos) - &h.scale(I * sinc));
    }
    let h_over = h.scale(ONE / lambda);
    let plus = (&id + &h_over).scale_real(0.5);
    let minus = (&id - &h_over).scale_real(0.5);
    let phase = (-I * lambda * t).exp();
    Ok(&plus.scale(phase) + &minus.scale((I * lambda * t).exp()))
}

/// Largest time slice over which `A_t` stays far from overflow.
fn safe_slice(p: &HeffParams) -> f64 {
    // ‖A_t‖ grows at most like e^{Γt/2}; 60 e-folds is well inside f64 range.
    if p.gamma > 0.0 {
        120.0 / p.gamma
    } else {
        f64::INFINITY
    }
}

/// Splits `[0, t]` into slices whose propagators are numerically tame.
fn slices(p: &HeffParams, t: f64) -> (usize, f64) {
    let slice = safe_slice(p);
    if t <= slice {
        (1, t)
    } else {
        let n = (t / slice).ceil() as usize;
        (n, t / n as f64)
    }
}

/// `A_t|ψ⟩ / ‖A_t|ψ⟩‖`.
pub fn evolve_pure(p: HeffParams, t: f64, psi: &PureState) -> Result<PureState> {
    if psi.num_qubits() != 1 {
        return Err(Error::InvalidState("evolve_pure needs a single qubit".into()));
    }
    let (n, dt) = slices(&p, t);
    let a = exact_propagator(p, dt)?;
    let mut state = psi.clone();
    for _ in 0..n {
        let v = a.mul_vec(state.amplitudes());
        let norm = v.norm();
        if !norm.is_finite() || norm < tol::VANISHING {
            return Err(Error::VanishingNorm { norm });
        }
        state = PureState::normalized(v)?;
    }
    Ok(state)
}

/// `A_t ρ A_t† / tr(A_t ρ A_t†)`.
pub fn evolve_density(p: HeffParams, t: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.num_qubits() != 1 {
        return Err(Error::InvalidState("evolve_density needs a single qubit".into()));
    }
    let (n, dt) = slices(&p, t);
    let a = exact_propagator(p, dt)?;
    let mut state = rho.clone();
    for _ in 0..n {
        state = DensityMatrix::normalized(a.sandwich(state.matrix()))?;
    }
    Ok(state)
}

/// Discretization of `[0, t]` into `steps` Trotter steps with circuit angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterSchedule {
    pub tau: f64,
    pub steps: usize,
    /// `ωτ`
    pub theta: f64,
    /// `√(8Γτ)`
    pub phi: f64,
}

pub fn trotter_schedule(p: HeffParams, t: f64, steps: usize) -> Result<TrotterSchedule> {
    if steps == 0 {
        return Err(Error::InvalidParams("Trotter step count must be >= 1".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("time {t} must be finite and >= 0")));
    }
    Ok(TrotterSchedule::per_step(p, t / steps as f64, steps))
}

impl TrotterSchedule {
    /// Schedule with a fixed step length `tau`.
    pub fn per_step(p: HeffParams, tau: f64, steps: usize) -> Self {
        Self {
            tau,
            steps,
            theta: p.omega * tau,
            phi: (8.0 * p.gamma * tau).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausMode {
    /// `diag(1, cos(φ/2))`, the exact postselected block of the circuit.
    ExactKraus,
    /// `diag(1, e^{-φ²/8})`, the small-angle form.
    GaussianKraus,
}

pub fn kraus_matrix(mode: KrausMode, phi: f64) -> CMatrix {
    let k = match mode {
        KrausMode::ExactKraus => (phi / 2.0).cos(),
        KrausMode::GaussianKraus => (-phi * phi / 8.0).exp(),
    };
    CMatrix::diag(&[ONE, c(k, 0.0)])
}

/// Unnormalized single-step operator `K·Rx(θ)`.
pub fn trotter_step_operator(s: &TrotterSchedule, mode: KrausMode) -> CMatrix {
    kraus_matrix(mode, s.phi).matmul(&rx_matrix(s.theta))
}

/// One postselected step; returns the renormalized state and its success probability.
pub fn trotter_step(
    psi: &PureState,
    s: &TrotterSchedule,
    mode: KrausMode,
) -> Result<(PureState, f64)> {
    trotter_step_on_wire(psi, s, mode, 0)
}

/// As [`trotter_step`], but acting on `wire` of a larger register.
pub fn trotter_step_on_wire(
    psi: &PureState,
    s: &TrotterSchedule,
    mode: KrausMode,
    wire: usize,
) -> Result<(PureState, f64)> {
    let op = trotter_step_operator(s, mode);
    let v = apply_local_operator(psi.amplitudes(), &op, wire, psi.num_qubits())?;
    let probability = v.norm_sqr();
    if probability < tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok((PureState::normalized(v)?, probability))
}

/// Gate-level realization of one step on `system` of `psi`: attach an ancilla
/// in `|0⟩` as the last wire, apply `Rx(θ)` on the system, a controlled
/// `Rx(φ)` from system to ancilla, then postselect the ancilla on `|0⟩`.
pub fn trotter_circuit_step(
    psi: &PureState,
    s: &TrotterSchedule,
    system: usize,
) -> Result<(PureState, f64)> {
    let with_ancilla = psi.tensor(&PureState::zero())?;
    let ancilla = psi.num_qubits();
    let rotated = apply_1q(&with_ancilla, &rx_matrix(s.theta), system)?;
    let coupled = apply_controlled(&rotated, &rx_matrix(s.phi), system, ancilla)?;
    postselect_zero(&coupled, ancilla)
}

#[derive(Clone, Debug)]
pub struct TrotterRun {
    pub state: PureState,
    /// `p₁·p₂·…·p_K`.
    pub cumulative_probability: f64,
    pub per_step: Vec<f64>,
}

impl TrotterRun {
    pub fn log_probability(&self) -> f64 {
        self.per_step.iter().map(|p| p.ln()).sum()
    }
}

pub fn trotter_evolve(
    psi: &PureState,
    p: HeffParams,
    t: f64,
    steps: usize,
    mode: KrausMode,
) -> Result<TrotterRun> {
    let schedule = trotter_schedule(p, t, steps)?;
    let mut state = psi.clone();
    let mut per_step = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, prob) = trotter_step(&state, &schedule, mode)?;
        state = next;
        per_step.push(prob);
    }
    let cumulative_probability = per_step.iter().product();
    Ok(TrotterRun {
        state,
        cumulative_probability,
        per_step,
    })
}
