//! Scalar observables: P₀, M_z, Bloch coordinates and Wootters concurrence.

use crate::error::{Error, Result};
use crate::hamiltonian::{spectrum, HeffParams, PtPhase};
use crate::linalg::{hermitian_eig, paulis, psd_sqrt, CMatrix};
use crate::quantum::{pauli_expectation, DensityMatrix, Pauli, PureState};

/// `|⟨0|ψ⟩|²`.
pub fn p0(psi: &PureState) -> f64 {
    psi.amplitude(0).norm_sqr()
}

/// `tr(ρσz)` on a single qubit.
pub fn mz(rho: &DensityMatrix) -> Result<f64> {
    single_qubit(rho)?;
    pauli_expectation(rho, Pauli::Z, 0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    single_qubit(rho)?;
    Ok(BlochVector {
        x: pauli_expectation(rho, Pauli::X, 0)?,
        y: pauli_expectation(rho, Pauli::Y, 0)?,
        z: pauli_expectation(rho, Pauli::Z, 0)?,
    })
}

fn single_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.num_qubits() == 1 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!(
            "expected a single-qubit state, got {} qubits",
            rho.num_qubits()
        )))
    }
}

fn two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.num_qubits() == 2 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!(
            "expected a two-qubit state, got {} qubits",
            rho.num_qubits()
        )))
    }
}

/// `ρ̃ = (σy⊗σy) ρ̄ (σy⊗σy)` with `ρ̄` the entrywise conjugate.
pub fn spin_flip(rho: &DensityMatrix) -> Result<CMatrix> {
    two_qubit(rho)?;
    let yy = paulis::y().kron(&paulis::y());
    Ok(yy.matmul(&rho.matrix().conj()).matmul(&yy))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceResult {
    /// Square roots of the spectrum of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
    /// `λ₁ - λ₂ - λ₃ - λ₄`.
    pub delta: f64,
    /// `max(delta, 0)`.
    pub value: f64,
}

/// Wootters concurrence.
///
/// `ρρ̃` is similar to the Hermitian `√ρ·ρ̃·√ρ`, so the `λᵢ` come from the
/// Hermitian eigensolver rather than a general one.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    let flipped = spin_flip(rho)?;
    let root = psd_sqrt(rho.matrix())?;
    let product = root.matmul(&flipped).matmul(&root);
    let n = product.rows();
    let hermitian = CMatrix::from_fn(n, n, |i, j| (product[(i, j)] + product[(j, i)].conj()) * 0.5);
    let eig = hermitian_eig(&hermitian)?;
    let mut lambdas = [0.0; 4];
    for (slot, &v) in lambdas.iter_mut().zip(eig.values.iter().rev()) {
        *slot = v.max(0.0).sqrt();
    }
    let delta = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(ConcurrenceResult {
        lambdas,
        delta,
        value: delta.clamp(0.0, 1.0),
    })
}

/// Long-time `⟨σz⟩`: the dominant eigenvector's magnetization `√(Γ²-ω²)/Γ`
/// in the broken phase, and the zero time-average otherwise.
pub fn asymptotic_mz(p: HeffParams) -> Result<f64> {
    if p.gamma <= 0.0 {
        return Err(Error::InvalidParams("asymptotic M_z needs gamma > 0".into()));
    }
    Ok(match p.phase() {
        PtPhase::Broken => p.rate() / p.gamma,
        PtPhase::Symmetric | PtPhase::ExceptionalPoint => 0.0,
    })
}

/// `⟨φ₊|σz|φ₊⟩` of the dominant eigenvector, computed from its components.
pub fn dominant_eigenvector_mz(p: HeffParams) -> f64 {
    let v = spectrum(p).phi_plus;
    v[0].norm_sqr() - v[1].norm_sqr()
}
