//! State-vector and density-matrix simulation of 1-3 qubit registers.
//!
//! Wire 0 is the most significant bit of the computational-basis index, so
//! `|q0 q1 q2⟩` has index `4·q0 + 2·q1 + q2`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c, paulis, CMatrix, CVector, C64, ONE, ZERO};
use crate::tol;

pub const MAX_QUBITS: usize = 3;

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidState(format!(
            "register size {n} outside [1, {MAX_QUBITS}]"
        )))
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() && dim >= 2 {
        let n = dim.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(n)
    } else {
        Err(Error::InvalidState(format!("dimension {dim} is not 2^n")))
    }
}

fn check_wire(wire: usize, num_qubits: usize) -> Result<()> {
    if wire < num_qubits {
        Ok(())
    } else {
        Err(Error::BadWire { wire, num_qubits })
    }
}

/// Bit of `index` belonging to `wire` in an `n`-qubit register.
fn bit(index: usize, wire: usize, n: usize) -> usize {
    (index >> (n - 1 - wire)) & 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    /// Validates normalization to `tol::STATE_NORM`.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.dim())?;
        if !amplitudes.is_finite() {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.dim())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm < tol::VANISHING {
            return Err(Error::VanishingNorm { norm });
        }
        Ok(Self {
            num_qubits,
            amplitudes: amplitudes.scale(c(1.0 / norm, 0.0)),
        })
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::new(amps.to_vec()))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} >= {dim}")));
        }
        Ok(Self {
            num_qubits,
            amplitudes: CVector::basis(dim, index),
        })
    }

    pub fn zero() -> Self {
        Self::basis(1, 0).expect("valid")
    }

    pub fn one() -> Self {
        Self::basis(1, 1).expect("valid")
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self::from_amplitudes(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).expect("valid")
    }

    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn plus_i() -> Self {
        Self::from_amplitudes(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).expect("valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// `self ⊗ other`; `self` occupies the leading wires.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_qubits(self.num_qubits + other.num_qubits)?;
        Ok(PureState {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes: self.amplitudes.kron(&other.amplitudes),
        })
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.inner(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Trace distance between the two pure states, `sqrt(1 - |⟨a|b⟩|²)`.
    pub fn trace_distance(&self, other: &PureState) -> f64 {
        (1.0 - self.fidelity(other)).max(0.0).sqrt()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: self.amplitudes.outer(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let num_qubits = qubits_for_dim(matrix.rows())?;
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::DENSITY_TRACE || tr.im.abs() > tol::DENSITY_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let eig = crate::linalg::hermitian_eig(&matrix)?;
        if eig.values[0] < tol::DENSITY_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                eig.values[0]
            )));
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Divides by the trace and symmetrizes away rounding-level anti-Hermitian parts.
    pub fn normalized(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let num_qubits = qubits_for_dim(matrix.rows())?;
        let tr = matrix.trace().re;
        if !tr.is_finite() || tr < tol::VANISHING {
            return Err(Error::VanishingTrace { trace: tr });
        }
        let n = matrix.rows();
        let sym = CMatrix::from_fn(n, n, |i, j| (matrix[(i, j)] + matrix[(j, i)].conj()) * (0.5 / tr));
        Ok(Self {
            num_qubits,
            matrix: sym,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_qubits(self.num_qubits + other.num_qubits)?;
        Ok(DensityMatrix {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// `U ρ U†` with `U` acting on the whole register, renormalized.
    pub fn conjugate_by(&self, op: &CMatrix) -> Result<DensityMatrix> {
        if op.rows() != self.matrix.rows() || !op.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on {}-qubit state",
                op.rows(),
                op.cols(),
                self.num_qubits
            )));
        }
        DensityMatrix::normalized(op.sandwich(&self.matrix))
    }
}

/// The general single-qubit rotation
/// `[[cos(a/2), -e^{ic} sin(a/2)], [e^{ib} sin(a/2), e^{i(b+c)} cos(a/2)]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateU3 {
    pub r_a: f64,
    pub r_b: f64,
    pub r_c: f64,
}

impl GateU3 {
    pub fn new(r_a: f64, r_b: f64, r_c: f64) -> Self {
        Self { r_a, r_b, r_c }
    }

    pub fn matrix(&self) -> CMatrix {
        u3_matrix(*self)
    }
}

pub fn u3_matrix(g: GateU3) -> CMatrix {
    let (s, co) = (g.r_a / 2.0).sin_cos();
    let eb = C64::from_polar(1.0, g.r_b);
    let ec = C64::from_polar(1.0, g.r_c);
    CMatrix::from_rows(&[[c(co, 0.0), -ec * s], [eb * s, eb * ec * co]])
}

/// `e^{-iφσx/2}`.
pub fn rx_matrix(angle: f64) -> CMatrix {
    let (s, co) = (angle / 2.0).sin_cos();
    CMatrix::from_rows(&[[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
}

/// `e^{-iφσy/2}`.
pub fn ry_matrix(angle: f64) -> CMatrix {
    let (s, co) = (angle / 2.0).sin_cos();
    CMatrix::from_rows(&[[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
}

/// `diag(1, e^{iφ})`.
pub fn phase_matrix(angle: f64) -> CMatrix {
    CMatrix::diag(&[ONE, C64::from_polar(1.0, angle)])
}

/// Lifts a 2x2 operator on `wire` to the full `n`-qubit space.
pub fn embed_1q(op: &CMatrix, wire: usize, num_qubits: usize) -> Result<CMatrix> {
    check_qubits(num_qubits)?;
    check_wire(wire, num_qubits)?;
    let mut full = CMatrix::identity(1);
    for w in 0..num_qubits {
        full = if w == wire {
            full.kron(op)
        } else {
            full.kron(&CMatrix::identity(2))
        };
    }
    Ok(full)
}

/// Lifts a controlled 2x2 gate to the full `n`-qubit space.
pub fn embed_controlled(
    gate: &CMatrix,
    control: usize,
    target: usize,
    num_qubits: usize,
) -> Result<CMatrix> {
    check_qubits(num_qubits)?;
    check_wire(control, num_qubits)?;
    check_wire(target, num_qubits)?;
    if control == target {
        return Err(Error::SameWire(control));
    }
    let dim = 1 << num_qubits;
    let tshift = num_qubits - 1 - target;
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let others_match = (i | (1 << tshift)) == (j | (1 << tshift));
        if !others_match {
            return ZERO;
        }
        if bit(j, control, num_qubits) == 0 {
            if i == j {
                ONE
            } else {
                ZERO
            }
        } else {
            gate[(bit(i, target, num_qubits), bit(j, target, num_qubits))]
        }
    }))
}

fn check_gate(gate: &CMatrix) -> Result<()> {
    if gate.rows() != 2 || gate.cols() != 2 {
        return Err(Error::DimensionMismatch("single-qubit gate must be 2x2".into()));
    }
    let dev = gate.unitarity_deviation();
    if dev > tol::GATE_UNITARY {
        return Err(Error::InvalidParams(format!(
            "gate is not unitary (deviation {dev:e})"
        )));
    }
    Ok(())
}

/// Applies a 2x2 operator to `wire` without any unitarity requirement.
pub fn apply_local_operator(amps: &CVector, op: &CMatrix, wire: usize, num_qubits: usize) -> Result<CVector> {
    check_wire(wire, num_qubits)?;
    let shift = num_qubits - 1 - wire;
    let mask = 1 << shift;
    let mut out = amps.clone();
    for i in 0..amps.dim() {
        if i & mask != 0 {
            continue;
        }
        let (a0, a1) = (amps[i], amps[i | mask]);
        out[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        out[i | mask] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
    Ok(out)
}

pub fn apply_1q(state: &PureState, gate: &CMatrix, wire: usize) -> Result<PureState> {
    check_gate(gate)?;
    let amplitudes = apply_local_operator(&state.amplitudes, gate, wire, state.num_qubits)?;
    Ok(PureState {
        num_qubits: state.num_qubits,
        amplitudes,
    })
}

/// Applies `gate` to `target` on the branch where `control` is `|1⟩`.
pub fn apply_controlled(
    state: &PureState,
    gate: &CMatrix,
    control: usize,
    target: usize,
) -> Result<PureState> {
    let n = state.num_qubits;
    check_wire(control, n)?;
    check_wire(target, n)?;
    if control == target {
        return Err(Error::SameWire(control));
    }
    check_gate(gate)?;
    let cmask = 1 << (n - 1 - control);
    let tmask = 1 << (n - 1 - target);
    let amps = &state.amplitudes;
    let mut out = amps.clone();
    for i in 0..amps.dim() {
        if i & cmask == 0 || i & tmask != 0 {
            continue;
        }
        let (a0, a1) = (amps[i], amps[i | tmask]);
        out[i] = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
        out[i | tmask] = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
    }
    Ok(PureState {
        num_qubits: n,
        amplitudes: out,
    })
}

/// Projects `wire` onto `|0⟩`, drops it, and renormalizes.
///
/// Returns the reduced state and the success probability.
pub fn postselect_zero(state: &PureState, wire: usize) -> Result<(PureState, f64)> {
    let n = state.num_qubits;
    check_wire(wire, n)?;
    if n < 2 {
        return Err(Error::BadWireSet(
            "postselection needs at least two qubits".into(),
        ));
    }
    let kept: Vec<C64> = (0..state.amplitudes.dim())
        .filter(|&i| bit(i, wire, n) == 0)
        .map(|i| state.amplitudes[i])
        .collect();
    let block = CVector::new(kept);
    let probability = block.norm_sqr();
    if probability < tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    let reduced = PureState {
        num_qubits: n - 1,
        amplitudes: block.scale(c(1.0 / probability.sqrt(), 0.0)),
    };
    Ok((reduced, probability))
}

/// Density-matrix postselection: `Π₀ρΠ₀ / tr(Π₀ρΠ₀)` with `wire` removed.
pub fn postselect_zero_density(rho: &DensityMatrix, wire: usize) -> Result<(DensityMatrix, f64)> {
    let n = rho.num_qubits;
    check_wire(wire, n)?;
    if n < 2 {
        return Err(Error::BadWireSet(
            "postselection needs at least two qubits".into(),
        ));
    }
    let idx: Vec<usize> = (0..1 << n).filter(|&i| bit(i, wire, n) == 0).collect();
    let block = CMatrix::from_fn(idx.len(), idx.len(), |i, j| rho.matrix[(idx[i], idx[j])]);
    let probability = block.trace().re;
    if probability < tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    let reduced = DensityMatrix::normalized(block)?;
    Ok((reduced, probability))
}

/// Reduced density matrix on the wires in `keep` (kept in ascending wire order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() >= n || keep.iter().any(|&w| w >= n) {
        return Err(Error::BadWireSet(format!(
            "keep set {keep:?} must be a nonempty strict subset of {n} wires"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
    let kdim = 1 << keep.len();
    let tdim = 1 << traced.len();
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut index = 0;
        for (pos, &w) in keep.iter().enumerate() {
            let b = (kept_bits >> (keep.len() - 1 - pos)) & 1;
            index |= b << (n - 1 - w);
        }
        for (pos, &w) in traced.iter().enumerate() {
            let b = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            index |= b << (n - 1 - w);
        }
        index
    };
    let reduced = CMatrix::from_fn(kdim, kdim, |i, j| {
        (0..tdim)
            .map(|t| rho.matrix[(compose(i, t), compose(j, t))])
            .sum()
    });
    Ok(DensityMatrix {
        num_qubits: keep.len(),
        matrix: reduced,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::X => paulis::x(),
            Pauli::Y => paulis::y(),
            Pauli::Z => paulis::z(),
        }
    }
}

/// `tr(ρ σ)` with `σ` acting on `wire`.
pub fn pauli_expectation(rho: &DensityMatrix, pauli: Pauli, wire: usize) -> Result<f64> {
    let full = embed_1q(&pauli.matrix(), wire, rho.num_qubits)?;
    Ok(rho.matrix.matmul(&full).trace().re)
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_state() -> PureState {
    let h = c(FRAC_1_SQRT_2, 0.0);
    PureState::from_amplitudes(&[h, ZERO, ZERO, h]).expect("valid")
}

/// `I / 2ⁿ`.
pub fn maximally_mixed(num_qubits: usize) -> Result<DensityMatrix> {
    check_qubits(num_qubits)?;
    let dim = 1 << num_qubits;
    Ok(DensityMatrix {
        num_qubits,
        matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
    })
}

/// CNOT with the given control and target in an `n`-qubit register.
pub fn cnot(control: usize, target: usize, num_qubits: usize) -> Result<CMatrix> {
    embed_controlled(&paulis::x(), control, target, num_qubits)
}
