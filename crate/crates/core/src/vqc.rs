//! Fixed-depth variational dilation of the non-unitary map.
//!
//! Two wires: the system `q` (wire 0) and one ancilla `a` (wire 1). Four
//! layers of general single-qubit `U` gates are interleaved with three CNOTs
//! controlled by the ancilla and targeting the system. Postselecting the
//! ancilla on `|0⟩` leaves the top-left block `M(r) = ⟨0_a|V(r)|0_a⟩` acting
//! on the system, and training drives `M(r)|ψ⟩/‖M(r)|ψ⟩‖` towards
//! `A_t|ψ⟩/‖A_t|ψ⟩‖`.
//!
//! Gradients use the parameter-shift rule. Each `U(a, b, c)` factors as
//! `P(b)·Ry(a)·P(c)` with `P(φ) = diag(1, e^{iφ})`, so every angle enters
//! the amplitudes through a single generator and admits an exact two-point
//! rule at shifts of `±π/2`: the phase angles have frequency 1 (coefficient
//! `1/2`), the polar angle frequency `1/2` (coefficient `1/(2√2)`).

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{evolve_pure, HeffParams};
use crate::linalg::{CMatrix, CVector};
use crate::quantum::{cnot, u3_matrix, GateU3, PureState};
use crate::tol;

pub const NUM_PARAMS: usize = 24;
pub const NUM_LAYERS: usize = 4;

/// The 24 ansatz angles: `r[0..12]` are the four system gates, `r[12..24]`
/// the four ancilla gates, three angles per gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamVector(pub [f64; NUM_PARAMS]);

impl ParamVector {
    pub fn zeros() -> Self {
        Self([0.0; NUM_PARAMS])
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; NUM_PARAMS] = values.try_into().map_err(|_| {
            Error::InvalidParams(format!(
                "expected {NUM_PARAMS} parameters, got {}",
                values.len()
            ))
        })?;
        Ok(Self(arr))
    }

    /// Uniform on `[0, 2π)` per angle.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut r = [0.0; NUM_PARAMS];
        for x in r.iter_mut() {
            *x = rng.random_range(0.0..2.0 * PI);
        }
        Self(r)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn system_gate(&self, layer: usize) -> GateU3 {
        let k = 3 * layer;
        GateU3::new(self.0[k], self.0[k + 1], self.0[k + 2])
    }

    pub fn ancilla_gate(&self, layer: usize) -> GateU3 {
        let k = 12 + 3 * layer;
        GateU3::new(self.0[k], self.0[k + 1], self.0[k + 2])
    }

    fn shifted(&self, index: usize, delta: f64) -> Self {
        let mut out = *self;
        out.0[index] += delta;
        out
    }
}

/// CNOT with the ancilla (wire 1) as control and the system (wire 0) as target.
fn ancilla_cnot() -> CMatrix {
    cnot(1, 0, 2).expect("valid wires")
}

/// `V(r) = L₄·CX·L₃·CX·L₂·CX·L₁`, with `Lₖ = U_sys ⊗ U_anc` applied first for k = 1.
pub fn ansatz_unitary(r: &ParamVector) -> CMatrix {
    let cx = ancilla_cnot();
    let mut v = CMatrix::identity(4);
    for layer in 0..NUM_LAYERS {
        if layer > 0 {
            v = cx.matmul(&v);
        }
        let local = u3_matrix(r.system_gate(layer)).kron(&u3_matrix(r.ancilla_gate(layer)));
        v = local.matmul(&v);
    }
    v
}

/// `M(r) = ⟨0_a|V(r)|0_a⟩`.
pub fn postselected_block(r: &ParamVector) -> CMatrix {
    block_of(&ansatz_unitary(r))
}

fn block_of(v: &CMatrix) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| v[(2 * i, 2 * j)])
}

/// Coefficient of the `±π/2` two-point rule for parameter `index`.
fn shift_coefficient(index: usize) -> f64 {
    if index % 3 == 0 {
        // polar angle: amplitudes depend on cos(a/2), sin(a/2)
        1.0 / (2.0 * SQRT_2)
    } else {
        0.5
    }
}

/// `∂V/∂r_j` from two shifted circuit evaluations.
pub fn ansatz_unitary_derivative(r: &ParamVector, index: usize) -> CMatrix {
    let plus = ansatz_unitary(&r.shifted(index, FRAC_PI_2));
    let minus = ansatz_unitary(&r.shifted(index, -FRAC_PI_2));
    (&plus - &minus).scale_real(shift_coefficient(index))
}

/// `∂M/∂r_j` from two shifted circuit evaluations.
pub fn block_derivative(r: &ParamVector, index: usize) -> CMatrix {
    block_of(&ansatz_unitary_derivative(r, index))
}

/// Runs the postselected circuit on `input`; returns the normalized output and
/// the success probability `‖M·input‖²`.
pub fn pqc_output(r: &ParamVector, input: &PureState) -> Result<(PureState, f64)> {
    apply_block(&postselected_block(r), input)
}

pub fn apply_block(block: &CMatrix, input: &PureState) -> Result<(PureState, f64)> {
    if input.num_qubits() != 1 {
        return Err(Error::InvalidState("circuit input must be a single qubit".into()));
    }
    let out = block.mul_vec(input.amplitudes());
    let probability = out.norm_sqr();
    if probability < tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok((PureState::normalized(out)?, probability))
}

#[derive(Clone, Debug)]
pub struct TrainingSet {
    pairs: Vec<(PureState, PureState)>,
}

impl TrainingSet {
    pub fn new(pairs: Vec<(PureState, PureState)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParams("training set is empty".into()));
        }
        if pairs.iter().any(|(a, b)| a.num_qubits() != 1 || b.num_qubits() != 1) {
            return Err(Error::InvalidState("training pairs must be single-qubit".into()));
        }
        Ok(Self { pairs })
    }

    /// Pairs `(ψ, Tψ/‖Tψ‖)` for the four tomographic inputs.
    pub fn for_target(target: &CMatrix) -> Result<Self> {
        let pairs = tomographic_inputs()
            .into_iter()
            .map(|input| {
                let ideal = PureState::normalized(target.mul_vec(input.amplitudes()))?;
                Ok((input, ideal))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(PureState, PureState)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `|0⟩, |1⟩, (|0⟩+|1⟩)/√2, (|0⟩+i|1⟩)/√2`.
pub fn tomographic_inputs() -> Vec<PureState> {
    vec![
        PureState::zero(),
        PureState::one(),
        PureState::plus(),
        PureState::plus_i(),
    ]
}

/// Targets are the exactly evolved states `A_t·input/‖A_t·input‖`.
pub fn build_training_set(p: HeffParams, t: f64) -> Result<TrainingSet> {
    let pairs = tomographic_inputs()
        .into_iter()
        .map(|input| {
            let ideal = evolve_pure(p, t, &input)?;
            Ok((input, ideal))
        })
        .collect::<Result<Vec<_>>>()?;
    TrainingSet::new(pairs)
}

fn pair_cost(block: &CMatrix, input: &PureState, ideal: &PureState) -> Result<f64> {
    let (out, _) = apply_block(block, input)?;
    Ok(2.0 - 2.0 * ideal.inner(&out).re)
}

/// Mean over pairs of `2 - 2·Re⟨ideal|out⟩`.
pub fn cost(r: &ParamVector, ts: &TrainingSet) -> Result<f64> {
    cost_for_block(&postselected_block(r), ts)
}

pub fn cost_for_block(block: &CMatrix, ts: &TrainingSet) -> Result<f64> {
    let mut total = 0.0;
    for (input, ideal) in ts.pairs() {
        total += pair_cost(block, input, ideal)?;
    }
    Ok(total / ts.len() as f64)
}

/// Serial or rayon-parallel evaluation of the 24 shifted-circuit pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    Serial,
    #[default]
    Parallel,
}

fn block_jacobian(r: &ParamVector, mode: Evaluation) -> Vec<CMatrix> {
    match mode {
        Evaluation::Serial => (0..NUM_PARAMS).map(|j| block_derivative(r, j)).collect(),
        Evaluation::Parallel => (0..NUM_PARAMS)
            .into_par_iter()
            .map(|j| block_derivative(r, j))
            .collect(),
    }
}

/// Cost and its parameter-shift gradient.
pub fn cost_and_gradient(
    r: &ParamVector,
    ts: &TrainingSet,
    mode: Evaluation,
) -> Result<(f64, [f64; NUM_PARAMS])> {
    let block = postselected_block(r);
    let jacobian = block_jacobian(r, mode);
    let mut grad = [0.0; NUM_PARAMS];
    let mut total = 0.0;
    for (input, ideal) in ts.pairs() {
        let s: CVector = block.mul_vec(input.amplitudes());
        let n2 = s.norm_sqr();
        if n2 < tol::ZERO_PROBABILITY {
            return Err(Error::ZeroProbability { probability: n2 });
        }
        let n = n2.sqrt();
        let overlap = ideal.amplitudes().inner(&s).re;
        total += 2.0 - 2.0 * overlap / n;
        for (g, d) in grad.iter_mut().zip(&jacobian) {
            let ds = d.mul_vec(input.amplitudes());
            let d_overlap = ideal.amplitudes().inner(&ds).re;
            let d_norm2_half = s.inner(&ds).re;
            *g += -2.0 * (d_overlap / n - overlap * d_norm2_half / (n2 * n));
        }
    }
    let m = ts.len() as f64;
    for g in grad.iter_mut() {
        *g /= m;
    }
    Ok((total / m, grad))
}

pub fn parameter_shift_gradient(r: &ParamVector, ts: &TrainingSet) -> Result<[f64; NUM_PARAMS]> {
    Ok(cost_and_gradient(r, ts, Evaluation::Parallel)?.1)
}

/// Central finite differences of [`cost`] with step `h`.
pub fn finite_difference_gradient(
    r: &ParamVector,
    ts: &TrainingSet,
    h: f64,
) -> Result<[f64; NUM_PARAMS]> {
    let mut grad = [0.0; NUM_PARAMS];
    for (j, g) in grad.iter_mut().enumerate() {
        let up = cost(&r.shifted(j, h), ts)?;
        let down = cost(&r.shifted(j, -h), ts)?;
        *g = (up - down) / (2.0 * h);
    }
    Ok(grad)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Optimizer {
    PlainGd,
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
}

impl Optimizer {
    pub fn adam_default() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub target_cost: f64,
    pub optimizer: Optimizer,
    pub seed: u64,
    #[serde(default)]
    pub evaluation: Evaluation,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            max_iterations: 2000,
            target_cost: 1e-4,
            optimizer: Optimizer::PlainGd,
            seed: 0,
            evaluation: Evaluation::Parallel,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParams("learning_rate must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams("max_iterations must be >= 1".into()));
        }
        if !(0.0..2.0).contains(&self.target_cost) {
            return Err(Error::InvalidParams("target_cost must lie in [0, 2)".into()));
        }
        if let Optimizer::Adam { beta1, beta2, epsilon } = self.optimizer {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || epsilon <= 0.0 {
                return Err(Error::InvalidParams(
                    "adam needs beta1, beta2 in [0, 1) and epsilon > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub cost: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingTrace {
    pub iterations: Vec<TraceEntry>,
}

impl TrainingTrace {
    pub fn final_cost(&self) -> Option<f64> {
        self.iterations.last().map(|e| e.cost)
    }
}

#[derive(Clone, Debug)]
pub struct TrainingOutcome {
    pub params: ParamVector,
    pub trace: TrainingTrace,
    pub final_cost: f64,
    pub converged: bool,
}

enum OptimizerState {
    Plain,
    Adam {
        m: [f64; NUM_PARAMS],
        v: [f64; NUM_PARAMS],
        step: i32,
    },
}

/// Trains from a seeded uniform-random start.
pub fn train(ts: &TrainingSet, cfg: &TrainingConfig) -> Result<TrainingOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = ParamVector::random(&mut rng);
    train_from(ts, cfg, init)
}

/// Gradient descent from `init`. The trace holds one entry per evaluated
/// iterate, so a start that already meets `target_cost` yields one entry and
/// no updates.
pub fn train_from(
    ts: &TrainingSet,
    cfg: &TrainingConfig,
    init: ParamVector,
) -> Result<TrainingOutcome> {
    cfg.validate()?;
    let mut r = init;
    let mut trace = TrainingTrace::default();
    let mut state = match cfg.optimizer {
        Optimizer::PlainGd => OptimizerState::Plain,
        Optimizer::Adam { .. } => OptimizerState::Adam {
            m: [0.0; NUM_PARAMS],
            v: [0.0; NUM_PARAMS],
            step: 0,
        },
    };
    let mut iteration = 0;
    loop {
        let (cost, grad) = cost_and_gradient(&r, ts, cfg.evaluation)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !cost.is_finite() || !grad_norm.is_finite() {
            return Err(Error::Diverged { iteration, cost });
        }
        trace.iterations.push(TraceEntry {
            iteration,
            cost,
            grad_norm,
        });
        let converged = cost <= cfg.target_cost;
        if converged || iteration == cfg.max_iterations {
            return Ok(TrainingOutcome {
                params: r,
                trace,
                final_cost: cost,
                converged,
            });
        }
        match (&mut state, cfg.optimizer) {
            (OptimizerState::Plain, _) => {
                for (x, g) in r.0.iter_mut().zip(&grad) {
                    *x -= cfg.learning_rate * g;
                }
            }
            (
                OptimizerState::Adam { m, v, step },
                Optimizer::Adam {
                    beta1,
                    beta2,
                    epsilon,
                },
            ) => {
                *step += 1;
                let c1 = 1.0 - beta1.powi(*step);
                let c2 = 1.0 - beta2.powi(*step);
                for j in 0..NUM_PARAMS {
                    m[j] = beta1 * m[j] + (1.0 - beta1) * grad[j];
                    v[j] = beta2 * v[j] + (1.0 - beta2) * grad[j] * grad[j];
                    let m_hat = m[j] / c1;
                    let v_hat = v[j] / c2;
                    r.0[j] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                }
            }
            (OptimizerState::Adam { .. }, Optimizer::PlainGd) => unreachable!(),
        }
        iteration += 1;
    }
}

pub const CHECKPOINT_FORMAT: &str = "nonherm-pqc-checkpoint/1";

/// How `t` relates to step counts in the run that produced a checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauConvention {
    /// Time per step.
    pub tau: f64,
    /// `t / tau`, rounded.
    pub steps: u64,
}

/// Trained parameters plus everything needed to reproduce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub omega: f64,
    pub gamma: f64,
    pub t: f64,
    pub tau_convention: TauConvention,
    #[serde(with = "params_serde")]
    pub params: ParamVector,
    pub final_cost: f64,
    pub converged: bool,
    pub seed: u64,
    pub config: TrainingConfig,
}

impl Checkpoint {
    pub fn new(
        p: HeffParams,
        t: f64,
        tau: f64,
        cfg: &TrainingConfig,
        outcome: &TrainingOutcome,
    ) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            omega: p.omega,
            gamma: p.gamma,
            t,
            tau_convention: TauConvention {
                tau,
                steps: (t / tau).round() as u64,
            },
            params: outcome.params,
            final_cost: outcome.final_cost,
            converged: outcome.converged,
            seed: cfg.seed,
            config: *cfg,
        }
    }

    pub fn heff_params(&self) -> Result<HeffParams> {
        HeffParams::new(self.omega, self.gamma)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(Error::Config(format!(
                "unsupported checkpoint format {:?}",
                ck.format
            )));
        }
        Ok(ck)
    }
}

mod params_serde {
    use super::{ParamVector, NUM_PARAMS};
    use serde::de::Error as _;
    use serde::ser::{Error as _, SerializeSeq};
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(r: &ParamVector, ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(NUM_PARAMS))?;
        for x in r.as_slice() {
            if !x.is_finite() {
                return Err(S::Error::custom("non-finite parameter"));
            }
            let raw = RawValue::from_string(format!("{x:.17e}")).map_err(S::Error::custom)?;
            seq.serialize_element(&raw)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<ParamVector, D::Error> {
        let v = Vec::<f64>::deserialize(de)?;
        ParamVector::from_slice(&v).map_err(D::Error::custom)
    }
}
