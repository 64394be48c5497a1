//! Experiment drivers behind the `nonherm` binary. Each returns a [`Table`]
//! whose CSV rendering is byte-for-byte deterministic.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Engine, Experiment, ExperimentConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    evolve_density, exact_propagator, spectrum, trotter_circuit_step, trotter_evolve,
    trotter_step_on_wire, trotter_step_operator, HeffParams, KrausMode, PtPhase, TrotterSchedule,
};
use crate::linalg::CMatrix;
use crate::observables::{asymptotic_mz, bloch, concurrence, mz, p0};
use crate::quantum::{apply_local_operator, bell_state, maximally_mixed, partial_trace, DensityMatrix, PureState};
use crate::vqc::{self, Checkpoint, TrainingSet};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_SAMPLES_PER_PERIOD: usize = 256;
/// Long-time horizon in units of the inverse gap `1/√|Γ²−ω²|`.
const LONG_TIME_RATES: f64 = 200.0;
/// Horizon at the exceptional point, in units of `1/Γ`; `M_z` decays as `2/(Γt)` there.
const EP_LONG_TIME: f64 = 1e4;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Blank,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Blank => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

/// 17 significant digits; negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[idx].clone()).collect())
    }

    /// Numeric values of a column; blanks and text are skipped.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .unwrap_or_default()
            .iter()
            .filter_map(Cell::as_f64)
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Everything an experiment produced, before anything touches the disk.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub table: Table,
    pub checkpoints: Vec<Checkpoint>,
    /// `Some` for training runs: whether every run reached `target_cost`.
    pub target_reached: Option<bool>,
}

pub fn run(experiment: Experiment, cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    cfg.check_keys(experiment)?;
    let mut checkpoints = Vec::new();
    let mut target_reached = None;
    let table = match experiment {
        Experiment::SpectrumSweep => spectrum_sweep(cfg)?,
        Experiment::P0Dynamics => p0_dynamics(cfg)?,
        Experiment::MzDynamics => mz_dynamics(cfg)?,
        Experiment::MzPhaseSweep => mz_phase_sweep(cfg)?,
        Experiment::Train => {
            let (table, cks) = train(cfg, seed)?;
            target_reached = Some(cks.iter().all(|c| c.converged));
            checkpoints = cks;
            table
        }
        Experiment::ConcurrenceDynamics => concurrence_dynamics(cfg)?,
        Experiment::BlochTrajectory => bloch_trajectory(cfg)?,
    };
    Ok(RunOutput {
        experiment,
        table,
        checkpoints,
        target_reached,
    })
}

fn spectrum_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let gamma = cfg
        .gamma
        .ok_or_else(|| Error::Config("missing gamma".into()))?;
    let omegas = match (&cfg.omega_grid, &cfg.omegas) {
        (Some(g), None) if g.points > 0 => g.values(),
        (Some(_), None) => return Err(Error::Config("omega_grid.points must be >= 1".into())),
        (None, Some(v)) => v.clone(),
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either omega_grid or omegas, not both".into()))
        }
        (None, None) => return Err(Error::Config("missing omega_grid or omegas".into())),
    };
    let params = omegas
        .iter()
        .map(|&w| HeffParams::new(w, gamma).map_err(|e| Error::Config(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Cell>> = params
        .par_iter()
        .map(|&p| {
            let s = spectrum(p);
            vec![
                p.omega.into(),
                p.gamma.into(),
                s.lambda_plus.re.into(),
                s.lambda_plus.im.into(),
                s.lambda_minus.re.into(),
                s.lambda_minus.im.into(),
                Cell::Text(p.phase().to_string()),
            ]
        })
        .collect();
    let mut table = Table::new(&[
        "omega",
        "gamma",
        "re_lambda_plus",
        "im_lambda_plus",
        "re_lambda_minus",
        "im_lambda_minus",
        "phase",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Advances a single-qubit pure state by one time step `tau`.
enum PureStepper {
    Exact(CMatrix),
    Trotter {
        schedule: TrotterSchedule,
        substeps: usize,
        mode: KrausMode,
    },
}

impl PureStepper {
    fn new(p: HeffParams, tau: f64, substeps: usize, engine: Engine) -> Result<Self> {
        match engine {
            Engine::Exact => Ok(PureStepper::Exact(exact_propagator(p, tau)?)),
            Engine::TrotterExactKraus | Engine::TrotterGaussianKraus => Ok(PureStepper::Trotter {
                schedule: TrotterSchedule::per_step(p, tau / substeps as f64, substeps),
                substeps,
                mode: engine.kraus_mode().expect("trotter engine"),
            }),
            Engine::TrainedPqc => Err(Error::Config(
                "trained_pqc applies one circuit per checkpoint and cannot be stepped".into(),
            )),
        }
    }

    /// Steps `psi` on `wire`; returns the product of postselection
    /// probabilities (1 for the exact engine).
    fn step(&self, psi: &PureState, wire: usize) -> Result<(PureState, f64)> {
        match self {
            PureStepper::Exact(a) => {
                let v = apply_local_operator(psi.amplitudes(), a, wire, psi.num_qubits())?;
                Ok((PureState::normalized(v)?, 1.0))
            }
            PureStepper::Trotter {
                schedule,
                substeps,
                mode,
            } => {
                let mut state = psi.clone();
                let mut prob = 1.0;
                for _ in 0..*substeps {
                    let (next, pk) = match mode {
                        KrausMode::ExactKraus => trotter_circuit_step(&state, schedule, wire)?,
                        KrausMode::GaussianKraus => {
                            trotter_step_on_wire(&state, schedule, *mode, wire)?
                        }
                    };
                    state = next;
                    prob *= pk;
                }
                Ok((state, prob))
            }
        }
    }
}

fn p0_dynamics(cfg: &ExperimentConfig) -> Result<Table> {
    let p = cfg.heff_params()?;
    let tau = cfg.tau()?;
    let mut table = Table::new(&["step", "t", "p0", "cumulative_success_probability"]);
    if cfg.engine() == Engine::TrainedPqc {
        return trained_pqc_rows(cfg, p, tau, table);
    }
    if cfg.checkpoints.is_some() {
        return Err(Error::Config("checkpoints are only used by engine trained_pqc".into()));
    }
    let steps = cfg.num_steps()?;
    let every = cfg.record_every()?;
    let engine = cfg.engine();
    let stepper = PureStepper::new(p, tau, cfg.substeps()?, engine)?;
    let mut psi = PureState::zero();
    let mut cumulative = 1.0;
    for step in 0..=steps {
        if step % every == 0 {
            let prob = match engine {
                Engine::Exact => Cell::Blank,
                _ => cumulative.into(),
            };
            table.push(vec![step.into(), (step as f64 * tau).into(), p0(&psi).into(), prob]);
        }
        if step < steps {
            let (next, pk) = stepper.step(&psi, 0)?;
            psi = next;
            cumulative *= pk;
        }
    }
    Ok(table)
}

fn same_param(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

fn trained_pqc_rows(
    cfg: &ExperimentConfig,
    p: HeffParams,
    tau: f64,
    mut table: Table,
) -> Result<Table> {
    let paths = cfg
        .checkpoints
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| Error::Config("engine trained_pqc needs a nonempty checkpoints list".into()))?;
    if cfg.steps.is_some() || cfg.max_t.is_some() || cfg.k.is_some() || cfg.record_every.is_some() {
        return Err(Error::Config(
            "engine trained_pqc takes its times from the checkpoints; remove steps/max_t/K/record_every".into(),
        ));
    }
    for path in paths {
        let ck = load_checkpoint(path)?;
        if !same_param(ck.omega, p.omega) || !same_param(ck.gamma, p.gamma) {
            return Err(Error::Config(format!(
                "checkpoint {} was trained for (omega {}, gamma {}), config has ({}, {})",
                path.display(),
                ck.omega,
                ck.gamma,
                p.omega,
                p.gamma
            )));
        }
        let (out, prob) = vqc::pqc_output(&ck.params, &PureState::zero())?;
        let step = (ck.t / tau).round() as usize;
        table.push(vec![step.into(), ck.t.into(), p0(&out).into(), prob.into()]);
    }
    Ok(table)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read checkpoint {}: {e}", path.display())))?;
    Checkpoint::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::Config(format!("bad checkpoint {}: {j}", path.display())),
        other => other,
    })
}

/// Single-qubit density-matrix step `ρ → OρO†/tr`.
fn density_step_operator(p: HeffParams, tau: f64, substeps: usize, engine: Engine) -> Result<CMatrix> {
    match engine {
        Engine::Exact => exact_propagator(p, tau),
        Engine::TrotterExactKraus | Engine::TrotterGaussianKraus => {
            let s = TrotterSchedule::per_step(p, tau / substeps as f64, substeps);
            let one = trotter_step_operator(&s, engine.kraus_mode().expect("trotter engine"));
            let mut op = CMatrix::identity(2);
            for _ in 0..substeps {
                op = one.matmul(&op);
            }
            Ok(op)
        }
        Engine::TrainedPqc => Err(Error::Config(
            "engine trained_pqc is only available for p0_dynamics".into(),
        )),
    }
}

fn mz_dynamics(cfg: &ExperimentConfig) -> Result<Table> {
    let p = cfg.heff_params()?;
    let tau = cfg.tau()?;
    let steps = cfg.num_steps()?;
    let every = cfg.record_every()?;
    let op = density_step_operator(p, tau, cfg.substeps()?, cfg.engine())?;
    let asymptote = if p.gamma > 0.0 {
        Cell::Float(asymptotic_mz(p)?)
    } else {
        Cell::Blank
    };
    let mut table = Table::new(&["step", "t", "mz", "mz_asymptote"]);
    let mut rho = maximally_mixed(1)?;
    for step in 0..=steps {
        if step % every == 0 {
            table.push(vec![
                step.into(),
                (step as f64 * tau).into(),
                mz(&rho)?.into(),
                asymptote.clone(),
            ]);
        }
        if step < steps {
            rho = DensityMatrix::normalized(op.sandwich(rho.matrix()))?;
        }
    }
    Ok(table)
}

/// Long-time `M_z` from `I/2`.
///
/// In the broken phase the state settles, so the value at the horizon is
/// returned. In the symmetric phase `M_z` oscillates with period `π/|λ|` and
/// the mean over the last full period is returned. At the exceptional point
/// the horizon is `EP_LONG_TIME/Γ`. `t_end` overrides the default horizon.
pub fn long_time_mz(p: HeffParams, t_end: Option<f64>, samples_per_period: usize) -> Result<f64> {
    let rate = p.rate();
    let rho0 = maximally_mixed(1)?;
    match p.phase() {
        PtPhase::Broken => {
            let t = t_end.unwrap_or(LONG_TIME_RATES / rate);
            mz(&evolve_density(p, t, &rho0)?)
        }
        PtPhase::ExceptionalPoint => {
            if p.gamma == 0.0 {
                return Ok(0.0);
            }
            let t = t_end.unwrap_or(EP_LONG_TIME / p.gamma);
            mz(&evolve_density(p, t, &rho0)?)
        }
        PtPhase::Symmetric => {
            let period = 2.0 * std::f64::consts::PI / rate;
            let t = t_end.unwrap_or(LONG_TIME_RATES / rate).max(period);
            let n = samples_per_period.max(1);
            let a = exact_propagator(p, period / n as f64)?;
            let mut rho = evolve_density(p, t - period, &rho0)?;
            let mut sum = 0.0;
            for _ in 0..n {
                sum += mz(&rho)?;
                rho = DensityMatrix::normalized(a.sandwich(rho.matrix()))?;
            }
            Ok(sum / n as f64)
        }
    }
}

fn mz_phase_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let omega = cfg.require_omega()?;
    let ratios = cfg
        .gamma_ratios
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| Error::Config("missing or empty gamma_ratios".into()))?;
    let samples = cfg.samples_per_period.unwrap_or(DEFAULT_SAMPLES_PER_PERIOD);
    if samples == 0 {
        return Err(Error::Config("samples_per_period must be >= 1".into()));
    }
    if let Some(t) = cfg.max_t {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config("max_t must be finite and > 0".into()));
        }
    }
    let params = ratios
        .iter()
        .map(|&r| HeffParams::from_ratio(omega, r).map_err(|e| Error::Config(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let rows = params
        .par_iter()
        .zip(ratios.par_iter())
        .map(|(&p, &r)| {
            let formula = asymptotic_mz(p)?;
            let simulated = long_time_mz(p, cfg.max_t, samples)?;
            Ok(vec![r.into(), formula.into(), simulated.into()])
        })
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    let mut table = Table::new(&[
        "omega_over_gamma",
        "mz_asymptotic_formula",
        "mz_long_time_simulated",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Training set whose targets come from `engine` instead of the exact propagator.
pub fn training_set_for(
    p: HeffParams,
    t: f64,
    tau: f64,
    substeps: usize,
    engine: Engine,
) -> Result<TrainingSet> {
    match engine {
        Engine::Exact => vqc::build_training_set(p, t),
        Engine::TrotterExactKraus | Engine::TrotterGaussianKraus => {
            let mode = engine.kraus_mode().expect("trotter engine");
            let steps = ((t / tau).round() as usize * substeps).max(1);
            let pairs = vqc::tomographic_inputs()
                .into_iter()
                .map(|input| {
                    let ideal = trotter_evolve(&input, p, t, steps, mode)?.state;
                    Ok((input, ideal))
                })
                .collect::<Result<Vec<_>>>()?;
            TrainingSet::new(pairs)
        }
        Engine::TrainedPqc => Err(Error::Config(
            "training_target must be exact or a trotter engine".into(),
        )),
    }
}

fn train(cfg: &ExperimentConfig, seed: u64) -> Result<(Table, Vec<Checkpoint>)> {
    let p = cfg.heff_params()?;
    let tau = cfg.tau()?;
    let substeps = cfg.substeps()?;
    let target = cfg.training_target.unwrap_or_default();
    let tc = cfg.training_config(seed)?;
    let (times, sweep) = cfg.training_times()?;
    let mut table = if sweep {
        Table::new(&["t", "iteration", "cost", "grad_norm"])
    } else {
        Table::new(&["iteration", "cost", "grad_norm"])
    };
    let mut checkpoints = Vec::with_capacity(times.len());
    for &t in &times {
        let ts = training_set_for(p, t, tau, substeps, target)?;
        let outcome = vqc::train(&ts, &tc)?;
        for e in &outcome.trace.iterations {
            let mut row = vec![e.iteration.into(), e.cost.into(), e.grad_norm.into()];
            if sweep {
                row.insert(0, t.into());
            }
            table.push(row);
        }
        checkpoints.push(Checkpoint::new(p, t, tau, &tc, &outcome));
    }
    Ok((table, checkpoints))
}

/// Reduced-state and entanglement series from a Bell start with local
/// evolution on the first qubit. Returns `(step, t, two-qubit ρ)` per record.
fn bell_trajectory(cfg: &ExperimentConfig) -> Result<Vec<(usize, f64, DensityMatrix)>> {
    let p = cfg.heff_params()?;
    let tau = cfg.tau()?;
    let steps = cfg.num_steps()?;
    let every = cfg.record_every()?;
    let engine = cfg.engine();
    let mut out = Vec::with_capacity(steps / every + 1);
    match engine {
        Engine::Exact => {
            let local = exact_propagator(p, tau)?.kron(&CMatrix::identity(2));
            let mut rho = bell_state().to_density();
            for step in 0..=steps {
                if step % every == 0 {
                    out.push((step, step as f64 * tau, rho.clone()));
                }
                if step < steps {
                    rho = DensityMatrix::normalized(local.sandwich(rho.matrix()))?;
                }
            }
        }
        _ => {
            let stepper = PureStepper::new(p, tau, cfg.substeps()?, engine)?;
            let mut psi = bell_state();
            for step in 0..=steps {
                if step % every == 0 {
                    out.push((step, step as f64 * tau, psi.to_density()));
                }
                if step < steps {
                    psi = stepper.step(&psi, 0)?.0;
                }
            }
        }
    }
    Ok(out)
}

fn concurrence_dynamics(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(&["step", "t", "concurrence", "bloch_x", "bloch_y", "bloch_z"]);
    for (step, t, rho) in bell_trajectory(cfg)? {
        let c = concurrence(&rho)?.value;
        let b = bloch(&partial_trace(&rho, &[0])?)?;
        table.push(vec![step.into(), t.into(), c.into(), b.x.into(), b.y.into(), b.z.into()]);
    }
    Ok(table)
}

fn bloch_trajectory(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(&["step", "bloch_x", "bloch_y", "bloch_z", "bloch_norm"]);
    for (step, _, rho) in bell_trajectory(cfg)? {
        let b = bloch(&partial_trace(&rho, &[0])?)?;
        table.push(vec![step.into(), b.x.into(), b.y.into(), b.z.into(), b.norm().into()]);
    }
    Ok(table)
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub library_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub engine: Option<Engine>,
    pub output: String,
    pub output_sha256: String,
    pub rows: usize,
    pub checkpoints: Vec<String>,
    pub target_reached: Option<bool>,
    pub wall_time_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `<out>.manifest.json` next to the CSV.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Checkpoint locations: `checkpoint_path` (or `<out>.checkpoint.json`) for a
/// single run, with `.t<index>` inserted before `.json` for sweeps.
pub fn checkpoint_paths(cfg: &ExperimentConfig, out: &Path, count: usize, sweep: bool) -> Vec<PathBuf> {
    let base = cfg.checkpoint_path.clone().unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".checkpoint.json");
        PathBuf::from(s)
    });
    if !sweep {
        return vec![base];
    }
    let stem = base.to_string_lossy();
    let stem = stem.strip_suffix(".json").unwrap_or(&stem).to_string();
    (0..count)
        .map(|i| PathBuf::from(format!("{stem}.t{i}.json")))
        .collect()
}

/// Runs and writes the CSV, any checkpoints and the manifest.
pub fn run_to_files(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    config_bytes: &[u8],
    seed: u64,
    out: &Path,
) -> Result<RunOutput> {
    let start = Instant::now();
    let result = run(experiment, cfg, seed)?;
    let csv = result.table.to_csv()?;
    write_file(out, &csv)?;
    let sweep = cfg.t_values.is_some();
    let paths = checkpoint_paths(cfg, out, result.checkpoints.len(), sweep);
    for (ck, path) in result.checkpoints.iter().zip(&paths) {
        write_file(path, ck.to_json()?.as_bytes())?;
    }
    let manifest = Manifest {
        experiment: experiment.name().to_string(),
        library_version: LIBRARY_VERSION.to_string(),
        config_sha256: sha256_hex(config_bytes),
        seed,
        engine: cfg.engine,
        output: out.display().to_string(),
        output_sha256: sha256_hex(&csv),
        rows: result.table.rows.len(),
        checkpoints: if result.checkpoints.is_empty() {
            Vec::new()
        } else {
            paths.iter().map(|p| p.display().to_string()).collect()
        },
        target_reached: result.target_reached,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_file(&manifest_path(out), text.as_bytes())?;
    Ok(result)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
