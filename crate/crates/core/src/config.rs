//! Strict JSON configuration for the experiment drivers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{HeffParams, KrausMode};
use crate::vqc::{Evaluation, Optimizer, TrainingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    SpectrumSweep,
    P0Dynamics,
    MzDynamics,
    MzPhaseSweep,
    Train,
    ConcurrenceDynamics,
    BlochTrajectory,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::SpectrumSweep,
        Experiment::P0Dynamics,
        Experiment::MzDynamics,
        Experiment::MzPhaseSweep,
        Experiment::Train,
        Experiment::ConcurrenceDynamics,
        Experiment::BlochTrajectory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpectrumSweep => "spectrum_sweep",
            Experiment::P0Dynamics => "p0_dynamics",
            Experiment::MzDynamics => "mz_dynamics",
            Experiment::MzPhaseSweep => "mz_phase_sweep",
            Experiment::Train => "train",
            Experiment::ConcurrenceDynamics => "concurrence_dynamics",
            Experiment::BlochTrajectory => "bloch_trajectory",
        }
    }

    /// Config keys this experiment accepts; anything else is rejected.
    fn allowed_keys(self) -> Vec<&'static str> {
        const COMMON: &[&str] = &["experiment", "seed", "output_path"];
        const TRAJECTORY: &[&str] = &[
            "omega",
            "gamma",
            "omega_over_gamma",
            "tau",
            "steps",
            "max_t",
            "K",
            "engine",
            "record_every",
        ];
        let own: &'static [&'static str] = match self {
            Experiment::SpectrumSweep => &["omega_grid", "omegas", "gamma"],
            Experiment::P0Dynamics => &[
                "omega",
                "gamma",
                "omega_over_gamma",
                "tau",
                "steps",
                "max_t",
                "K",
                "engine",
                "record_every",
                "checkpoints",
            ],
            Experiment::MzDynamics | Experiment::ConcurrenceDynamics | Experiment::BlochTrajectory => {
                TRAJECTORY
            }
            Experiment::MzPhaseSweep => &["omega", "gamma_ratios", "max_t", "samples_per_period"],
            Experiment::Train => &[
                "omega",
                "gamma",
                "omega_over_gamma",
                "tau",
                "t",
                "t_values",
                "K",
                "training_target",
                "learning_rate",
                "max_iterations",
                "target_cost",
                "optimizer",
                "evaluation",
                "checkpoint_path",
            ],
        };
        [COMMON, own].concat()
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Exact,
    TrotterExactKraus,
    TrotterGaussianKraus,
    TrainedPqc,
}

impl Engine {
    pub fn kraus_mode(self) -> Option<KrausMode> {
        match self {
            Engine::TrotterExactKraus => Some(KrausMode::ExactKraus),
            Engine::TrotterGaussianKraus => Some(KrausMode::GaussianKraus),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl OmegaGrid {
    /// Endpoints inclusive; the rational form keeps symmetric grids exact.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let i = i as f64;
                (self.start * (n - i) + self.stop * i) / n
            })
            .collect()
    }
}

/// One experiment's settings. Every field is optional at parse time; which
/// ones are required or permitted depends on the experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_over_gamma: Option<f64>,
    /// Values of ω/Γ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<OmegaGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_t: Option<f64>,
    /// Trotter sub-steps per time step.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<PathBuf>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training_target: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<Optimizer>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(config_err(format!("{name} must be finite and > 0, got {x}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Resolves which experiment runs: `requested` (from the command line)
    /// must agree with the config's own `experiment` key when both exist.
    pub fn resolve_experiment(&self, requested: Option<Experiment>) -> Result<Experiment> {
        match (requested, self.experiment) {
            (Some(a), Some(b)) if a != b => Err(config_err(format!(
                "command requests {a} but config declares {b}"
            ))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(config_err("no experiment given")),
        }
    }

    /// Rejects keys that the experiment does not use.
    pub fn check_keys(&self, experiment: Experiment) -> Result<()> {
        let value = serde_json::to_value(self)?;
        let allowed = experiment.allowed_keys();
        if let Some(map) = value.as_object() {
            for key in map.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(config_err(format!(
                        "key {key:?} is not used by {experiment}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require_omega(&self) -> Result<f64> {
        let w = self.omega.ok_or_else(|| config_err("missing omega"))?;
        if w.is_finite() {
            Ok(w)
        } else {
            Err(config_err("omega must be finite"))
        }
    }

    /// `(ω, Γ)` from `gamma` or `omega_over_gamma` (exactly one).
    pub fn heff_params(&self) -> Result<HeffParams> {
        let omega = self.require_omega()?;
        let p = match (self.gamma, self.omega_over_gamma) {
            (Some(_), Some(_)) => {
                return Err(config_err("give either gamma or omega_over_gamma, not both"))
            }
            (Some(g), None) => HeffParams::new(omega, g),
            (None, Some(r)) => HeffParams::from_ratio(omega, r),
            (None, None) => return Err(config_err("missing gamma or omega_over_gamma")),
        };
        p.map_err(|e| config_err(e.to_string()))
    }

    pub fn tau(&self) -> Result<f64> {
        positive("tau", self.tau.unwrap_or(1.0))
    }

    /// Number of time steps from `steps` or `max_t / tau` (exactly one).
    pub fn num_steps(&self) -> Result<usize> {
        match (self.steps, self.max_t) {
            (Some(_), Some(_)) => Err(config_err("give either steps or max_t, not both")),
            (Some(n), None) => Ok(n),
            (None, Some(t)) => {
                let t = positive("max_t", t)?;
                Ok((t / self.tau()?).round() as usize)
            }
            (None, None) => Err(config_err("missing steps or max_t")),
        }
    }

    pub fn substeps(&self) -> Result<usize> {
        match self.k.unwrap_or(1) {
            0 => Err(config_err("K must be >= 1")),
            k => Ok(k),
        }
    }

    pub fn record_every(&self) -> Result<usize> {
        match self.record_every.unwrap_or(1) {
            0 => Err(config_err("record_every must be >= 1")),
            r => Ok(r),
        }
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or_default()
    }

    pub fn training_config(&self, seed: u64) -> Result<TrainingConfig> {
        let d = TrainingConfig::default();
        let cfg = TrainingConfig {
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            target_cost: self.target_cost.unwrap_or(d.target_cost),
            optimizer: self.optimizer.unwrap_or(d.optimizer),
            seed,
            evaluation: self.evaluation.unwrap_or(d.evaluation),
        };
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    /// Training times from `t` or `t_values` (exactly one); the flag says
    /// whether this is a sweep.
    pub fn training_times(&self) -> Result<(Vec<f64>, bool)> {
        let (ts, sweep) = match (self.t, &self.t_values) {
            (Some(_), Some(_)) => return Err(config_err("give either t or t_values, not both")),
            (Some(t), None) => (vec![t], false),
            (None, Some(v)) if !v.is_empty() => (v.clone(), true),
            (None, Some(_)) => return Err(config_err("t_values is empty")),
            (None, None) => return Err(config_err("missing t or t_values")),
        };
        for &t in &ts {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(config_err(format!("training time {t} must be finite and >= 0")));
            }
        }
        Ok((ts, sweep))
    }

    /// Rewrites relative paths so they are taken relative to `base`.
    pub fn rebase_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(list) = self.checkpoints.as_mut() {
            list.iter_mut().for_each(fix);
        }
        if let Some(p) = self.checkpoint_path.as_mut() {
            fix(p);
        }
        if let Some(p) = self.output_path.as_mut() {
            fix(p);
        }
    }
}
