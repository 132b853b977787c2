use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::prox::ErrorModel;
use crate::problems::oracle::Feasibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Odcmd,
    Banodcmd,
    SubgradientBaseline,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Odcmd => "odcmd",
            Algorithm::Banodcmd => "banodcmd",
            Algorithm::SubgradientBaseline => "subgradient_baseline",
        }
    }
}

/// Per-run parameters of the round loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub eta: f64,
    #[serde(default)]
    pub error_model: ErrorModel,
    /// Exploration radius (bandit only).
    #[serde(default)]
    pub delta: f64,
    /// Shrinkage of the feasible set (bandit only).
    #[serde(default)]
    pub xi: f64,
    /// Subgradient of `|.|` at zero used by the baseline, in `[-1, 1]`.
    #[serde(default)]
    pub tie_value: f64,
    #[serde(default)]
    pub feasibility: Feasibility,
    /// Use the numeric prox when no closed form exists.
    #[serde(default)]
    pub numeric_fallback: bool,
}

impl AlgorithmConfig {
    pub fn full_information(eta: f64, error_model: ErrorModel) -> Self {
        AlgorithmConfig {
            eta,
            error_model,
            delta: 0.0,
            xi: 0.0,
            tie_value: 0.0,
            feasibility: Feasibility::Strict,
            numeric_fallback: false,
        }
    }

    pub fn bandit(schedule: BanditSchedule, error_model: ErrorModel) -> Self {
        AlgorithmConfig {
            delta: schedule.delta,
            xi: schedule.xi,
            ..Self::full_information(schedule.eta, error_model)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            errs.push(format!("step size must be positive and finite, got {}", self.eta));
        }
        if let Err(e) = self.error_model.validate() {
            errs.push(e.to_string());
        }
        if !(-1.0..=1.0).contains(&self.tie_value) {
            errs.push(format!("tie value {} outside [-1, 1]", self.tie_value));
        }
        if !(0.0..1.0).contains(&self.xi) {
            errs.push(format!("shrinkage xi = {} outside [0, 1)", self.xi));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            errs.push(format!("exploration radius must be nonnegative, got {}", self.delta));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Bandit feasibility gate: query points stay in `K` only if
    /// `delta <= xi * R_inner`.
    pub fn check_exploration(&self, inner_radius: f64) -> Result<()> {
        let cap = self.xi * inner_radius;
        if !(self.delta > 0.0) {
            return Err(Error::config("bandit exploration radius must be positive"));
        }
        if self.delta > cap * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "exploration radius delta = {} exceeds xi * R_inner = {cap}; Set δ ≤ ξR̲",
                self.delta
            )));
        }
        Ok(())
    }
}

/// `c_eta / sqrt(T)`
pub fn full_information_step(c_eta: f64, horizon: usize) -> f64 {
    c_eta / (horizon as f64).sqrt()
}

/// `c_eta* = sqrt(A1 / A2)`, the constant minimizing `A1/c + A2 c`.
pub fn optimal_step_constant(a1: f64, a2: f64) -> f64 {
    (a1 / a2).sqrt()
}

/// Bandit parameters for a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanditSchedule {
    pub eta: f64,
    pub delta: f64,
    pub xi: f64,
}

impl BanditSchedule {
    /// `eta = 1 / (p p* d sqrt T)`, `delta = 1/sqrt T`, `xi = delta / R_inner`.
    pub fn standard(horizon: usize, d: usize, p_bar: f64, p_star: f64, inner_radius: f64) -> Result<Self> {
        let root = (horizon as f64).sqrt();
        let delta = 1.0 / root;
        if !(inner_radius > 0.0) {
            return Err(Error::config("bandit schedule needs a set containing a ball (R_inner > 0)"));
        }
        let xi = delta / inner_radius;
        if xi >= 1.0 {
            return Err(Error::config(format!(
                "horizon {horizon} too short: xi = {xi} must be below 1"
            )));
        }
        Ok(BanditSchedule {
            eta: 1.0 / (p_bar * p_star * d as f64 * root),
            delta,
            xi,
        })
    }
}
