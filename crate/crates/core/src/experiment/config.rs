use serde::{Deserialize, Serialize};

use crate::algorithms::config::{Algorithm, AlgorithmConfig, BanditSchedule};
use crate::error::{Error, Result};
use crate::geometry::mirror::MirrorMap;
use crate::geometry::prox::ErrorModel;
use crate::geometry::regularizer::Regularizer;
use crate::geometry::set::ConstraintSet;
use crate::network::graph::Edge;
use crate::network::schedule::{ScheduleSpec, DEFAULT_EDGE_PROBABILITY};
use crate::problems::oracle::Feasibility;

/// One experiment: a base run, optionally swept over parameters and
/// always over `horizons`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Master seed; data, network and exploration seeds derive from it.
    #[serde(default, with = "seed_serde")]
    pub seed: u64,
    pub algorithm: Algorithm,
    pub horizons: Vec<usize>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub network: NetworkSpec,
    #[serde(default)]
    pub step: StepRule,
    #[serde(default)]
    pub exploration: ExplorationSpec,
    #[serde(default)]
    pub error: ErrorModel,
    #[serde(default)]
    pub run: RunOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub nodes: usize,
    pub dim: usize,
    /// Ridge weight inside each loss.
    #[serde(default = "default_l2_weight")]
    pub l2_weight: f64,
    /// Weight of the l1 regularizer.
    #[serde(default = "default_l1_weight")]
    pub l1_weight: f64,
}

fn default_l2_weight() -> f64 {
    1.0
}

fn default_l1_weight() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapChoice {
    #[default]
    Euclidean,
    Entropic,
    Pnorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetChoice {
    #[default]
    Ball,
    Simplex,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(default)]
    pub map: MapChoice,
    /// p-norm exponent; defaults to `ln d / (ln d - 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub set: SetChoice,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Radius used for bound evaluation on an unbounded set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_radius: Option<f64>,
}

fn default_radius() -> f64 {
    1.0
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            map: MapChoice::Euclidean,
            p: None,
            set: SetChoice::Ball,
            radius: 1.0,
            bound_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Static,
    #[default]
    AlternatingHalves,
    Ring,
    Complete,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default)]
    pub kind: NetworkKind,
    #[serde(default = "default_edge_probability")]
    pub edge_probability: f64,
    /// Edge sets for `kind = "custom"`, cycled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<Vec<Edge>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "seed_serde::option")]
    pub seed: Option<u64>,
}

fn default_edge_probability() -> f64 {
    DEFAULT_EDGE_PROBABILITY
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec {
            kind: NetworkKind::AlternatingHalves,
            edge_probability: DEFAULT_EDGE_PROBABILITY,
            rounds: Vec::new(),
            seed: None,
        }
    }
}

impl NetworkSpec {
    pub fn schedule_spec(&self) -> ScheduleSpec {
        let edge_probability = self.edge_probability;
        match self.kind {
            NetworkKind::Static => ScheduleSpec::Static { edge_probability },
            NetworkKind::AlternatingHalves => ScheduleSpec::AlternatingHalves { edge_probability },
            NetworkKind::Ring => ScheduleSpec::Ring,
            NetworkKind::Complete => ScheduleSpec::Complete,
            NetworkKind::Custom => ScheduleSpec::Custom {
                rounds: self.rounds.clone(),
            },
        }
    }
}

/// How the step size depends on the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepRule {
    /// `c_eta / sqrt(T)`
    SqrtHorizon {
        #[serde(default = "one")]
        c_eta: f64,
    },
    /// `1 / (d sqrt(T))`
    DimensionScaled,
    /// `1 / (p p* d sqrt(T))`
    Bandit,
    Fixed { eta: f64 },
}

fn one() -> f64 {
    1.0
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::SqrtHorizon { c_eta: 1.0 }
    }
}

/// Bandit exploration; unset fields follow `delta = 1/sqrt(T)`,
/// `xi = delta / R_inner`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default)]
    pub feasibility: Feasibility,
    #[serde(default)]
    pub numeric_fallback: bool,
    #[serde(default)]
    pub tie_value: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            feasibility: Feasibility::Strict,
            numeric_fallback: false,
            tie_value: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Every combination of axis values.
    #[default]
    Cartesian,
    /// The k-th value of every axis together.
    Zip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path into the config, e.g. `error.c_rho`.
    pub path: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub mode: SweepMode,
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Also write each run's per-round record.
    #[serde(default)]
    pub records: bool,
}

/// TOML integers are signed 64-bit, so seeds above `i64::MAX` are written
/// as decimal strings. Both forms are accepted on input.
mod seed_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    fn decode<E: de::Error>(r: Repr) -> Result<u64, E> {
        match r {
            Repr::Int(v) => u64::try_from(v).map_err(|_| E::custom(format!("seed {v} is negative"))),
            Repr::Text(s) => s.parse().map_err(|_| E::custom(format!("seed '{s}' is not a u64"))),
        }
    }

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        decode(Repr::deserialize(d)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(decode).transpose()
        }
    }
}

/// Seeds derived from the master seed.
pub mod seed_tag {
    pub const DATA: u64 = 1;
    pub const NETWORK: u64 = 2;
    pub const DIRECTIONS: u64 = 3;
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("config serialization: {e}")))
    }

    pub fn data_seed(&self) -> u64 {
        crate::rng::derive_seed(self.seed, seed_tag::DATA)
    }

    pub fn network_seed(&self) -> u64 {
        self.network
            .seed
            .unwrap_or_else(|| crate::rng::derive_seed(self.seed, seed_tag::NETWORK))
    }

    pub fn direction_seed(&self) -> u64 {
        crate::rng::derive_seed(self.seed, seed_tag::DIRECTIONS)
    }

    pub fn mirror_map(&self) -> Result<MirrorMap> {
        match self.geometry.map {
            MapChoice::Euclidean => Ok(MirrorMap::euclidean()),
            MapChoice::Entropic => Ok(MirrorMap::entropic()),
            MapChoice::Pnorm => match self.geometry.p {
                Some(p) => MirrorMap::pnorm(p),
                None => MirrorMap::pnorm_for_dimension(self.problem.dim),
            },
        }
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        match self.geometry.set {
            SetChoice::Ball => ConstraintSet::ball(self.geometry.radius),
            SetChoice::Simplex => Ok(ConstraintSet::simplex()),
            SetChoice::Unbounded => Ok(ConstraintSet::unbounded()),
        }
    }

    pub fn regularizer(&self) -> Regularizer {
        Regularizer::l1(self.problem.l1_weight)
    }

    /// Algorithm parameters for horizon `t`.
    pub fn algorithm_config(&self, horizon: usize) -> Result<AlgorithmConfig> {
        let map = self.mirror_map()?;
        let set = self.constraint_set()?;
        let d = self.problem.dim;
        let root = (horizon as f64).sqrt();
        let p_bar = map.norm().l2_equivalence(d);
        let p_star = map.dual_norm().l2_equivalence(d);
        let eta = match self.step {
            StepRule::SqrtHorizon { c_eta } => c_eta / root,
            StepRule::DimensionScaled => 1.0 / (d as f64 * root),
            StepRule::Bandit => 1.0 / (p_bar * p_star * d as f64 * root),
            StepRule::Fixed { eta } => eta,
        };
        let mut config = AlgorithmConfig::full_information(eta, self.error);
        config.feasibility = self.run.feasibility;
        config.numeric_fallback = self.run.numeric_fallback;
        config.tie_value = self.run.tie_value;
        if self.algorithm == Algorithm::Banodcmd {
            let inner = set.inner_radius();
            let delta = self.exploration.delta.unwrap_or(1.0 / root);
            let xi = match self.exploration.xi {
                Some(xi) => xi,
                None if inner > 0.0 => delta / inner,
                None => {
                    return Err(Error::config(
                        "bandit feedback needs a set containing a Euclidean ball (R_inner > 0)",
                    ))
                }
            };
            let schedule = BanditSchedule { eta, delta, xi };
            config = AlgorithmConfig {
                feasibility: config.feasibility,
                numeric_fallback: config.numeric_fallback,
                tie_value: config.tie_value,
                ..AlgorithmConfig::bandit(schedule, self.error)
            };
        }
        Ok(config)
    }
}
