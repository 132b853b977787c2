use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::graph::{self, Edge};
use crate::network::weights::{metropolis_weights, WeightMatrix};

/// Default edge probability for random base graphs.
pub const DEFAULT_EDGE_PROBABILITY: f64 = 0.2;

fn default_edge_probability() -> f64 {
    DEFAULT_EDGE_PROBABILITY
}

/// Which graph sequence to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// A fixed random connected graph every round.
    Static {
        #[serde(default = "default_edge_probability")]
        edge_probability: f64,
    },
    /// Half of a random connected graph's edges on odd rounds, the rest on
    /// even rounds.
    AlternatingHalves {
        #[serde(default = "default_edge_probability")]
        edge_probability: f64,
    },
    Ring,
    Complete,
    /// Edge sets used in order and then cycled.
    Custom { rounds: Vec<Vec<Edge>> },
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec::AlternatingHalves {
            edge_probability: DEFAULT_EDGE_PROBABILITY,
        }
    }
}

/// A periodic sequence of weight matrices `W(1), W(2), ...`.
#[derive(Debug, Clone)]
pub struct NetworkSchedule {
    m: usize,
    base: Vec<Edge>,
    rounds: Vec<Vec<Edge>>,
    weights: Vec<WeightMatrix>,
    nominal_window: Option<usize>,
}

#[derive(Serialize)]
struct EdgeListDoc<'a> {
    m: usize,
    base_edges: &'a [Edge],
    rounds: &'a [Vec<Edge>],
}

impl NetworkSchedule {
    pub fn build(spec: &ScheduleSpec, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("network needs at least one node"));
        }
        let (base, rounds, window) = match spec {
            ScheduleSpec::Static { edge_probability } => {
                let g = graph::erdos_renyi_connected(m, *edge_probability, seed)?;
                (g.clone(), vec![g], Some(1))
            }
            ScheduleSpec::AlternatingHalves { edge_probability } => {
                let g = graph::erdos_renyi_connected(m, *edge_probability, seed)?;
                let (odd, even) = graph::split_halves(&g, seed);
                let window = if m == 1 { 1 } else { 2 };
                (g, vec![odd, even], Some(window))
            }
            ScheduleSpec::Ring => {
                let g = graph::ring(m);
                (g.clone(), vec![g], Some(1))
            }
            ScheduleSpec::Complete => {
                let g = graph::complete(m);
                (g.clone(), vec![g], Some(1))
            }
            ScheduleSpec::Custom { rounds } => {
                if rounds.is_empty() {
                    return Err(Error::config("custom schedule needs at least one round"));
                }
                let rounds = rounds
                    .iter()
                    .map(|r| graph::normalize(r, m))
                    .collect::<Result<Vec<_>>>()?;
                let mut base: Vec<Edge> = rounds.concat();
                base.sort_unstable();
                base.dedup();
                (base, rounds, None)
            }
        };
        if !graph::is_connected(m, [base.as_slice()]) {
            return Err(Error::config("base graph is disconnected"));
        }
        let weights = rounds.iter().map(|e| metropolis_weights(m, e)).collect();
        Ok(NetworkSchedule {
            m,
            base,
            rounds,
            weights,
            nominal_window: window,
        })
    }

    /// A schedule from explicit matrices (no edge metadata beyond the
    /// support); used to probe the diagnostics with arbitrary weights.
    pub fn from_weights(weights: Vec<WeightMatrix>) -> Result<Self> {
        let m = weights.first().map(WeightMatrix::size).unwrap_or(0);
        if m == 0 || weights.iter().any(|w| w.size() != m) {
            return Err(Error::invalid("weight matrices must be nonempty and equally sized"));
        }
        let rounds: Vec<Vec<Edge>> = weights
            .iter()
            .map(|w| {
                (0..m)
                    .flat_map(|i| w.row(i).iter().filter(move |(j, _)| *j > i).map(move |(j, _)| (i, *j)))
                    .collect()
            })
            .collect();
        let mut base = rounds.concat();
        base.sort_unstable();
        base.dedup();
        Ok(NetworkSchedule {
            m,
            base,
            rounds,
            weights,
            nominal_window: None,
        })
    }

    pub fn nodes(&self) -> usize {
        self.m
    }

    pub fn period(&self) -> usize {
        self.weights.len()
    }

    fn index(&self, t: usize) -> usize {
        (t.max(1) - 1) % self.weights.len()
    }

    /// `W(t)` for `t >= 1`.
    pub fn weights(&self, t: usize) -> &WeightMatrix {
        &self.weights[self.index(t)]
    }

    /// `E_t` for `t >= 1`.
    pub fn edges(&self, t: usize) -> &[Edge] {
        &self.rounds[self.index(t)]
    }

    pub fn base_edges(&self) -> &[Edge] {
        &self.base
    }

    /// The window length the construction guarantees, if known a priori.
    pub fn nominal_window(&self) -> Option<usize> {
        self.nominal_window
    }

    /// Smallest positive weight over one period.
    pub fn zeta(&self) -> f64 {
        self.weights.iter().map(WeightMatrix::min_positive).fold(f64::INFINITY, f64::min)
    }

    pub fn edge_list_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EdgeListDoc {
            m: self.m,
            base_edges: &self.base,
            rounds: &self.rounds,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_is_trivial() {
        for spec in [ScheduleSpec::default(), ScheduleSpec::Ring, ScheduleSpec::Complete] {
            let s = NetworkSchedule::build(&spec, 1, 3).unwrap();
            for t in 1..5 {
                assert_eq!(s.weights(t).dense(), vec![vec![1.0]]);
            }
        }
    }

    #[test]
    fn alternating_halves_cover_the_base_graph() {
        let s = NetworkSchedule::build(&ScheduleSpec::default(), 30, 5).unwrap();
        assert_eq!(s.period(), 2);
        for t in 1..20 {
            let mut u = [s.edges(t), s.edges(t + 1)].concat();
            u.sort_unstable();
            assert_eq!(u, s.base_edges());
        }
        assert_eq!(s.nominal_window(), Some(2));
    }

    #[test]
    fn reproducible_under_seed() {
        let a = NetworkSchedule::build(&ScheduleSpec::default(), 20, 9).unwrap();
        let b = NetworkSchedule::build(&ScheduleSpec::default(), 20, 9).unwrap();
        let c = NetworkSchedule::build(&ScheduleSpec::default(), 20, 10).unwrap();
        for t in 1..10 {
            assert_eq!(a.edges(t), b.edges(t));
        }
        assert_ne!(a.base_edges(), c.base_edges());
    }

    #[test]
    fn disconnected_custom_is_rejected() {
        let spec = ScheduleSpec::Custom {
            rounds: vec![vec![(0, 1)]],
        };
        assert!(NetworkSchedule::build(&spec, 3, 0).is_err());
    }

    #[test]
    fn edge_list_export() {
        let s = NetworkSchedule::build(&ScheduleSpec::Ring, 4, 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.edge_list_json().unwrap()).unwrap();
        assert_eq!(v["m"], 4);
        assert_eq!(v["base_edges"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn spec_parses_from_toml() {
        let s: ScheduleSpec = toml::from_str("kind = \"alternating_halves\"").unwrap();
        assert_eq!(s, ScheduleSpec::default());
        let c: ScheduleSpec = toml::from_str("kind = \"custom\"\nrounds = [[[0, 1]], []]").unwrap();
        assert!(matches!(c, ScheduleSpec::Custom { .. }));
    }
}
