use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algorithms::config::{Algorithm, AlgorithmConfig};
use crate::error::Result;

/// Iterates are kept only while `T * m * d` stays at or below this.
pub const ITERATE_BUDGET: usize = 10_000_000;

pub const RECORD_FORMAT: &str = "odcmd-record v1";

/// Per-round maxima over nodes of the step-level diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    pub rho: f64,
    /// `max_i ||y*_{i,t} - x_{i,t}||` in the map's norm.
    pub max_step: f64,
    /// `max_i ||y_{i,t} - y*_{i,t}||` in the map's norm.
    pub max_error: f64,
    /// Largest realized prox objective gap.
    pub max_gap: f64,
    /// Largest dual norm of the (estimated) gradient used.
    pub max_gradient: f64,
    /// `||sum_i x_{i,t+1} - sum_i y_{i,t}||_inf`
    pub average_drift: f64,
}

/// Trajectory and per-round metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub config: AlgorithmConfig,
    pub seed: u64,
    pub nodes: usize,
    pub dim: usize,
    pub horizon: usize,
    /// `x_{i,1}`.
    pub initial: Vec<Vec<f64>>,
    /// `iterates[t-1][i] = x_{i,t}`, when within [`ITERATE_BUDGET`].
    pub iterates: Option<Vec<Vec<Vec<f64>>>>,
    /// `network_loss[t-1][i] = sum_j l_{j,t}(x_{i,t})`
    pub network_loss: Vec<Vec<f64>>,
    /// `regularizer[t-1][i] = r(x_{i,t})`
    pub regularizer: Vec<Vec<f64>>,
    /// `disagreement[t-1][i] = ||x_{i,t} - mean_j x_{j,t}||_2`
    pub disagreement: Vec<Vec<f64>>,
    /// `max_j sum_i ||x_{i,t} - x_{j,t}||` in the map's norm.
    pub pairwise_disagreement: Vec<f64>,
    pub rounds: Vec<RoundDiagnostics>,
    pub queries: usize,
    pub query_violations: usize,
}

impl RunRecord {
    pub fn keeps_iterates(horizon: usize, nodes: usize, dim: usize) -> bool {
        horizon.saturating_mul(nodes).saturating_mul(dim) <= ITERATE_BUDGET
    }

    /// `sum_i ||x_{i,t} - xbar_t||_2` for each round.
    pub fn disagreement_curve(&self) -> Vec<f64> {
        self.disagreement.iter().map(|r| r.iter().sum()).collect()
    }

    /// Columns `t,i,loss,reg,disagreement`; `loss` is the network-wide loss
    /// `sum_j l_{j,t}(x_{i,t})` that enters the regret.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# {RECORD_FORMAT} algorithm={} nodes={} dim={} horizon={} seed={}",
            self.algorithm.name(),
            self.nodes,
            self.dim,
            self.horizon,
            self.seed
        )?;
        writeln!(out, "t,i,loss,reg,disagreement")?;
        for t in 0..self.horizon {
            for i in 0..self.nodes {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    t + 1,
                    i,
                    self.network_loss[t][i],
                    self.regularizer[t][i],
                    self.disagreement[t][i]
                )?;
            }
        }
        Ok(())
    }
}
