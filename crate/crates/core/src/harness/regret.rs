use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::comparator::Comparator;
use crate::harness::record::RunRecord;

/// Average regularized regret of every node against a fixed comparator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub per_node: Vec<f64>,
    pub max: f64,
    pub min: f64,
    pub comparator: Vec<f64>,
    pub comparator_objective: f64,
    pub comparator_gap: f64,
}

/// `(1/T) sum_t sum_j (l_{j,t}(x_{i,t}) + r(x_{i,t})) - F(x*)/T` per node.
pub fn average_regret(record: &RunRecord, comparator: &Comparator) -> Result<RegretReport> {
    if comparator.x.len() != record.dim {
        return Err(Error::invalid(format!(
            "comparator has dimension {}, run has {}",
            comparator.x.len(),
            record.dim
        )));
    }
    if comparator.horizon != record.horizon {
        return Err(Error::invalid(format!(
            "comparator covers {} rounds, run has {}",
            comparator.horizon, record.horizon
        )));
    }
    let m = record.nodes as f64;
    let t = record.horizon as f64;
    let per_node: Vec<f64> = (0..record.nodes)
        .map(|i| {
            let total: f64 = (0..record.horizon)
                .map(|k| record.network_loss[k][i] + m * record.regularizer[k][i])
                .sum();
            (total - comparator.objective) / t
        })
        .collect();
    let max = per_node.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = per_node.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RegretReport {
        per_node,
        max,
        min,
        comparator: comparator.x.clone(),
        comparator_objective: comparator.objective,
        comparator_gap: comparator.gap,
    })
}

/// `sum_i ||x_{i,t} - xbar_t||_2` per round.
pub fn disagreement_curve(record: &RunRecord) -> Vec<f64> {
    record.disagreement_curve()
}
