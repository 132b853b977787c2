use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::graph;
use crate::network::schedule::NetworkSchedule;

/// Contraction constants of the consensus product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConstants {
    /// `(1 - zeta / 4m^2)^{-2}`
    pub theta: f64,
    /// `(1 - zeta / 4m^2)^{1/B}`
    pub kappa: f64,
}

impl ConsensusConstants {
    pub fn new(zeta: f64, m: usize, window: usize) -> Result<Self> {
        if !(zeta > 0.0 && zeta <= 1.0) || m == 0 || window == 0 {
            return Err(Error::invalid(format!(
                "need 0 < zeta <= 1, m >= 1, B >= 1 (got {zeta}, {m}, {window})"
            )));
        }
        let base = 1.0 - zeta / (4.0 * (m * m) as f64);
        Ok(ConsensusConstants {
            theta: base.powi(-2),
            kappa: base.powf(1.0 / window as f64),
        })
    }

    /// `theta * kappa^{gap}`
    pub fn bound(&self, gap: usize) -> f64 {
        self.theta * self.kappa.powf(gap as f64)
    }
}

/// `max_ij |[W(t) ... W(tau)]_ij - 1/m|`.
pub fn consensus_product_deviation(schedule: &NetworkSchedule, t: usize, tau: usize) -> f64 {
    assert!(t >= tau && tau >= 1, "need t >= tau >= 1");
    *deviation_profile(schedule, tau, t).last().unwrap()
}

/// Deviations of `W(t:tau)` for `t = tau ..= t_max`.
pub fn deviation_profile(schedule: &NetworkSchedule, tau: usize, t_max: usize) -> Vec<f64> {
    let m = schedule.nodes();
    let target = 1.0 / m as f64;
    let deviation = |p: &[Vec<f64>]| {
        p.iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max((v - target).abs()))
    };
    let mut p = schedule.weights(tau).dense();
    let mut out = vec![deviation(&p)];
    for t in tau + 1..=t_max {
        p = schedule.weights(t).left_multiply(&p);
        out.push(deviation(&p));
    }
    out
}

/// Outcome of checking the network assumptions over a horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption1Report {
    pub horizon: usize,
    /// Largest row or column sum deviation from 1.
    pub max_sum_deviation: f64,
    /// Smallest positive weight on the diagonal or an active edge.
    pub zeta: f64,
    /// Smallest `B` whose aligned windows all have connected unions.
    pub window: Option<usize>,
    /// Human-readable violations, each naming a round.
    pub violations: Vec<String>,
    /// First offending round, if any.
    pub first_violation_round: Option<usize>,
}

impl Assumption1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_violation_round {
            None => Ok(self),
            Some(round) => Err(Error::Assumption {
                round,
                detail: self.violations.join("; "),
            }),
        }
    }

    pub fn constants(&self, m: usize) -> Result<ConsensusConstants> {
        let window = self
            .window
            .ok_or_else(|| Error::invalid("no connectivity window within the horizon"))?;
        ConsensusConstants::new(self.zeta, m, window)
    }
}

pub const STOCHASTIC_TOL: f64 = 1e-12;

pub fn verify_assumption1(schedule: &NetworkSchedule, horizon: usize) -> Assumption1Report {
    let m = schedule.nodes();
    let horizon = horizon.max(1);
    let mut violations = Vec::new();
    let mut first = None;
    let mut flag = |round: usize, msg: String, first: &mut Option<usize>| {
        first.get_or_insert(round);
        violations.push(format!("round {round}: {msg}"));
    };

    let mut max_dev = 0.0f64;
    let mut zeta = f64::INFINITY;
    for t in 1..=horizon.min(schedule.period()) {
        let w = schedule.weights(t);
        let dev = w.stochasticity_error();
        max_dev = max_dev.max(dev);
        if dev > STOCHASTIC_TOL {
            flag(t, format!("not doubly stochastic (deviation {dev:e})"), &mut first);
        }
        if w.min_entry() < 0.0 {
            flag(t, "negative weight".into(), &mut first);
        }
        for i in 0..m {
            zeta = zeta.min(w.get(i, i));
        }
        for &(a, b) in schedule.edges(t) {
            zeta = zeta.min(w.get(a, b)).min(w.get(b, a));
        }
    }
    if !(zeta > 0.0) {
        let round = (1..=schedule.period())
            .find(|&t| (0..m).any(|i| schedule.weights(t).get(i, i) <= 0.0))
            .unwrap_or(1);
        flag(round, "zero weight on the diagonal or an active edge".into(), &mut first);
    }

    let window = (1..=horizon).find(|&b| {
        (0..horizon.div_ceil(b)).all(|k| {
            let lo = k * b + 1;
            let hi = ((k + 1) * b).min(horizon);
            graph::is_connected(m, (lo..=hi).map(|t| schedule.edges(t)))
        })
    });
    if window.is_none() {
        let bad = (1..=horizon)
            .find(|&t| !graph::is_connected(m, (t..=horizon).map(|s| schedule.edges(s))))
            .unwrap_or(1);
        flag(bad, "union graph never becomes connected".into(), &mut first);
    }

    Assumption1Report {
        horizon,
        max_sum_deviation: max_dev,
        zeta,
        window,
        violations,
        first_violation_round: first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::schedule::ScheduleSpec;
    use crate::network::weights::{metropolis_weights, WeightMatrix};

    #[test]
    fn constants_example() {
        let c = ConsensusConstants::new(0.25, 2, 2).unwrap();
        assert!((c.theta - 1.0320).abs() < 1e-4, "{}", c.theta);
        assert!((c.kappa - 0.99216).abs() < 1e-5, "{}", c.kappa);
        assert!(c.theta > 1.0 && c.kappa < 1.0);
    }

    #[test]
    fn product_deviation_examples() {
        let complete = NetworkSchedule::build(&ScheduleSpec::Complete, 2, 0).unwrap();
        assert!(consensus_product_deviation(&complete, 1, 1).abs() < 1e-15);
        let single = NetworkSchedule::build(&ScheduleSpec::Ring, 1, 0).unwrap();
        assert_eq!(consensus_product_deviation(&single, 7, 3), 0.0);

        let ring = NetworkSchedule::build(&ScheduleSpec::Ring, 10, 0).unwrap();
        let report = verify_assumption1(&ring, 200);
        let c = report.constants(10).unwrap();
        assert!(consensus_product_deviation(&ring, 51, 1) <= c.bound(50));
    }

    #[test]
    fn realized_windows() {
        let alt = NetworkSchedule::build(&ScheduleSpec::default(), 30, 1).unwrap();
        let r = verify_assumption1(&alt, 100);
        assert!(r.passed());
        assert_eq!(r.window, Some(2));
        assert!(r.max_sum_deviation <= 1e-12);

        let ring = NetworkSchedule::build(&ScheduleSpec::Ring, 10, 0).unwrap();
        assert_eq!(verify_assumption1(&ring, 100).window, Some(1));

        let ring_edges = crate::network::graph::ring(6);
        let spec = ScheduleSpec::Custom {
            rounds: vec![ring_edges.clone(), ring_edges.clone(), vec![], ring_edges],
        };
        let s = NetworkSchedule::build(&spec, 6, 0).unwrap();
        assert_eq!(verify_assumption1(&s, 40).window, Some(2));
    }

    #[test]
    fn names_the_offending_round() {
        let good = metropolis_weights(3, &crate::network::graph::ring(3));
        let bad = WeightMatrix::from_dense(&[
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.0, 1.0],
        ]);
        let s = NetworkSchedule::from_weights(vec![good.clone(), good, bad]).unwrap();
        let r = verify_assumption1(&s, 10);
        assert!(!r.passed());
        assert_eq!(r.first_violation_round, Some(3));
        match r.into_result() {
            Err(Error::Assumption { round, .. }) => assert_eq!(round, 3),
            other => panic!("{other:?}"),
        }
    }
}
