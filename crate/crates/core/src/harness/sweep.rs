//! Parameter sweeps over an [`ExperimentConfig`]: one seeded run per
//! (cell, horizon), evaluated against its own comparator and bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::bounds::{disagreement_bound, step_bound, theorem_bounds, BoundConstants, Feedback};
use crate::algorithms::config::Algorithm;
use crate::algorithms::run::{run_banodcmd, run_odcmd, run_subgradient_baseline};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, SweepMode};
use crate::harness::comparator::{solve_comparator, COMPARATOR_TOL};
use crate::harness::record::RunRecord;
use crate::harness::regret::{average_regret, RegretReport};
use crate::network::diagnostics::verify_assumption1;
use crate::network::schedule::NetworkSchedule;
use crate::problems::bounds::lipschitz_bounds;
use crate::problems::stream::{generate_regression_stream, LossStream};

/// One assignment of swept parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub path: String,
    pub value: String,
}

/// A fully resolved configuration produced by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub params: Vec<Param>,
    pub config: ExperimentConfig,
}

impl Cell {
    /// File-name friendly identifier, e.g. `algorithm-odcmd`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return "base".into();
        }
        let raw = self
            .params
            .iter()
            .map(|p| format!("{}-{}", p.path.rsplit('.').next().unwrap_or(&p.path), p.value))
            .collect::<Vec<_>>()
            .join("_");
        raw.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '-' })
            .collect()
    }
}

fn display_value(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Table(t) => t
            .iter()
            .map(|(k, v)| format!("{k}={}", display_value(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let invalid = |why: &str| Error::config(format!("invalid parameter path '{path}': {why}"));
    if path == "horizons" || path.starts_with("sweep") {
        return Err(invalid("sweep the horizon through `horizons`"));
    }
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(invalid("empty segment"));
    }
    let mut node = root;
    for (depth, key) in keys.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| invalid(&format!("'{}' is not a table", keys[..depth].join("."))))?;
        if depth + 1 == keys.len() {
            table.insert((*key).to_string(), value);
            return Ok(());
        }
        node = table
            .get_mut(*key)
            .ok_or_else(|| invalid(&format!("no section '{}'", keys[..=depth].join("."))))?;
    }
    unreachable!()
}

/// Expands the sweep block into resolved cells (a single cell without one).
pub fn expand_cells(config: &ExperimentConfig) -> Result<Vec<Cell>> {
    let mut base = config.clone();
    let sweep = base.sweep.take();
    let Some(sweep) = sweep else {
        return Ok(vec![Cell {
            index: 0,
            params: Vec::new(),
            config: base,
        }]);
    };
    let mut errs = Vec::new();
    for axis in &sweep.axes {
        if axis.values.is_empty() {
            errs.push(format!("sweep axis '{}' has no values", axis.path));
        }
    }
    if sweep.mode == SweepMode::Zip {
        let lens: Vec<usize> = sweep.axes.iter().map(|a| a.values.len()).collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            errs.push(format!("zip sweep needs equally long axes, got lengths {lens:?}"));
        }
    }
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }

    let combos: Vec<Vec<usize>> = match sweep.mode {
        SweepMode::Zip => {
            let n = sweep.axes.first().map_or(1, |a| a.values.len());
            (0..n).map(|k| vec![k; sweep.axes.len()]).collect()
        }
        SweepMode::Cartesian => sweep.axes.iter().fold(vec![Vec::new()], |acc, axis| {
            acc.into_iter()
                .flat_map(|prefix| {
                    (0..axis.values.len()).map(move |k| {
                        let mut next = prefix.clone();
                        next.push(k);
                        next
                    })
                })
                .collect()
        }),
    };

    let template = toml::Value::try_from(&base)
        .map_err(|e| Error::config(format!("config serialization: {e}")))?;
    combos
        .into_iter()
        .enumerate()
        .map(|(index, combo)| {
            let mut value = template.clone();
            let mut params = Vec::new();
            for (axis, &k) in sweep.axes.iter().zip(&combo) {
                let v = axis.values[k].clone();
                params.push(Param {
                    path: axis.path.clone(),
                    value: display_value(&v),
                });
                set_path(&mut value, &axis.path, v)?;
            }
            let config: ExperimentConfig = value.try_into().map_err(|e: toml::de::Error| {
                let paths: Vec<&str> = sweep.axes.iter().map(|a| a.path.as_str()).collect();
                Error::config(format!("invalid parameter path or value in {paths:?}: {}", e.message()))
            })?;
            Ok(Cell { index, params, config })
        })
        .collect()
}

/// Constants realized by one run, as entered into the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedConstants {
    pub eta: f64,
    pub delta: f64,
    pub xi: f64,
    pub g_loss: f64,
    pub g_reg: f64,
    pub sigma: f64,
    pub g_omega: f64,
    pub diameter: f64,
    pub zeta: f64,
    pub window: usize,
    pub theta: f64,
    pub kappa: f64,
    pub p_bar: f64,
    pub p_star: f64,
    pub outer_radius: f64,
    pub inner_radius: f64,
}

/// Everything measured for one (cell, horizon) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: usize,
    pub label: String,
    pub params: Vec<Param>,
    pub algorithm: Algorithm,
    pub horizon: usize,
    pub report: RegretReport,
    pub constants: Option<RealizedConstants>,
    /// Regret bound with realized constants and realized prox gaps.
    pub bound: Option<f64>,
    /// Why `bound` (or the constants) could not be evaluated.
    pub bound_note: Option<String>,
    /// `sum_t max_j sum_i ||x_{i,t} - x_{j,t}||`
    pub disagreement_total: f64,
    pub disagreement_bound: Option<f64>,
    /// Largest exact prox step over the run and its per-round bound.
    pub max_step: f64,
    pub step_bound: Option<f64>,
    #[serde(skip)]
    pub record: Option<RunRecord>,
}

/// The loss stream a cell uses, generated for `horizon` rounds.
pub fn cell_stream(config: &ExperimentConfig, horizon: usize) -> Result<LossStream> {
    generate_regression_stream(
        config.problem.nodes,
        config.problem.dim,
        horizon,
        config.problem.l2_weight,
        config.data_seed(),
    )
}

/// Runs one configuration for horizon `stream.horizon()`.
pub fn run_cell(cell: &Cell, stream: &LossStream) -> Result<CellResult> {
    let config = &cell.config;
    let horizon = stream.horizon();
    let map = config.mirror_map()?;
    let set = config.constraint_set()?;
    let reg = config.regularizer();
    let algo = config.algorithm_config(horizon)?;
    let schedule = NetworkSchedule::build(&config.network.schedule_spec(), config.problem.nodes, config.network_seed())?;

    let record = match config.algorithm {
        Algorithm::Odcmd => run_odcmd(stream, &schedule, &map, &set, &reg, &algo, horizon)?,
        Algorithm::Banodcmd => run_banodcmd(stream, &schedule, &map, &set, &reg, &algo, horizon, config.direction_seed())?,
        Algorithm::SubgradientBaseline => run_subgradient_baseline(stream, &schedule, &set, &reg, &algo, horizon)?,
    };
    let comparator = solve_comparator(stream, &set, &reg, COMPARATOR_TOL)?;
    let report = average_regret(&record, &comparator)?;

    let d = config.problem.dim;
    let m = config.problem.nodes;
    let norm = map.norm();
    let dual = map.dual_norm();
    let p_bar = norm.l2_equivalence(d);
    let p_star = dual.l2_equivalence(d);
    let bandit = config.algorithm == Algorithm::Banodcmd;
    let disagreement_total: f64 = record.pairwise_disagreement.iter().sum();
    let max_step = record.rounds.iter().map(|r| r.max_step).fold(0.0, f64::max);

    let mut result = CellResult {
        cell: cell.index,
        label: cell.label(),
        params: cell.params.clone(),
        algorithm: config.algorithm,
        horizon,
        report,
        constants: None,
        bound: None,
        bound_note: None,
        disagreement_total,
        disagreement_bound: None,
        max_step,
        step_bound: None,
        record: None,
    };

    let evaluated = (|| -> Result<(RealizedConstants, BoundConstants)> {
        let outer = match (set.is_bounded(), config.geometry.bound_radius) {
            (true, _) => set.outer_radius(),
            (false, Some(r)) => r,
            (false, None) => {
                return Err(Error::config("bounds on an unbounded set need geometry.bound_radius"))
            }
        };
        let radius = (!set.is_bounded()).then_some(outer);
        let (g_loss, g_reg) = lipschitz_bounds(stream, &set, &reg, dual, radius)?;
        let diameter = if set.is_bounded() {
            set.diameter(norm, d)
        } else {
            2.0 * outer * p_bar
        };
        let assumption = verify_assumption1(&schedule, horizon).into_result()?;
        let window = assumption.window.unwrap_or(1);
        let cc = assumption.constants(m)?;
        let realized = RealizedConstants {
            eta: algo.eta,
            delta: algo.delta,
            xi: algo.xi,
            g_loss,
            g_reg,
            sigma: map.sigma(),
            g_omega: map.g_omega(),
            diameter,
            zeta: assumption.zeta,
            window,
            theta: cc.theta,
            kappa: cc.kappa,
            p_bar,
            p_star,
            outer_radius: outer,
            inner_radius: set.inner_radius(),
        };
        let anchor: Vec<f64> = if bandit {
            comparator.x.iter().map(|v| (1.0 - algo.xi) * v).collect()
        } else {
            comparator.x.clone()
        };
        let initial_divergence_sum = record
            .initial
            .iter()
            .map(|x1| map.bregman(&anchor, x1))
            .sum::<Result<f64>>()?;
        let bc = BoundConstants {
            g_loss,
            g_reg,
            sigma: realized.sigma,
            g_omega: realized.g_omega,
            diameter,
            theta: cc.theta,
            kappa: cc.kappa,
            nodes: m,
            dim: d,
            p_bar,
            p_star,
            outer_radius: outer,
            inner_radius: realized.inner_radius,
            initial_norm_sum: record.initial.iter().map(|x| norm.eval(x)).sum(),
            initial_divergence_sum,
        };
        Ok((realized, bc))
    })();

    match evaluated {
        Err(e) => result.bound_note = Some(e.to_string()),
        Ok((realized, bc)) => {
            result.constants = Some(realized);
            // realized objective gaps play the role of rho_t
            let rhos: Vec<f64> = record.rounds.iter().map(|r| r.max_gap).collect();
            let gradient_bound = if bandit {
                p_bar * p_star * d as f64 * bc.g_loss
            } else {
                bc.g_loss
            };
            result.step_bound = Some(step_bound(gradient_bound, bc.g_reg, bc.sigma, algo.eta));
            if config.algorithm == Algorithm::SubgradientBaseline {
                result.bound_note = Some("no regret bound for the subgradient baseline".into());
            } else {
                let feedback = if bandit {
                    Feedback::Bandit {
                        delta: algo.delta,
                        xi: algo.xi,
                    }
                } else {
                    Feedback::FullInformation
                };
                match theorem_bounds(&bc, feedback, algo.eta, &rhos) {
                    Ok(b) => result.bound = Some(b),
                    Err(e) => result.bound_note = Some(e.to_string()),
                }
                if !bandit {
                    result.disagreement_bound = disagreement_bound(&bc, algo.eta, &rhos).ok();
                }
            }
        }
    }
    result.record = Some(record);
    Ok(result)
}

/// Runs every (cell, horizon) pair in parallel, in cell-major order.
///
/// Each cell's stream is generated once for its largest horizon; shorter
/// horizons use its prefix, which equals a fresh stream of that length.
pub fn sweep(config: &ExperimentConfig, keep_records: bool) -> Result<Vec<CellResult>> {
    let cells = expand_cells(config)?;
    let streams: Vec<LossStream> = cells
        .par_iter()
        .map(|c| {
            let t_max = c.config.horizons.iter().copied().max().unwrap_or(1);
            cell_stream(&c.config, t_max)
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.config.horizons.iter().map(move |&t| (k, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, t)| {
            let stream = streams[k].truncated(t)?;
            let mut r = run_cell(&cells[k], &stream)?;
            if !keep_records {
                r.record = None;
            } else if let Some(rec) = r.record.as_mut() {
                rec.iterates = None;
            }
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
algorithm = "odcmd"
horizons = [20]
[problem]
nodes = 3
dim = 2
[network]
kind = "complete"
"#,
        )
        .unwrap()
    }

    #[test]
    fn cartesian_and_zip_counts() {
        let mut c = base();
        c.sweep = Some(
            toml::from_str(
                r#"
mode = "cartesian"
[[axes]]
path = "problem.dim"
values = [2, 3, 4]
[[axes]]
path = "error"
values = [{ model = "exact" }, { model = "fixed", rho = 0.5 }]
"#,
            )
            .unwrap(),
        );
        let cells = expand_cells(&c).unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[5].config.problem.dim, 4);
        assert_eq!(cells[5].params[1].value, "model=fixed rho=0.5");
        assert!(cells.iter().all(|c| c.config.sweep.is_none()));

        c.sweep.as_mut().unwrap().mode = SweepMode::Zip;
        let err = expand_cells(&c).unwrap_err().to_string();
        assert!(err.contains("equally long"), "{err}");
        c.sweep.as_mut().unwrap().axes[0].values.pop();
        assert_eq!(expand_cells(&c).unwrap().len(), 2);
    }

    #[test]
    fn invalid_paths_rejected() {
        for path in ["problem.dimm", "nosuch.key", "horizons", "problem.nodes.x", "a..b"] {
            let mut c = base();
            c.sweep = Some(crate::experiment::config::SweepSpec {
                mode: SweepMode::Cartesian,
                axes: vec![crate::experiment::config::SweepAxis {
                    path: path.into(),
                    values: vec![toml::Value::Integer(2)],
                }],
            });
            let err = expand_cells(&c).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{path}");
        }
    }

    #[test]
    fn sweep_is_reproducible() {
        let mut c = base();
        c.horizons = vec![10, 30];
        c.sweep = Some(toml::from_str("[[axes]]\npath = \"error.model\"\nvalues = [\"exact\"]\n").unwrap());
        let a = sweep(&c, true).unwrap();
        let b = sweep(&c, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|r| r.bound.is_some() && r.report.max <= r.bound.unwrap()));
    }
}
