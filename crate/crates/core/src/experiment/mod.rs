//! Config-driven experiments: validation, sweeps and plot-ready output.

pub mod config;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::ExperimentConfig;

use crate::algorithms::config::Algorithm;
use crate::algorithms::run::baseline_supports;
use crate::error::{Error, Result};
use crate::geometry::prox::CompositeStep;
use crate::harness::sweep::{expand_cells, sweep, Cell, CellResult};
use crate::network::diagnostics::{verify_assumption1, Assumption1Report};
use crate::network::schedule::NetworkSchedule;

pub const REGRET_FORMAT: &str = "odcmd-regret v1";
pub const CURVE_FORMAT: &str = "odcmd-curve v1";

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ODCMD_OUT_DIR";

pub const PRESET_NAMES: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../../presets/fig2.toml"),
        "fig3" => include_str!("../../presets/fig3.toml"),
        "fig4" => include_str!("../../presets/fig4.toml"),
        "fig5" => include_str!("../../presets/fig5.toml"),
        "fig6" => include_str!("../../presets/fig6.toml"),
        "fig7" => include_str!("../../presets/fig7.toml"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::config(format!("unknown preset '{name}' (available: {})", PRESET_NAMES.join(", ")))
    })?;
    ExperimentConfig::from_toml(text)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}

/// Network report of one cell at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub label: String,
    pub horizon: usize,
    pub assumption: Assumption1Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub cells: Vec<CellCheck>,
    /// Every violated constraint, each prefixed by its cell.
    pub errors: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Config(self.errors))
        }
    }
}

fn check_cell(cell: &Cell, errors: &mut Vec<String>, reports: &mut Vec<CellCheck>) {
    let c = &cell.config;
    let label = cell.label();
    let mut push = |msg: String| errors.push(format!("[{label}] {msg}"));

    if c.horizons.is_empty() {
        push("horizons must list at least one T".into());
    }
    if c.horizons.contains(&0) {
        push("every horizon must be at least 1".into());
    }
    if c.problem.nodes == 0 {
        push("problem.nodes must be at least 1".into());
    }
    if c.problem.dim == 0 {
        push("problem.dim must be at least 1".into());
    }
    for (name, v) in [("problem.l2_weight", c.problem.l2_weight), ("problem.l1_weight", c.problem.l1_weight)] {
        if !(v >= 0.0) || !v.is_finite() {
            push(format!("{name} must be finite and nonnegative, got {v}"));
        }
    }
    if let Some(r) = c.geometry.bound_radius {
        if !(r > 0.0) || !r.is_finite() {
            push(format!("geometry.bound_radius must be positive, got {r}"));
        }
    }
    let map = c.mirror_map().map_err(|e| push(e.to_string())).ok();
    let set = c.constraint_set().map_err(|e| push(e.to_string())).ok();
    if let Err(e) = c.error.validate() {
        push(e.to_string());
    }
    if c.problem.dim == 0 || c.problem.nodes == 0 {
        return;
    }
    let reg = c.regularizer();
    if let (Some(map), Some(set)) = (&map, &set) {
        let d = c.problem.dim;
        if c.algorithm == Algorithm::SubgradientBaseline {
            if !baseline_supports(map) {
                push("the subgradient baseline needs the euclidean map".into());
            }
        } else {
            let x = vec![0.0; d];
            let probe = CompositeStep {
                map,
                set,
                reg: &reg,
                x: &x,
                g: &x,
                eta: 1.0,
            };
            if !probe.has_closed_form() && !c.run.numeric_fallback {
                push(format!(
                    "unsupported pairing: {:?} map with {:?} set has no closed-form prox (enable run.numeric_fallback)",
                    c.geometry.map, c.geometry.set
                ));
            }
            if let Err(e) = set.argmin_omega(map, d) {
                push(format!("cannot initialize: {e}"));
            }
        }
        for &t in c.horizons.iter().filter(|&&t| t > 0) {
            match c.algorithm_config(t) {
                Err(e) => push(format!("T={t}: {e}")),
                Ok(a) => {
                    if let Err(e) = a.validate() {
                        push(format!("T={t}: {e}"));
                    }
                    if c.algorithm == Algorithm::Banodcmd {
                        if let Err(e) = a.check_exploration(set.inner_radius()) {
                            push(format!("T={t}: {e}"));
                        }
                    }
                }
            }
        }
    }

    match NetworkSchedule::build(&c.network.schedule_spec(), c.problem.nodes, c.network_seed()) {
        Err(e) => push(format!("network: {e}")),
        Ok(schedule) => {
            for &t in c.horizons.iter().filter(|&&t| t > 0) {
                let report = verify_assumption1(&schedule, t);
                for v in &report.violations {
                    push(format!("T={t}: network assumption violated: {v}"));
                }
                reports.push(CellCheck {
                    label: cell.label(),
                    horizon: t,
                    assumption: report,
                });
            }
        }
    }
}

/// Validates every cell without running the optimizer.
pub fn check(config: &ExperimentConfig) -> Result<CheckReport> {
    let cells = expand_cells(config)?;
    let mut errors = Vec::new();
    let mut reports = Vec::new();
    for cell in &cells {
        check_cell(cell, &mut errors, &mut reports);
    }
    let mut seen = BTreeSet::new();
    errors.retain(|e| seen.insert(e.clone()));
    Ok(CheckReport { cells: reports, errors })
}

/// Results of a full experiment and the files written for it.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub results: Vec<CellResult>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutput {
    /// Results of one curve (cell), ordered by horizon.
    pub fn curve(&self, cell: usize) -> Vec<&CellResult> {
        let mut v: Vec<&CellResult> = self.results.iter().filter(|r| r.cell == cell).collect();
        v.sort_by_key(|r| r.horizon);
        v
    }

    /// Results of the cell whose label contains `needle`, ordered by horizon.
    pub fn curve_labelled(&self, needle: &str) -> Vec<&CellResult> {
        let mut v: Vec<&CellResult> = self.results.iter().filter(|r| r.label.contains(needle)).collect();
        v.sort_by_key(|r| r.horizon);
        v
    }
}

/// `name,T,node,avg_regret` rows with one column per swept parameter.
pub fn write_regret_csv<W: Write>(config: &ExperimentConfig, results: &[CellResult], mut out: W) -> Result<()> {
    writeln!(out, "# {REGRET_FORMAT} experiment={} seed={}", config.name, config.seed)?;
    let mut w = csv::Writer::from_writer(out);
    let paths: Vec<String> = config
        .sweep
        .as_ref()
        .map(|s| s.axes.iter().map(|a| a.path.clone()).collect())
        .unwrap_or_default();
    let mut header = paths.clone();
    header.extend(["T", "node", "avg_regret"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for r in results {
        for (i, v) in r.report.per_node.iter().enumerate() {
            let mut row: Vec<String> = r.params.iter().map(|p| p.value.clone()).collect();
            row.extend([r.horizon.to_string(), i.to_string(), v.to_string()]);
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `T,max_regret,min_regret,bound` for one curve.
pub fn write_curve_csv<W: Write>(config: &ExperimentConfig, curve: &[&CellResult], mut out: W) -> Result<()> {
    let label = curve.first().map_or("", |r| r.label.as_str());
    writeln!(out, "# {CURVE_FORMAT} experiment={} curve={label} seed={}", config.name, config.seed)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "max_regret", "min_regret", "bound"]).map_err(csv_error)?;
    for r in curve {
        let bound = r.bound.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([r.horizon.to_string(), r.report.max.to_string(), r.report.min.to_string(), bound])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Serialize)]
struct SummaryCell<'a> {
    label: &'a str,
    params: &'a [crate::harness::sweep::Param],
    algorithm: &'a str,
    horizon: usize,
    max_regret: f64,
    min_regret: f64,
    comparator_objective: f64,
    comparator_gap: f64,
    constants: &'a Option<crate::harness::sweep::RealizedConstants>,
    bound: Option<f64>,
    bound_note: &'a Option<String>,
    disagreement_total: f64,
    disagreement_bound: Option<f64>,
    max_step: f64,
    step_bound: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    format: &'a str,
    experiment: &'a str,
    seed: u64,
    cells: Vec<SummaryCell<'a>>,
}

pub fn summary_json(config: &ExperimentConfig, results: &[CellResult]) -> Result<String> {
    let cells = results
        .iter()
        .map(|r| SummaryCell {
            label: &r.label,
            params: &r.params,
            algorithm: r.algorithm.name(),
            horizon: r.horizon,
            max_regret: r.report.max,
            min_regret: r.report.min,
            comparator_objective: r.report.comparator_objective,
            comparator_gap: r.report.comparator_gap,
            constants: &r.constants,
            bound: r.bound,
            bound_note: &r.bound_note,
            disagreement_total: r.disagreement_total,
            disagreement_bound: r.disagreement_bound,
            max_step: r.max_step,
            step_bound: r.step_bound,
        })
        .collect();
    Ok(serde_json::to_string_pretty(&Summary {
        format: "odcmd-summary v1",
        experiment: &config.name,
        seed: config.seed,
        cells,
    })?)
}

/// Writes `bytes` to `path` through a temporary file so readers never see
/// a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Validates, runs every cell and writes
/// `regret.csv`, `summary.json`, `curves/<label>.csv`, `network.json` and,
/// with `output.records`, `records/<label>_T<T>.csv` under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutput> {
    check(config)?.into_result()?;
    let results = sweep(config, config.output.records)?;
    let mut files = Vec::new();
    let mut emit = |name: PathBuf, bytes: Vec<u8>| -> Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, &bytes)?;
        files.push(path);
        Ok(())
    };

    let mut buf = Vec::new();
    write_regret_csv(config, &results, &mut buf)?;
    emit("regret.csv".into(), buf)?;
    emit("summary.json".into(), summary_json(config, &results)?.into_bytes())?;

    let cells: BTreeSet<usize> = results.iter().map(|r| r.cell).collect();
    for k in cells {
        let mut curve: Vec<&CellResult> = results.iter().filter(|r| r.cell == k).collect();
        curve.sort_by_key(|r| r.horizon);
        let mut buf = Vec::new();
        write_curve_csv(config, &curve, &mut buf)?;
        emit(PathBuf::from("curves").join(format!("{}.csv", curve[0].label)), buf)?;
    }

    let base = &expand_cells(config)?[0].config;
    let schedule = NetworkSchedule::build(&base.network.schedule_spec(), base.problem.nodes, base.network_seed())?;
    emit("network.json".into(), schedule.edge_list_json()?.into_bytes())?;

    for r in &results {
        if let Some(rec) = &r.record {
            let mut buf = Vec::new();
            rec.write_csv(&mut buf)?;
            emit(PathBuf::from("records").join(format!("{}_T{}.csv", r.label, r.horizon)), buf)?;
        }
    }
    Ok(ExperimentOutput { results, files })
}
