use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::algorithms::config::{Algorithm, AlgorithmConfig};
use crate::error::{Error, Result};
use crate::geometry::mirror::{MirrorKind, MirrorMap};
use crate::geometry::prox::{perturb, prox_approx, CompositeStep};
use crate::geometry::regularizer::Regularizer;
use crate::geometry::set::ConstraintSet;
use crate::harness::record::{RoundDiagnostics, RunRecord};
use crate::linalg::{norm2, sign, sub, Norm};
use crate::network::schedule::NetworkSchedule;
use crate::problems::oracle::TwoPointOracle;
use crate::problems::stream::LossStream;
use crate::rng::{substream, Domain};

/// Uniform direction on the unit sphere (normalized Gaussian).
pub fn unit_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm2(&v);
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// The exploration direction of node `i` at round `t`.
pub fn exploration_direction(seed: u64, i: usize, t: usize, d: usize) -> Vec<f64> {
    unit_vector(&mut substream(seed, Domain::Direction, i as u64, t as u64), d)
}

/// `(d / 2 delta) (l_plus - l_minus) u`
pub fn two_point_estimate(d: usize, delta: f64, plus: f64, minus: f64, u: &[f64]) -> Vec<f64> {
    let c = d as f64 / (2.0 * delta) * (plus - minus);
    u.iter().map(|v| c * v).collect()
}

struct NodeOutput {
    y: Vec<f64>,
    exact: Vec<f64>,
    gap: f64,
    gradient_norm: f64,
}

struct Setup<'a> {
    algorithm: Algorithm,
    config: &'a AlgorithmConfig,
    seed: u64,
    stream: &'a LossStream,
    schedule: &'a NetworkSchedule,
    reg: &'a Regularizer,
    norm: Norm,
    /// Set every iterate must stay in.
    state_set: &'a ConstraintSet,
    horizon: usize,
}

fn check_dimensions(stream: &LossStream, schedule: &NetworkSchedule, horizon: usize) -> Result<()> {
    if stream.nodes() != schedule.nodes() {
        return Err(Error::invalid(format!(
            "stream has {} nodes but the network has {}",
            stream.nodes(),
            schedule.nodes()
        )));
    }
    if horizon == 0 || horizon > stream.horizon() {
        return Err(Error::invalid(format!(
            "horizon {horizon} outside 1..={}",
            stream.horizon()
        )));
    }
    Ok(())
}

fn drive<F>(setup: Setup<'_>, x0: Vec<f64>, step: F) -> Result<RunRecord>
where
    F: Fn(usize, usize, &[f64]) -> Result<NodeOutput> + Sync,
{
    let Setup {
        algorithm,
        config,
        seed,
        stream,
        schedule,
        reg,
        norm,
        state_set,
        horizon,
    } = setup;
    let (m, d) = (stream.nodes(), stream.dim());
    if x0.len() != d {
        return Err(Error::invalid("initial point has the wrong dimension"));
    }
    let keep = RunRecord::keeps_iterates(horizon, m, d);
    let mut x: Vec<Vec<f64>> = vec![x0; m];
    let mut record = RunRecord {
        algorithm,
        config: config.clone(),
        seed,
        nodes: m,
        dim: d,
        horizon,
        initial: x.clone(),
        iterates: keep.then(|| Vec::with_capacity(horizon)),
        network_loss: Vec::with_capacity(horizon),
        regularizer: Vec::with_capacity(horizon),
        disagreement: Vec::with_capacity(horizon),
        pairwise_disagreement: Vec::with_capacity(horizon),
        rounds: Vec::with_capacity(horizon),
        queries: 0,
        query_violations: 0,
    };

    for t in 1..=horizon {
        let mean: Vec<f64> = (0..d).map(|s| x.iter().map(|xi| xi[s]).sum::<f64>() / m as f64).collect();
        record.network_loss.push(x.iter().map(|xi| stream.network_value(t, xi)).collect());
        record.regularizer.push(x.iter().map(|xi| reg.value(xi)).collect());
        record.disagreement.push(x.iter().map(|xi| norm2(&sub(xi, &mean))).collect());
        record.pairwise_disagreement.push(
            (0..m)
                .map(|j| x.iter().map(|xi| norm.eval(&sub(xi, &x[j]))).sum::<f64>())
                .fold(0.0, f64::max),
        );
        if let Some(it) = record.iterates.as_mut() {
            it.push(x.clone());
        }

        let outputs: Vec<NodeOutput> = (0..m)
            .into_par_iter()
            .map(|i| step(i, t, &x[i]))
            .collect::<Result<_>>()?;

        let mut diag = RoundDiagnostics {
            rho: config.error_model.rho(t, horizon),
            ..Default::default()
        };
        for (o, xi) in outputs.iter().zip(&x) {
            diag.max_step = diag.max_step.max(norm.eval(&sub(&o.exact, xi)));
            diag.max_error = diag.max_error.max(norm.eval(&sub(&o.y, &o.exact)));
            diag.max_gap = diag.max_gap.max(o.gap);
            diag.max_gradient = diag.max_gradient.max(o.gradient_norm);
        }
        let y: Vec<Vec<f64>> = outputs.into_iter().map(|o| o.y).collect();
        let next = schedule.weights(t).mix(&y);
        for s in 0..d {
            let a: f64 = y.iter().map(|v| v[s]).sum();
            let b: f64 = next.iter().map(|v| v[s]).sum();
            diag.average_drift = diag.average_drift.max((a - b).abs());
        }
        for (i, xi) in next.iter().enumerate() {
            if !state_set.contains(xi) {
                return Err(Error::Infeasible {
                    round: t,
                    node: i,
                    detail: "post-consensus iterate left the feasible set".into(),
                });
            }
        }
        record.rounds.push(diag);
        x = next;
    }
    Ok(record)
}

/// Full-information composite mirror descent.
pub fn run_odcmd(
    stream: &LossStream,
    schedule: &NetworkSchedule,
    map: &MirrorMap,
    set: &ConstraintSet,
    reg: &Regularizer,
    config: &AlgorithmConfig,
    horizon: usize,
) -> Result<RunRecord> {
    config.validate()?;
    check_dimensions(stream, schedule, horizon)?;
    let d = stream.dim();
    let x0 = set.argmin_omega(map, d)?;
    let dual = map.dual_norm();
    let setup = Setup {
        algorithm: Algorithm::Odcmd,
        config,
        seed: 0,
        stream,
        schedule,
        reg,
        norm: map.norm(),
        state_set: set,
        horizon,
    };
    drive(setup, x0, |i, t, x| {
        let g = stream.gradient(i, t, x);
        let step = CompositeStep {
            map,
            set,
            reg,
            x,
            g: &g,
            eta: config.eta,
        };
        let a = prox_approx(&step, &config.error_model, t, horizon, config.numeric_fallback)?;
        Ok(NodeOutput {
            y: a.point,
            exact: a.exact,
            gap: a.gap,
            gradient_norm: dual.eval(&g),
        })
    })
}

/// Two-point bandit variant: iterates live in `(1 - xi) K`, gradients are
/// estimated from two loss values per node and round.
#[allow(clippy::too_many_arguments)]
pub fn run_banodcmd(
    stream: &LossStream,
    schedule: &NetworkSchedule,
    map: &MirrorMap,
    set: &ConstraintSet,
    reg: &Regularizer,
    config: &AlgorithmConfig,
    horizon: usize,
    seed: u64,
) -> Result<RunRecord> {
    config.validate()?;
    check_dimensions(stream, schedule, horizon)?;
    config.check_exploration(set.inner_radius())?;
    let d = stream.dim();
    let shrunk = set.shrunk(config.xi)?;
    let x0 = shrunk.argmin_omega(map, d)?;
    let dual = map.dual_norm();
    let oracle = TwoPointOracle::new(stream, set, config.feasibility);
    let setup = Setup {
        algorithm: Algorithm::Banodcmd,
        config,
        seed,
        stream,
        schedule,
        reg,
        norm: map.norm(),
        state_set: &shrunk,
        horizon,
    };
    let mut record = drive(setup, x0, |i, t, x| {
        let u = exploration_direction(seed, i, t, d);
        let (plus, minus) = oracle.query(i, t, x, config.delta, &u)?;
        let g = two_point_estimate(d, config.delta, plus, minus, &u);
        let step = CompositeStep {
            map,
            set: &shrunk,
            reg,
            x,
            g: &g,
            eta: config.eta,
        };
        let a = prox_approx(&step, &config.error_model, t, horizon, config.numeric_fallback)?;
        Ok(NodeOutput {
            y: a.point,
            exact: a.exact,
            gap: a.gap,
            gradient_norm: dual.eval(&g),
        })
    })?;
    record.queries = oracle.query_count();
    record.query_violations = oracle.violation_count();
    Ok(record)
}

/// Distributed projected subgradient method on `l + r` with Euclidean
/// geometry; `|.|` at zero uses `config.tie_value`.
pub fn run_subgradient_baseline(
    stream: &LossStream,
    schedule: &NetworkSchedule,
    set: &ConstraintSet,
    reg: &Regularizer,
    config: &AlgorithmConfig,
    horizon: usize,
) -> Result<RunRecord> {
    config.validate()?;
    check_dimensions(stream, schedule, horizon)?;
    let map = MirrorMap::euclidean();
    let x0 = set.argmin_omega(&map, stream.dim())?;
    let (a, b, c) = (reg.l2_weight(), reg.l1_weight(), config.tie_value);
    let setup = Setup {
        algorithm: Algorithm::SubgradientBaseline,
        config,
        seed: 0,
        stream,
        schedule,
        reg,
        norm: Norm::L2,
        state_set: set,
        horizon,
    };
    drive(setup, x0, |i, t, x| {
        let g = stream.gradient(i, t, x);
        let moved: Vec<f64> = x
            .iter()
            .zip(&g)
            .map(|(&xs, gs)| {
                let tie = if xs == 0.0 { c } else { sign(xs) };
                xs - config.eta * (gs + a * xs + b * tie)
            })
            .collect();
        let exact = set.project(&moved);
        let y = perturb(set, &exact, config.error_model.rho(t, horizon));
        Ok(NodeOutput {
            y,
            exact,
            gap: 0.0,
            gradient_norm: norm2(&g),
        })
    })
}

/// Whether the baseline applies to this geometry.
pub fn baseline_supports(map: &MirrorMap) -> bool {
    matches!(map.kind, MirrorKind::Euclidean)
}
