//! Inexact prox steps: how the optimization error sequence shows up in the
//! per-round diagnostics and in the regret.

use odcmd::algorithms::{run_odcmd, AlgorithmConfig};
use odcmd::geometry::{ConstraintSet, ErrorModel, MirrorMap, Regularizer};
use odcmd::harness::comparator::COMPARATOR_TOL;
use odcmd::harness::{average_regret, solve_comparator};
use odcmd::network::{NetworkSchedule, ScheduleSpec};
use odcmd::problems::generate_regression_stream;

fn main() -> odcmd::Result<()> {
    let (m, d, horizon) = (30, 10, 800);
    let set = ConstraintSet::ball(1.0)?;
    let reg = Regularizer::l1(0.1);
    let map = MirrorMap::euclidean();
    let schedule = NetworkSchedule::build(&ScheduleSpec::default(), m, 1)?;
    let stream = generate_regression_stream(m, d, horizon, 1.0, 5)?;
    let comparator = solve_comparator(&stream, &set, &reg, COMPARATOR_TOL)?;
    let eta = 1.0 / (horizon as f64).sqrt();

    let models = [
        ErrorModel::Exact,
        ErrorModel::Decaying { c_rho: 10.0 },
        ErrorModel::GapBounded { c_rho: 10.0 },
        ErrorModel::Fixed { rho: 0.5 },
    ];
    for model in models {
        let config = AlgorithmConfig::full_information(eta, model);
        let record = run_odcmd(&stream, &schedule, &map, &set, &reg, &config, horizon)?;
        let report = average_regret(&record, &comparator)?;
        let worst = record
            .rounds
            .iter()
            .map(|r| r.max_error / (2.0 * eta * r.rho).sqrt().max(f64::MIN_POSITIVE))
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        println!(
            "{model:?}: max regret {:.4}, worst ||y - y*|| / sqrt(2 eta rho) = {worst:.3}",
            report.max
        );
    }
    Ok(())
}
