//! BanODCMD: two loss evaluations per node and round instead of gradients.

use odcmd::algorithms::{run_banodcmd, AlgorithmConfig, BanditSchedule};
use odcmd::geometry::{ConstraintSet, ErrorModel, MirrorMap, Regularizer};
use odcmd::harness::comparator::COMPARATOR_TOL;
use odcmd::harness::{average_regret, solve_comparator};
use odcmd::network::{NetworkSchedule, ScheduleSpec};
use odcmd::problems::generate_regression_stream;

fn main() -> odcmd::Result<()> {
    let (m, d, horizon) = (20, 10, 1600);
    let set = ConstraintSet::ball(1.0)?;
    let reg = Regularizer::l1(0.1);
    let map = MirrorMap::euclidean();
    let schedule = NetworkSchedule::build(&ScheduleSpec::Ring, m, 0)?;
    let stream = generate_regression_stream(m, d, horizon, 1.0, 3)?;

    let plan = BanditSchedule::standard(horizon, d, 1.0, 1.0, set.inner_radius())?;
    let config = AlgorithmConfig::bandit(plan, ErrorModel::Exact);
    let record = run_banodcmd(&stream, &schedule, &map, &set, &reg, &config, horizon, 99)?;
    let report = average_regret(&record, &solve_comparator(&stream, &set, &reg, COMPARATOR_TOL)?)?;

    println!("eta = {:.3e}, delta = {:.3e}, xi = {:.3e}", plan.eta, plan.delta, plan.xi);
    println!("{} oracle queries, {} infeasible", record.queries, record.query_violations);
    let largest = record.rounds.iter().map(|r| r.max_gradient).fold(0.0, f64::max);
    println!("largest gradient estimate norm {largest:.3}");
    println!("average regret: max {:.4}, min {:.4}", report.max, report.min);
    Ok(())
}
