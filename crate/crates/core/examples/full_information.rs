//! ODCMD with full gradient feedback against the subgradient baseline.

use odcmd::algorithms::{run_odcmd, run_subgradient_baseline, AlgorithmConfig};
use odcmd::geometry::{ConstraintSet, ErrorModel, MirrorMap, Regularizer};
use odcmd::harness::comparator::COMPARATOR_TOL;
use odcmd::harness::{average_regret, solve_comparator};
use odcmd::network::{NetworkSchedule, ScheduleSpec};
use odcmd::problems::generate_regression_stream;

fn main() -> odcmd::Result<()> {
    let (m, d) = (30, 10);
    let set = ConstraintSet::ball(1.0)?;
    let reg = Regularizer::l1(0.1);
    let schedule = NetworkSchedule::build(&ScheduleSpec::default(), m, 11)?;

    for horizon in [100, 400, 1600] {
        let stream = generate_regression_stream(m, d, horizon, 1.0, 42)?;
        let config = AlgorithmConfig::full_information(1.0 / (horizon as f64).sqrt(), ErrorModel::Exact);
        let comparator = solve_comparator(&stream, &set, &reg, COMPARATOR_TOL)?;

        let ours = run_odcmd(&stream, &schedule, &MirrorMap::euclidean(), &set, &reg, &config, horizon)?;
        let base = run_subgradient_baseline(&stream, &schedule, &set, &reg, &config, horizon)?;
        let a = average_regret(&ours, &comparator)?;
        let b = average_regret(&base, &comparator)?;
        println!(
            "T = {horizon:>4}: odcmd max {:.4} min {:.4} | subgradient max {:.4} min {:.4}",
            a.max, a.min, b.max, b.min
        );
    }
    Ok(())
}
