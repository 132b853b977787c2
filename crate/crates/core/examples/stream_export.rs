//! Columnar export of a loss stream and of a run's per-round record.

use odcmd::algorithms::{run_odcmd, AlgorithmConfig};
use odcmd::geometry::{ConstraintSet, ErrorModel, MirrorMap, Regularizer};
use odcmd::network::{NetworkSchedule, ScheduleSpec};
use odcmd::problems::{generate_regression_stream, read_stream, write_stream};

fn main() -> odcmd::Result<()> {
    let stream = generate_regression_stream(3, 2, 4, 1.0, 8)?;
    let mut csv = Vec::new();
    write_stream(&stream, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    assert_eq!(read_stream(csv.as_slice())?, stream);

    let schedule = NetworkSchedule::build(&ScheduleSpec::Complete, 3, 0)?;
    let config = AlgorithmConfig::full_information(0.5, ErrorModel::Exact);
    let set = ConstraintSet::ball(1.0)?;
    let record = run_odcmd(&stream, &schedule, &MirrorMap::euclidean(), &set, &Regularizer::l1(0.1), &config, 4)?;
    record.write_csv(std::io::stdout().lock())?;
    Ok(())
}
