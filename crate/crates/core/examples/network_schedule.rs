//! Time-varying networks: weights, the connectivity report and the
//! contraction of consensus products.

use odcmd::network::{deviation_profile, verify_assumption1, NetworkSchedule, ScheduleSpec};

fn main() -> odcmd::Result<()> {
    let m = 30;
    let schedule = NetworkSchedule::build(&ScheduleSpec::default(), m, 7)?;
    let report = verify_assumption1(&schedule, 200).into_result()?;
    let constants = report.constants(m)?;
    println!(
        "alternating halves, m = {m}: zeta = {:.4}, B = {:?}, theta = {:.4}, kappa = {:.8}",
        report.zeta, report.window, constants.theta, constants.kappa
    );

    let profile = deviation_profile(&schedule, 1, 200);
    for gap in [0, 10, 50, 100, 199] {
        println!(
            "  t - tau = {gap:>3}: max |W(t:1) - 1/m| = {:.3e}  bound {:.3e}",
            profile[gap],
            constants.bound(gap)
        );
    }

    let ring = NetworkSchedule::build(&ScheduleSpec::Ring, 6, 0)?;
    println!("ring edge list:\n{}", ring.edge_list_json()?);
    Ok(())
}
