//! Closed-form composite prox steps for each mirror map, checked against
//! the numeric solver.

use odcmd::geometry::prox::DEFAULT_TOL;
use odcmd::geometry::{prox_exact, prox_numeric, CompositeStep, ConstraintSet, MirrorMap, Regularizer};

fn main() -> odcmd::Result<()> {
    let cases = [
        ("euclidean / ball", MirrorMap::euclidean(), ConstraintSet::ball(1.0)?, vec![0.3, -0.2, 0.1]),
        ("entropic / simplex", MirrorMap::entropic(), ConstraintSet::simplex(), vec![0.5, 0.3, 0.2]),
        ("p-norm / R^d", MirrorMap::pnorm(1.5)?, ConstraintSet::unbounded(), vec![0.3, -0.2, 0.1]),
    ];
    let g = [0.8, -0.4, 0.1];
    let reg = Regularizer::l1(0.1);

    for (name, map, set, x) in &cases {
        let step = CompositeStep {
            map,
            set,
            reg: &reg,
            x,
            g: &g,
            eta: 0.5,
        };
        let exact = prox_exact(&step)?;
        let numeric = prox_numeric(&step, DEFAULT_TOL)?;
        println!("{name}");
        println!("  closed form {exact:.6?}  objective {:.9}", step.objective(&exact));
        println!("  numeric     {numeric:.6?}  objective {:.9}", step.objective(&numeric));
        println!("  V(y, x) = {:.6}", map.bregman(&exact, x)?);
    }
    Ok(())
}
