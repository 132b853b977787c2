use crate::error::{Error, Result};
use crate::geometry::regularizer::Regularizer;
use crate::geometry::set::ConstraintSet;
use crate::linalg::{norm2, Norm};
use crate::problems::stream::{LossKind, LossStream};

/// `(G_l, G_r)` under the dual norm `dual`.
///
/// For the regression loss on a set inside `B_R`,
/// `||(<b, x> - z) b + lambda_1 x||_* <= (R ||b||_2 + |z|) ||b||_* + lambda_1 R p*`,
/// with `p*` the l2-to-dual equivalence constant. `radius` overrides the
/// set's outer radius, which is required for unbounded sets.
pub fn lipschitz_bounds(
    stream: &LossStream,
    set: &ConstraintSet,
    reg: &Regularizer,
    dual: Norm,
    radius: Option<f64>,
) -> Result<(f64, f64)> {
    let d = stream.dim();
    let r_bar = radius.unwrap_or_else(|| set.outer_radius());
    let g_loss = match stream.kind() {
        LossKind::Linear => stream
            .data()
            .iter()
            .map(|dt| dual.eval(&dt.b))
            .fold(0.0f64, f64::max),
        LossKind::Regression { l2_weight } => {
            if !r_bar.is_finite() {
                return Err(Error::config(
                    "loss Lipschitz constant needs a bounded set or an explicit radius",
                ));
            }
            let p_star = dual.l2_equivalence(d);
            stream
                .data()
                .iter()
                .map(|dt| (r_bar * norm2(&dt.b) + dt.z.abs()) * dual.eval(&dt.b) + l2_weight * r_bar * p_star)
                .fold(0.0f64, f64::max)
        }
    };
    let g_reg = match radius {
        Some(r) if reg.l2_weight() > 0.0 => {
            reg.l1_weight() * dual.eval(&vec![1.0; d]) + reg.l2_weight() * r * dual.l2_equivalence(d)
        }
        _ => reg.lipschitz(dual, set, d)?,
    };
    Ok((g_loss, g_reg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::stream::{generate_regression_stream, Datum};
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_stream() {
        let s = LossStream::constant(
            LossKind::Regression { l2_weight: 0.0 },
            2,
            3,
            Datum { b: vec![0.0; 4], z: 0.0 },
        )
        .unwrap();
        let ball = ConstraintSet::ball(1.0).unwrap();
        let (g, _) = lipschitz_bounds(&s, &ball, &Regularizer::Zero, Norm::L2, None).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn single_datum() {
        let s = LossStream::constant(
            LossKind::Regression { l2_weight: 0.0 },
            1,
            1,
            Datum {
                b: vec![1.0, 0.0],
                z: 0.0,
            },
        )
        .unwrap();
        let ball = ConstraintSet::ball(1.0).unwrap();
        let (g, _) = lipschitz_bounds(&s, &ball, &Regularizer::Zero, Norm::L2, None).unwrap();
        assert_eq!(g, 1.0);
    }

    #[test]
    fn l1_regularizer_bound() {
        let s = generate_regression_stream(1, 10, 1, 1.0, 0).unwrap();
        let ball = ConstraintSet::ball(1.0).unwrap();
        let (_, gr) = lipschitz_bounds(&s, &ball, &Regularizer::l1(0.1), Norm::L2, None).unwrap();
        assert!((gr - 0.1 * 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unbounded_needs_radius() {
        let s = generate_regression_stream(1, 3, 1, 1.0, 0).unwrap();
        let free = ConstraintSet::unbounded();
        assert!(lipschitz_bounds(&s, &free, &Regularizer::Zero, Norm::L2, None).is_err());
        assert!(lipschitz_bounds(&s, &free, &Regularizer::Zero, Norm::L2, Some(2.0)).is_ok());
    }

    #[test]
    fn bounds_every_sampled_gradient() {
        let s = generate_regression_stream(3, 5, 20, 1.0, 8).unwrap();
        let ball = ConstraintSet::ball(1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for dual in [Norm::L2, Norm::LINF, Norm::lp(3.0)] {
            let (g, _) = lipschitz_bounds(&s, &ball, &Regularizer::Zero, dual, None).unwrap();
            for t in 1..=20 {
                for i in 0..3 {
                    let x = ball.project(&(0..5).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                    assert!(dual.eval(&s.gradient(i, t, &x)) <= g + 1e-12);
                }
            }
        }
    }
}
