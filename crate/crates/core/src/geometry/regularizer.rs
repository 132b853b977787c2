use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::set::ConstraintSet;
use crate::linalg::{dot, sign, Norm};

/// The fixed composite term `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    Zero,
    /// `l1_weight * ||x||_1`
    L1 { l1_weight: f64 },
    /// `l2_weight / 2 * ||x||_2^2 + l1_weight * ||x||_1`
    ElasticNet { l2_weight: f64, l1_weight: f64 },
}

impl Regularizer {
    pub fn l1(weight: f64) -> Self {
        if weight == 0.0 {
            Regularizer::Zero
        } else {
            Regularizer::L1 { l1_weight: weight }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.l2_weight(), self.l1_weight());
        if a < 0.0 || b < 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("regularizer weights must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn l1_weight(&self) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { l1_weight } | Regularizer::ElasticNet { l1_weight, .. } => l1_weight,
        }
    }

    pub fn l2_weight(&self) -> f64 {
        match *self {
            Regularizer::ElasticNet { l2_weight, .. } => l2_weight,
            _ => 0.0,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        0.5 * self.l2_weight() * dot(x, x) + self.l1_weight() * l1
    }

    /// A subgradient, taking `sign(0) = 0`.
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let (a, b) = (self.l2_weight(), self.l1_weight());
        x.iter().map(|&v| a * v + b * sign(v)).collect()
    }

    /// `G_r`: a bound on the dual norm of subgradients over `set`.
    ///
    /// The l1 part contributes `lambda_2 ||1||_*`, the quadratic part
    /// `lambda_1 sup ||x||_*`, which needs a bounded set.
    pub fn lipschitz(&self, dual: Norm, set: &ConstraintSet, d: usize) -> Result<f64> {
        let ones = vec![1.0; d];
        let mut g = self.l1_weight() * dual.eval(&ones);
        let a = self.l2_weight();
        if a > 0.0 {
            let r = set.outer_radius();
            if !r.is_finite() {
                return Err(Error::config(
                    "quadratic regularizer on an unbounded set has no Lipschitz constant",
                ));
            }
            g += a * r * dual.l2_equivalence(d);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use rand::{Rng, SeedableRng};

    #[test]
    fn values() {
        let r = Regularizer::ElasticNet {
            l2_weight: 2.0,
            l1_weight: 0.5,
        };
        assert!((r.value(&[1.0, -2.0]) - (5.0 + 1.5)).abs() < 1e-15);
        assert_eq!(Regularizer::Zero.value(&[3.0]), 0.0);
        assert_eq!(Regularizer::l1(0.1).subgradient(&[0.0, -1.0, 2.0]), vec![0.0, -0.1, 0.1]);
    }

    #[test]
    fn l1_lipschitz_euclidean() {
        let ball = ConstraintSet::ball(1.0).unwrap();
        let g = Regularizer::l1(0.1).lipschitz(Norm::L2, &ball, 10).unwrap();
        assert!((g - 0.1 * 10f64.sqrt()).abs() < 1e-15);
        let e = Regularizer::ElasticNet {
            l2_weight: 1.0,
            l1_weight: 0.0,
        };
        assert!(e.lipschitz(Norm::L2, &ConstraintSet::unbounded(), 3).is_err());
    }

    #[test]
    fn sampled_lipschitz_and_nonnegativity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let ball = ConstraintSet::ball(1.0).unwrap();
        let regs = [
            Regularizer::Zero,
            Regularizer::l1(0.3),
            Regularizer::ElasticNet {
                l2_weight: 0.7,
                l1_weight: 0.2,
            },
        ];
        for r in regs {
            let g = r.lipschitz(Norm::L2, &ball, 4).unwrap();
            for _ in 0..1000 {
                let x = ball.project(&(0..4).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<_>>());
                let y = ball.project(&(0..4).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<_>>());
                assert!(r.value(&x) >= 0.0);
                let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                assert!((r.value(&x) - r.value(&y)).abs() <= g * norm2(&diff) + 1e-12);
            }
        }
    }
}
