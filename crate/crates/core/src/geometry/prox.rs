//! The composite mirror step
//!
//! ```text
//! argmin_{z in K}  <g, z> + r(z) + V(z, x) / eta
//! ```
//!
//! solved in closed form for the supported (map, set, regularizer) triples,
//! numerically otherwise, and optionally perturbed to model an inexact
//! solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mirror::{MirrorKind, MirrorMap, ENTROPIC_FLOOR};
use crate::geometry::numeric;
use crate::geometry::regularizer::Regularizer;
use crate::geometry::set::ConstraintSet;
use crate::linalg::{dot, norm2, soft_threshold};

/// Default absolute tolerance for scalar checks and the numeric solver.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One instance of the composite mirror step.
#[derive(Debug, Clone, Copy)]
pub struct CompositeStep<'a> {
    pub map: &'a MirrorMap,
    pub set: &'a ConstraintSet,
    pub reg: &'a Regularizer,
    /// Current point (the Bregman center).
    pub x: &'a [f64],
    /// Linear term, usually a (sub)gradient or gradient estimate.
    pub g: &'a [f64],
    pub eta: f64,
}

impl<'a> CompositeStep<'a> {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.g.len() != self.x.len() {
            return Err(Error::invalid("gradient and point dimensions differ"));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid(format!("step size must be positive, got {}", self.eta)));
        }
        if self.g.iter().chain(self.x).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite entries in prox inputs"));
        }
        self.reg.validate()
    }

    /// `<g, z> + r(z) + V(z, x) / eta`
    pub fn objective(&self, z: &[f64]) -> f64 {
        dot(self.g, z) + self.reg.value(z) + self.map.bregman_unchecked(z, self.x) / self.eta
    }

    /// Whether [`prox_exact`] has a closed form for this triple.
    pub fn has_closed_form(&self) -> bool {
        closed_form_kind(self).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ClosedForm {
    /// gradient step, soft-threshold, radial projection
    EuclideanBall { radius: f64 },
    /// link, dual step, soft-threshold, inverse link
    PnormFree { p: f64 },
    /// normalized exponentiated gradient
    EntropicSimplex { mass: f64 },
}

fn closed_form_kind(step: &CompositeStep<'_>) -> Option<ClosedForm> {
    match step.map.kind {
        MirrorKind::Euclidean => step
            .set
            .ball_radius()
            .map(|radius| ClosedForm::EuclideanBall { radius }),
        MirrorKind::Pnorm { p } if p == 2.0 => step
            .set
            .ball_radius()
            .map(|radius| ClosedForm::EuclideanBall { radius }),
        MirrorKind::Pnorm { p } => match (step.set.ball_radius(), step.reg) {
            (Some(r), Regularizer::Zero | Regularizer::L1 { .. }) if r.is_infinite() => {
                Some(ClosedForm::PnormFree { p })
            }
            _ => None,
        },
        // l1 is constant on the simplex
        MirrorKind::Entropic => match (step.set.simplex_mass(), step.reg) {
            (Some(mass), Regularizer::Zero | Regularizer::L1 { .. }) => {
                Some(ClosedForm::EntropicSimplex { mass })
            }
            _ => None,
        },
    }
}

/// Exact minimizer for the closed-form triples.
pub fn prox_exact(step: &CompositeStep<'_>) -> Result<Vec<f64>> {
    step.validate()?;
    let kind = closed_form_kind(step).ok_or_else(|| {
        Error::Unsupported(format!(
            "no closed-form prox for map {:?}, set {:?}, regularizer {:?}",
            step.map.kind, step.set.kind, step.reg
        ))
    })?;
    let eta = step.eta;
    let shrink = eta * step.reg.l1_weight();
    Ok(match kind {
        ClosedForm::EuclideanBall { radius } => {
            let denom = 1.0 + eta * step.reg.l2_weight();
            let y: Vec<f64> = step
                .x
                .iter()
                .zip(step.g)
                .map(|(xi, gi)| soft_threshold(xi - eta * gi, shrink) / denom)
                .collect();
            let n = norm2(&y);
            if n <= radius {
                y
            } else {
                y.into_iter().map(|v| v * (radius / n)).collect()
            }
        }
        ClosedForm::PnormFree { .. } => {
            let theta = step.map.link(step.x);
            let dual: Vec<f64> = theta
                .iter()
                .zip(step.g)
                .map(|(t, gi)| soft_threshold(t - eta * gi, shrink))
                .collect();
            step.map.inverse_link(&dual)
        }
        ClosedForm::EntropicSimplex { mass } => {
            let x = floor_on_simplex(step.x, mass);
            // log-domain weights, shifted for stability
            let logw: Vec<f64> = x
                .iter()
                .zip(step.g)
                .map(|(xi, gi)| xi.ln() - eta * gi)
                .collect();
            let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|v| mass * v / total).collect()
        }
    })
}

/// Clamps coordinates to `ENTROPIC_FLOOR` and renormalizes to `mass`.
pub fn floor_on_simplex(x: &[f64], mass: f64) -> Vec<f64> {
    let clamped: Vec<f64> = x.iter().map(|v| v.max(ENTROPIC_FLOOR)).collect();
    let s: f64 = clamped.iter().sum();
    clamped.into_iter().map(|v| v * mass / s).collect()
}

/// Closed form when available, otherwise the numeric solver if `fallback`.
pub fn prox(step: &CompositeStep<'_>, fallback: bool) -> Result<Vec<f64>> {
    if step.has_closed_form() {
        prox_exact(step)
    } else if fallback {
        numeric::prox_numeric(step, DEFAULT_TOL)
    } else {
        prox_exact(step)
    }
}

/// How the inexact solver deviates from the exact prox at round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorModel {
    Exact,
    /// `rho_t = c_rho / t^{3/2}`
    Decaying { c_rho: f64 },
    /// `rho_t = rho`
    Fixed { rho: f64 },
    /// `rho_t = c_rho / T^{3/2}` for every round of a horizon-`T` run.
    HorizonScaled { c_rho: f64 },
    /// Like `Decaying`, but the perturbation is shortened until the
    /// objective gap is at most `rho_t`.
    GapBounded { c_rho: f64 },
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel::Exact
    }
}

impl ErrorModel {
    pub fn rho(&self, t: usize, horizon: usize) -> f64 {
        let t = t.max(1) as f64;
        match *self {
            ErrorModel::Exact => 0.0,
            ErrorModel::Decaying { c_rho } | ErrorModel::GapBounded { c_rho } => c_rho / t.powf(1.5),
            ErrorModel::Fixed { rho } => rho,
            ErrorModel::HorizonScaled { c_rho } => c_rho / (horizon.max(1) as f64).powf(1.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            ErrorModel::Exact => 0.0,
            ErrorModel::Decaying { c_rho }
            | ErrorModel::GapBounded { c_rho }
            | ErrorModel::HorizonScaled { c_rho } => c_rho,
            ErrorModel::Fixed { rho } => rho,
        };
        if v < 0.0 || !v.is_finite() {
            return Err(Error::invalid("error-model magnitude must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Whether the realized objective gap is guaranteed to be `<= rho_t`.
    pub fn bounds_gap(&self) -> bool {
        matches!(self, ErrorModel::Exact | ErrorModel::GapBounded { .. })
    }
}

/// Output of [`prox_approx`].
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxProx {
    /// The returned point `y`.
    pub point: Vec<f64>,
    /// The exact minimizer `y*`.
    pub exact: Vec<f64>,
    pub rho: f64,
    /// `F(y) - F(y*)` for the composite objective `F`.
    pub gap: f64,
}

/// `P_K(y + s * rho * 1)`.
pub fn perturb(set: &ConstraintSet, y: &[f64], shift: f64) -> Vec<f64> {
    if shift == 0.0 {
        return y.to_vec();
    }
    let moved: Vec<f64> = y.iter().map(|v| v + shift).collect();
    set.project(&moved)
}

/// Exact prox followed by the configured perturbation.
pub fn prox_approx(
    step: &CompositeStep<'_>,
    model: &ErrorModel,
    t: usize,
    horizon: usize,
    fallback: bool,
) -> Result<ApproxProx> {
    let exact = prox(step, fallback)?;
    let rho = model.rho(t, horizon);
    let base = step.objective(&exact);
    let gap_of = |y: &[f64]| (step.objective(y) - base).max(0.0);

    let point = match model {
        ErrorModel::Exact => exact.clone(),
        ErrorModel::GapBounded { .. } => {
            // the computed gap loses digits to cancellation; aim slightly low
            let target = rho * (1.0 - 1e-9);
            let full = perturb(step.set, &exact, rho);
            if gap_of(&full) <= target {
                full
            } else {
                // largest s in [0, 1] with gap(P_K(y* + s rho 1)) <= target
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if gap_of(&perturb(step.set, &exact, mid * rho)) <= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                perturb(step.set, &exact, lo * rho)
            }
        }
        _ => perturb(step.set, &exact, rho),
    };
    let gap = if matches!(model, ErrorModel::Exact) {
        0.0
    } else {
        gap_of(&point)
    };
    Ok(ApproxProx {
        point,
        exact,
        rho,
        gap,
    })
}

/// An element `v` of the subdifferential of the unconstrained composite
/// objective at `y`, choosing the l1 subgradient at zero coordinates that
/// best matches first-order optimality. At the exact prox,
/// `<v, z - y> >= 0` for every feasible `z`.
pub fn optimality_vector(step: &CompositeStep<'_>, y: &[f64]) -> Vec<f64> {
    let gy = step.map.link(y);
    let gx = step.map.link(step.x);
    let a = step.reg.l2_weight();
    let b = step.reg.l1_weight();
    y.iter()
        .enumerate()
        .map(|(s, &ys)| {
            let w = step.g[s] + a * ys + (gy[s] - gx[s]) / step.eta;
            let sub = if ys > 0.0 {
                b
            } else if ys < 0.0 {
                -b
            } else if b > 0.0 {
                b * (-w / b).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            w + sub
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn euclidean_unbounded_is_soft_threshold() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::unbounded();
        let reg = Regularizer::l1(0.1);
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &reg,
            x: &[3.0, 0.0],
            g: &[-1.0, 0.05],
            eta: 1.0,
        };
        assert_eq!(prox_exact(&step).unwrap(), vec![3.9, 0.0]);
    }

    #[test]
    fn euclidean_elastic_example() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let reg = Regularizer::l1(0.1);
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &reg,
            x: &[0.5, 0.0],
            g: &[0.2, 0.0],
            eta: 1.0,
        };
        let y = prox_exact(&step).unwrap();
        assert!(close(&y, &[0.2, 0.0], 1e-15), "{y:?}");
    }

    #[test]
    fn euclidean_projection_example() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &Regularizer::Zero,
            x: &[0.0, 0.0],
            g: &[-2.0, 0.0],
            eta: 1.0,
        };
        let y = prox_exact(&step).unwrap();
        assert!(close(&y, &[1.0, 0.0], 1e-15));
        let n = numeric::prox_numeric(&step, 1e-9).unwrap();
        assert!(close(&n, &[1.0, 0.0], 1e-6), "{n:?}");
    }

    #[test]
    fn entropic_uniform_gradient_is_fixed_point() {
        let map = MirrorMap::entropic();
        let set = ConstraintSet::simplex();
        for c in [-3.0, 0.0, 0.7, 12.0] {
            let step = CompositeStep {
                map: &map,
                set: &set,
                reg: &Regularizer::Zero,
                x: &[0.5, 0.5],
                g: &[c, c],
                eta: 0.9,
            };
            assert!(close(&prox_exact(&step).unwrap(), &[0.5, 0.5], 1e-15));
        }
    }

    #[test]
    fn unsupported_without_fallback() {
        let map = MirrorMap::entropic();
        let set = ConstraintSet::ball(1.0).unwrap();
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &Regularizer::Zero,
            x: &[0.5, 0.5],
            g: &[0.0, 0.0],
            eta: 1.0,
        };
        assert!(matches!(prox(&step, false), Err(Error::Unsupported(_))));
        assert!(!step.has_closed_form());
    }

    #[test]
    fn rejects_bad_step() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &Regularizer::Zero,
            x: &[0.0],
            g: &[1.0],
            eta: 0.0,
        };
        assert!(prox_exact(&step).is_err());
    }

    #[test]
    fn error_model_schedules() {
        assert_eq!(ErrorModel::Exact.rho(5, 10), 0.0);
        assert_eq!(ErrorModel::Decaying { c_rho: 10.0 }.rho(1, 10), 10.0);
        assert!((ErrorModel::Decaying { c_rho: 10.0 }.rho(4, 10) - 1.25).abs() < 1e-15);
        assert_eq!(ErrorModel::Fixed { rho: 0.5 }.rho(99, 100), 0.5);
        assert!((ErrorModel::HorizonScaled { c_rho: 10.0 }.rho(1, 100) - 0.01).abs() < 1e-15);
    }

    fn sec5_step<'a>(
        map: &'a MirrorMap,
        set: &'a ConstraintSet,
        reg: &'a Regularizer,
        x: &'a [f64],
        g: &'a [f64],
    ) -> CompositeStep<'a> {
        CompositeStep {
            map,
            set,
            reg,
            x,
            g,
            eta: 0.1,
        }
    }

    #[test]
    fn approx_exact_has_zero_gap() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let reg = Regularizer::l1(0.1);
        let x = [0.1; 10];
        let g = [0.3; 10];
        let step = sec5_step(&map, &set, &reg, &x, &g);
        let a = prox_approx(&step, &ErrorModel::Exact, 3, 10, false).unwrap();
        assert_eq!(a.gap, 0.0);
        assert_eq!(a.point, prox_exact(&step).unwrap());
    }

    #[test]
    fn approx_perturbations_shift_then_project() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let reg = Regularizer::l1(0.1);
        let x = [0.05; 10];
        let g = [0.3; 10];
        let step = sec5_step(&map, &set, &reg, &x, &g);
        let exact = prox_exact(&step).unwrap();

        let big = prox_approx(&step, &ErrorModel::Decaying { c_rho: 10.0 }, 1, 100, false).unwrap();
        let expect = set.project(&exact.iter().map(|v| v + 10.0).collect::<Vec<_>>());
        assert_eq!(big.rho, 10.0);
        assert!(close(&big.point, &expect, 1e-15));
        assert!(set.contains(&big.point));
        assert!(big.gap.is_finite() && big.gap > 0.0);

        let half = prox_approx(&step, &ErrorModel::Fixed { rho: 0.5 }, 7, 100, false).unwrap();
        let expect = set.project(&exact.iter().map(|v| v + 0.5).collect::<Vec<_>>());
        assert!(close(&half.point, &expect, 1e-15));
    }

    #[test]
    fn gap_bounded_model_respects_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let reg = Regularizer::l1(0.1);
        let model = ErrorModel::GapBounded { c_rho: 10.0 };
        for t in 1..200 {
            let x = set.project(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
            let g: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let step = CompositeStep {
                map: &map,
                set: &set,
                reg: &reg,
                x: &x,
                g: &g,
                eta: 0.05,
            };
            let a = prox_approx(&step, &model, t, 200, false).unwrap();
            assert!(a.gap <= a.rho + 1e-12);
            let dist = norm2(&crate::linalg::sub(&a.point, &a.exact));
            assert!(dist <= (2.0 * step.eta * a.rho / map.sigma()).sqrt() + 1e-9);
        }
    }

    #[test]
    fn closed_forms_satisfy_first_order_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let ball = ConstraintSet::ball(1.0).unwrap();
        let free = ConstraintSet::unbounded();
        let simplex = ConstraintSet::simplex();
        let euclid = MirrorMap::euclidean();
        let kl = MirrorMap::entropic();
        let pn = MirrorMap::pnorm(1.5).unwrap();
        let elastic = Regularizer::ElasticNet {
            l2_weight: 0.5,
            l1_weight: 0.2,
        };
        let l1 = Regularizer::l1(0.3);
        let cases: Vec<(&MirrorMap, &ConstraintSet, &Regularizer)> = vec![
            (&euclid, &ball, &elastic),
            (&euclid, &ball, &l1),
            (&kl, &simplex, &Regularizer::Zero),
            (&pn, &free, &l1),
        ];
        for (map, set, reg) in cases {
            for _ in 0..100 {
                let d = rng.gen_range(2..6);
                let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let x = match map.kind {
                    MirrorKind::Entropic => {
                        let v: Vec<f64> = raw.iter().map(|r| r.abs() + 0.05).collect();
                        let s: f64 = v.iter().sum();
                        v.iter().map(|a| a / s).collect()
                    }
                    _ => set.project(&raw),
                };
                let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let step = CompositeStep {
                    map,
                    set,
                    reg,
                    x: &x,
                    g: &g,
                    eta: rng.gen_range(0.1..2.0),
                };
                let y = prox_exact(&step).unwrap();
                assert!(set.contains(&y));
                let v = optimality_vector(&step, &y);
                for _ in 0..50 {
                    let z_raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
                    let z = match map.kind {
                        MirrorKind::Entropic => crate::geometry::set::project_simplex(&z_raw, 1.0),
                        _ => set.project(&z_raw),
                    };
                    let inner = dot(&v, &crate::linalg::sub(&z, &y));
                    assert!(inner >= -1e-6, "{:?}: residual {inner}", map.kind);
                }
            }
        }
    }
}
