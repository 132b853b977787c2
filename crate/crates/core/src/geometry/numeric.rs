//! General-purpose solver for the composite mirror step.
//!
//! Cyclic coordinate descent with exact one-dimensional minimization handles
//! the separable l1 term; the ball or simplex constraint is moved into a
//! Lagrangian term whose multiplier is found by bisection. Nothing here
//! uses the closed forms, so it doubles as their test oracle. Instances with
//! `d <= 2` are cross-checked by a two-stage grid search.

use crate::error::{Error, Result};
use crate::geometry::mirror::MirrorKind;
use crate::geometry::prox::CompositeStep;
use crate::linalg::norm2;

/// Budget on one-dimensional minimizations across all inner solves.
pub const MAX_ITERATIONS: usize = 50_000;

#[derive(Debug, Clone, Copy)]
enum Shape {
    Free,
    Ball(f64),
    Simplex(f64),
}

struct Solver<'s, 'a> {
    step: &'s CompositeStep<'a>,
    link_x: Vec<f64>,
    shape: Shape,
    iterations: usize,
    last_decrease: f64,
}

impl<'s, 'a> Solver<'s, 'a> {
    /// Partial derivative of the smooth part of
    /// `F(z) + nu/2 ||z||^2` (ball) or `F(z) + nu * sum z` (simplex)
    /// with respect to coordinate `s`.
    fn partial(&self, z: &[f64], s: usize, nu: f64) -> f64 {
        let step = self.step;
        let zs = z[s];
        let link_s = match step.map.kind {
            MirrorKind::Euclidean => zs,
            MirrorKind::Entropic => 1.0 + zs.max(1e-300).ln(),
            MirrorKind::Pnorm { p } => {
                let n = crate::linalg::Norm::lp(p).eval(z);
                if n == 0.0 {
                    0.0
                } else {
                    crate::linalg::sign(zs) * n * (zs.abs() / n).powf(p - 1.0)
                }
            }
        };
        let mut h = step.g[s] + step.reg.l2_weight() * zs + (link_s - self.link_x[s]) / step.eta;
        match self.shape {
            Shape::Ball(_) => h += nu * zs,
            Shape::Simplex(_) => h += nu,
            Shape::Free => {}
        }
        h
    }

    fn coordinate_min(&self, z: &mut [f64], s: usize, nu: f64) {
        let b = self.step.reg.l1_weight();
        let nonneg = matches!(self.shape, Shape::Simplex(_));
        let h_at = |z: &mut [f64], t: f64| {
            z[s] = t;
            self.partial(z, s, nu)
        };
        let start = z[s];

        let h0 = h_at(z, 0.0);
        // 0 is optimal when it lies in the subdifferential (or at the bound)
        if (h0 - b <= 0.0 || nonneg) && h0 + b >= 0.0 {
            z[s] = 0.0;
            return;
        }
        // root of the monotone map t -> h(t) + offset on one side of zero
        let (offset, positive) = if h0 + b < 0.0 { (b, true) } else { (-b, false) };
        let f = |z: &mut [f64], t: f64| h_at(z, t) + offset;

        let mut inner = 0.0f64;
        let mut outer = if positive == (start > 0.0) && start != 0.0 {
            start
        } else if positive {
            1.0
        } else {
            -1.0
        };
        // expand until the sign flips
        let mut guard = 0;
        while {
            let v = f(z, outer);
            if positive {
                v < 0.0
            } else {
                v > 0.0
            }
        } {
            inner = outer;
            outer *= 2.0;
            guard += 1;
            if guard > 2000 {
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (inner + outer);
            if mid == inner || mid == outer {
                break;
            }
            let v = f(z, mid);
            let below = if positive { v < 0.0 } else { v > 0.0 };
            if below {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        z[s] = 0.5 * (inner + outer);
    }

    fn penalized_value(&self, z: &[f64], nu: f64) -> f64 {
        let base = self.step.objective(z);
        match self.shape {
            Shape::Ball(_) => base + 0.5 * nu * z.iter().map(|v| v * v).sum::<f64>(),
            Shape::Simplex(_) => base + nu * z.iter().sum::<f64>(),
            Shape::Free => base,
        }
    }

    /// Coordinate descent on the penalized objective, warm-started at `z`.
    fn solve_penalized(&mut self, z: &mut Vec<f64>, nu: f64) -> Result<()> {
        let d = z.len();
        let mut prev = self.penalized_value(z, nu);
        loop {
            let mut change = 0.0f64;
            for s in 0..d {
                let old = z[s];
                self.coordinate_min(z, s, nu);
                change = change.max((z[s] - old).abs());
            }
            self.iterations += d;
            let now = self.penalized_value(z, nu);
            self.last_decrease = (prev - now).max(0.0);
            prev = now;
            let scale = 1.0 + z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if change <= 1e-14 * scale || d == 1 && change == 0.0 {
                return Ok(());
            }
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::NonConvergence {
                    iterations: self.iterations,
                    gap: self.last_decrease,
                });
            }
        }
    }
}

/// Numerically minimizes the composite step to within `tol` in objective.
pub fn prox_numeric(step: &CompositeStep<'_>, tol: f64) -> Result<Vec<f64>> {
    step.validate()?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let shape = if let Some(r) = step.set.ball_radius() {
        if r.is_infinite() {
            Shape::Free
        } else {
            Shape::Ball(r)
        }
    } else if let Some(mass) = step.set.simplex_mass() {
        Shape::Simplex(mass)
    } else {
        return Err(Error::Unsupported(format!("numeric prox over {:?}", step.set.kind)));
    };
    if step.map.kind == MirrorKind::Entropic && step.x.iter().any(|&v| v <= 0.0) {
        return Err(Error::invalid("entropic center must be strictly positive"));
    }
    let mut solver = Solver {
        step,
        link_x: step.map.link(step.x),
        shape,
        iterations: 0,
        last_decrease: 0.0,
    };
    let d = step.dim();
    let mut z = match shape {
        Shape::Simplex(mass) => vec![mass / d as f64; d],
        _ => step.set.project(step.x),
    };

    match shape {
        Shape::Free => solver.solve_penalized(&mut z, 0.0)?,
        Shape::Ball(radius) => {
            solver.solve_penalized(&mut z, 0.0)?;
            if norm2(&z) > radius {
                let mut lo = 0.0f64;
                let mut hi = 1.0 / step.eta;
                let mut z_hi = z.clone();
                loop {
                    solver.solve_penalized(&mut z_hi, hi)?;
                    if norm2(&z_hi) <= radius {
                        break;
                    }
                    lo = hi;
                    hi *= 4.0;
                }
                let mut z_mid = z_hi.clone();
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if hi - lo <= 1e-15 * hi {
                        break;
                    }
                    solver.solve_penalized(&mut z_mid, mid)?;
                    if norm2(&z_mid) <= radius {
                        hi = mid;
                        z_hi.clone_from(&z_mid);
                    } else {
                        lo = mid;
                    }
                }
                z = z_hi;
            }
        }
        Shape::Simplex(mass) => {
            let sum_at = |solver: &mut Solver, z: &mut Vec<f64>, nu: f64| -> Result<f64> {
                solver.solve_penalized(z, nu)?;
                Ok(z.iter().sum())
            };
            let scale = 1.0 / step.eta + 1.0;
            let (mut lo, mut hi) = (-scale, scale);
            let mut probe = z.clone();
            while sum_at(&mut solver, &mut probe, lo)? < mass {
                lo *= 4.0;
            }
            while sum_at(&mut solver, &mut probe, hi)? > mass {
                hi *= 4.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if sum_at(&mut solver, &mut probe, mid)? > mass {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let total: f64 = probe.iter().sum();
            z = probe.into_iter().map(|v| v.max(0.0) * mass / total).collect();
        }
    }

    if d <= 2 {
        if let Some(grid) = grid_refine(step, shape) {
            let (fz, fg) = (step.objective(&z), step.objective(&grid));
            if fg < fz - tol {
                return Err(Error::NonConvergence {
                    iterations: solver.iterations,
                    gap: fz - fg,
                });
            }
        }
    }
    if solver.last_decrease > tol {
        return Err(Error::NonConvergence {
            iterations: solver.iterations,
            gap: solver.last_decrease,
        });
    }
    Ok(z)
}

/// Coarse (1e-2) then local (1e-4) grid search for `d <= 2`.
fn grid_refine(step: &CompositeStep<'_>, shape: Shape) -> Option<Vec<f64>> {
    let d = step.dim();
    let feasible = |z: &[f64]| step.set.contains(z);
    let eval = |z: &[f64]| {
        if feasible(z) && (step.map.kind != MirrorKind::Entropic || z.iter().all(|&v| v >= 0.0)) {
            step.objective(z)
        } else {
            f64::INFINITY
        }
    };

    if let Shape::Simplex(mass) = shape {
        // one free coordinate
        if d == 1 {
            return Some(vec![mass]);
        }
        let point = |a: f64| vec![a, mass - a];
        let search = |lo: f64, hi: f64, h: f64| {
            let n = ((hi - lo) / h).round() as usize;
            (0..=n)
                .map(|k| (lo + k as f64 * h).clamp(0.0, mass))
                .map(|a| (eval(&point(a)), a))
                .fold((f64::INFINITY, lo), |b, c| if c.0 < b.0 { c } else { b })
        };
        let (_, a) = search(0.0, mass, 1e-2);
        let (_, a) = search((a - 1e-2).max(0.0), (a + 1e-2).min(mass), 1e-4);
        return Some(point(a));
    }

    let (center, half) = match shape {
        Shape::Ball(r) => (vec![0.0; d], r),
        _ => {
            let w = step.x.iter().chain(step.g).fold(0.0f64, |m, v| m.max(v.abs()));
            (step.x.to_vec(), 2.0 * (w * (1.0 + step.eta) + step.eta * step.reg.l1_weight() + 1.0))
        }
    };
    let coarse = 1e-2 * half.max(1.0);
    let fine = 1e-4 * half.max(1.0);
    let scan = |c: &[f64], half: f64, h: f64| -> (f64, Vec<f64>) {
        let n = (2.0 * half / h).round() as i64;
        let mut best = (f64::INFINITY, c.to_vec());
        let mut z = vec![0.0; d];
        let axis = |k: i64, s: usize| c[s] - half + k as f64 * h;
        if d == 1 {
            for i in 0..=n {
                z[0] = axis(i, 0);
                let v = eval(&z);
                if v < best.0 {
                    best = (v, z.clone());
                }
            }
        } else {
            for i in 0..=n {
                for j in 0..=n {
                    z[0] = axis(i, 0);
                    z[1] = axis(j, 1);
                    let v = eval(&z);
                    if v < best.0 {
                        best = (v, z.clone());
                    }
                }
            }
        }
        best
    };
    let (_, best) = scan(&center, half, coarse);
    let (v, best) = scan(&best, coarse, fine);
    v.is_finite().then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mirror::MirrorMap;
    use crate::geometry::regularizer::Regularizer;
    use crate::geometry::set::ConstraintSet;

    #[test]
    fn one_dimensional_l1_example() {
        let map = MirrorMap::euclidean();
        let set = ConstraintSet::ball(1.0).unwrap();
        let reg = Regularizer::l1(0.5);
        let step = CompositeStep {
            map: &map,
            set: &set,
            reg: &reg,
            x: &[0.9],
            g: &[0.0],
            eta: 1.0,
        };
        let z = prox_numeric(&step, 1e-9).unwrap();
        assert!((z[0] - 0.4).abs() < 1e-9, "{z:?}");
        let grid = grid_refine(&step, Shape::Ball(1.0)).unwrap();
        assert!((grid[0] - 0.4).abs() < 1e-4, "{grid:?}");
    }

    #[test]
    fn zero_gradient_returns_center() {
        let cases = [
            (MirrorMap::euclidean(), ConstraintSet::ball(2.0).unwrap(), vec![0.3, -0.4, 1.1]),
            (MirrorMap::pnorm(1.5).unwrap(), ConstraintSet::unbounded(), vec![0.3, -0.4, 1.1]),
            (MirrorMap::entropic(), ConstraintSet::simplex(), vec![0.2, 0.3, 0.5]),
        ];
        for (map, set, x) in cases {
            let g = vec![0.0; x.len()];
            let step = CompositeStep {
                map: &map,
                set: &set,
                reg: &Regularizer::Zero,
                x: &x,
                g: &g,
                eta: 0.7,
            };
            let z = prox_numeric(&step, 1e-9).unwrap();
            for (a, b) in z.iter().zip(&x) {
                assert!((a - b).abs() < 1e-6, "{:?}: {z:?}", map.kind);
            }
        }
    }

    #[test]
    fn same_as_closed_form_on_textbook_case() {
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
        let z = prox_numeric(&step, 1e-9).unwrap();
        assert!((z[0] - 0.2).abs() < 1e-6 && z[1].abs() < 1e-6, "{z:?}");
    }

    #[test]
    fn handles_combinations_without_closed_form() {
        // p-norm map on a finite ball, entropic map with an elastic net
        let pn = MirrorMap::pnorm(1.5).unwrap();
        let ball = ConstraintSet::ball(0.5).unwrap();
        let reg = Regularizer::l1(0.1);
        let step = CompositeStep {
            map: &pn,
            set: &ball,
            reg: &reg,
            x: &[0.2, -0.1, 0.05],
            g: &[-3.0, 2.0, 0.01],
            eta: 1.0,
        };
        assert!(!step.has_closed_form());
        let z = prox_numeric(&step, 1e-9).unwrap();
        assert!(ball.contains(&z));
        assert!(crate::geometry::prox::prox(&step, true).is_ok());

        let kl = MirrorMap::entropic();
        let simplex = ConstraintSet::simplex();
        let elastic = Regularizer::ElasticNet {
            l2_weight: 1.0,
            l1_weight: 0.2,
        };
        let step = CompositeStep {
            map: &kl,
            set: &simplex,
            reg: &elastic,
            x: &[0.2, 0.3, 0.5],
            g: &[1.0, -1.0, 0.5],
            eta: 0.5,
        };
        let z = prox_numeric(&step, 1e-9).unwrap();
        assert!(simplex.contains(&z));
    }
}
