//! The best fixed decision in hindsight,
//! `x* = argmin_{x in K} sum_t sum_j (l_{j,t}(x) + r(x))`,
//! found by accelerated proximal gradient with a computable optimality
//! certificate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::regularizer::Regularizer;
use crate::geometry::set::ConstraintSet;
use crate::linalg::{dot, norm2, soft_threshold, Norm};
use crate::problems::stream::{LossKind, LossStream};

/// Default relative tolerance of the certified gap.
pub const COMPARATOR_TOL: f64 = 1e-9;
pub const COMPARATOR_MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparator {
    pub x: Vec<f64>,
    /// Aggregate objective `F(x*)`.
    pub objective: f64,
    /// Certified upper bound on `F(x*) - min F`.
    pub gap: f64,
    pub horizon: usize,
    pub iterations: usize,
}

/// `F(x) = 1/2 x'Hx - c'x + c0 + n * (l1 ||x||_1)` with the quadratic part
/// of the regularizer folded into `H`.
struct Aggregate<'a> {
    h: Vec<Vec<f64>>,
    c: Vec<f64>,
    c0: f64,
    l1: f64,
    reg: &'a Regularizer,
    n: f64,
    set: &'a ConstraintSet,
}

impl<'a> Aggregate<'a> {
    fn new(stream: &LossStream, set: &'a ConstraintSet, reg: &'a Regularizer) -> Self {
        let d = stream.dim();
        let n = (stream.nodes() * stream.horizon()) as f64;
        let mut h = vec![vec![0.0; d]; d];
        let mut c = vec![0.0; d];
        let mut c0 = 0.0;
        for dt in stream.data() {
            match stream.kind() {
                LossKind::Regression { .. } => {
                    for (r, br) in h.iter_mut().zip(&dt.b) {
                        for (v, bc) in r.iter_mut().zip(&dt.b) {
                            *v += br * bc;
                        }
                    }
                    for (cv, b) in c.iter_mut().zip(&dt.b) {
                        *cv += dt.z * b;
                    }
                    c0 += 0.5 * dt.z * dt.z;
                }
                LossKind::Linear => {
                    for (cv, b) in c.iter_mut().zip(&dt.b) {
                        *cv -= b;
                    }
                    c0 += dt.z;
                }
            }
        }
        let ridge = n * (stream.l2_weight() + reg.l2_weight());
        for (s, row) in h.iter_mut().enumerate() {
            row[s] += ridge;
        }
        Aggregate {
            h,
            c,
            c0,
            l1: n * reg.l1_weight(),
            reg,
            n,
            set,
        }
    }

    fn hx(&self, x: &[f64]) -> Vec<f64> {
        self.h.iter().map(|r| dot(r, x)).collect()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.hx(x).iter().zip(&self.c).map(|(a, b)| a - b).collect()
    }

    /// Loss part plus `n * r(x)`; `H` carries the regularizer's quadratic
    /// share, which is swapped for `n * r(x)` here.
    fn objective(&self, x: &[f64]) -> f64 {
        let quad = 0.5 * dot(x, &self.hx(x)) - 0.5 * self.n * self.reg.l2_weight() * dot(x, x);
        quad - dot(&self.c, x) + self.c0 + self.n * self.reg.value(x)
    }

    fn composite(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.hx(x)) - dot(&self.c, x) + self.l1 * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Prox of `(l1 ||.||_1 + I_K) / L`.
    fn prox(&self, v: &[f64], lip: f64) -> Vec<f64> {
        if self.set.simplex_mass().is_some() {
            return self.set.project(v);
        }
        let thr = self.l1 / lip;
        let w: Vec<f64> = v.iter().map(|x| soft_threshold(*x, thr)).collect();
        self.set.project(&w)
    }

    /// Frobenius norm of `H`, an upper bound on its largest eigenvalue.
    fn frobenius(&self) -> f64 {
        self.h.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Minimizes the aggregate objective over the stream's full horizon.
pub fn solve_comparator(
    stream: &LossStream,
    set: &ConstraintSet,
    reg: &Regularizer,
    tol: f64,
) -> Result<Comparator> {
    if !(tol > 0.0) {
        return Err(Error::invalid("comparator tolerance must be positive"));
    }
    let agg = Aggregate::new(stream, set, reg);
    let d = stream.dim();
    // the ridge term bounds the smallest eigenvalue of H from below
    let mu = agg.n * (stream.l2_weight() + reg.l2_weight());
    let lip = agg.frobenius().max(1e-9 * agg.n).max(1e-12);
    let diameter = set.diameter(Norm::L2, d);

    let mut x = match set.simplex_mass() {
        Some(mass) => vec![mass / d as f64; d],
        None => vec![0.0; d],
    };
    let mut y = x.clone();
    let mut theta = 1.0f64;
    let mut best_gap = f64::INFINITY;
    let mut f_prev = agg.composite(&x);
    for it in 1..=COMPARATOR_MAX_ITERATIONS {
        let gy = agg.grad(&y);
        let step: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect();
        let x_new = agg.prox(&step, lip);
        // v = L (y - x+) + grad f(x+) - grad f(y) lies in dF(x+)
        let gx = agg.grad(&x_new);
        let v: Vec<f64> = (0..d).map(|s| lip * (y[s] - x_new[s]) + gx[s] - gy[s]).collect();
        let nv = norm2(&v);
        let mut gap = nv * diameter;
        if mu > 0.0 {
            gap = gap.min(nv * nv / (2.0 * mu));
        }
        let scale = agg.objective(&x_new).abs().max(1.0);
        best_gap = best_gap.min(gap);
        if gap <= tol * scale {
            return Ok(Comparator {
                objective: agg.objective(&x_new),
                x: x_new,
                gap,
                horizon: stream.horizon(),
                iterations: it,
            });
        }
        let f_new = agg.composite(&x_new);
        let restart = f_new > f_prev;
        let theta_next = (1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0;
        let momentum = if restart { 0.0 } else { (theta - 1.0) / theta_next };
        y = (0..d).map(|s| x_new[s] + momentum * (x_new[s] - x[s])).collect();
        theta = if restart { 1.0 } else { theta_next };
        f_prev = f_new;
        x = x_new;
    }
    Err(Error::NonConvergence {
        iterations: COMPARATOR_MAX_ITERATIONS,
        gap: best_gap,
    })
}

/// `F(x)` over the stream for an arbitrary point.
pub fn aggregate_objective(stream: &LossStream, reg: &Regularizer, x: &[f64]) -> f64 {
    let n = stream.nodes() as f64;
    (1..=stream.horizon())
        .map(|t| stream.network_value(t, x) + n * reg.value(x))
        .sum()
}
