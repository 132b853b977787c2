use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mirror::{MirrorKind, MirrorMap};
use crate::linalg::{norm2, Norm};

/// Absolute slack used by membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    /// Euclidean ball `||x||_2 <= radius`; `radius = inf` is all of `R^d`.
    Ball { radius: f64 },
    /// Probability simplex.
    Simplex,
    /// `(1 - xi) K`.
    Shrunk { inner: Box<ConstraintSet>, xi: f64 },
}

/// A convex feasible set in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub kind: SetKind,
}

impl ConstraintSet {
    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConstraintSet {
            kind: SetKind::Ball { radius },
        })
    }

    pub fn unbounded() -> Self {
        ConstraintSet {
            kind: SetKind::Ball {
                radius: f64::INFINITY,
            },
        }
    }

    pub fn simplex() -> Self {
        ConstraintSet {
            kind: SetKind::Simplex,
        }
    }

    /// `(1 - xi) self`, for `0 <= xi < 1`.
    pub fn shrunk(&self, xi: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::invalid(format!("shrinkage xi = {xi} outside [0, 1)")));
        }
        Ok(ConstraintSet {
            kind: SetKind::Shrunk {
                inner: Box::new(self.clone()),
                xi,
            },
        })
    }

    /// Total scale factor and the innermost base set.
    pub fn base(&self) -> (f64, &ConstraintSet) {
        match &self.kind {
            SetKind::Shrunk { inner, xi } => {
                let (s, b) = inner.base();
                (s * (1.0 - xi), b)
            }
            _ => (1.0, self),
        }
    }

    /// Radius of the Euclidean ball this set equals, if it is one.
    pub fn ball_radius(&self) -> Option<f64> {
        match self.base() {
            (s, ConstraintSet {
                kind: SetKind::Ball { radius },
            }) => Some(s * radius),
            _ => None,
        }
    }

    /// Coordinate sum of the (scaled) simplex this set equals, if it is one.
    pub fn simplex_mass(&self) -> Option<f64> {
        match self.base() {
            (s, ConstraintSet {
                kind: SetKind::Simplex,
            }) => Some(s),
            _ => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.outer_radius().is_finite()
    }

    /// Largest `R` with `B_R` inside the set (0 when no such ball exists).
    pub fn inner_radius(&self) -> f64 {
        match &self.kind {
            SetKind::Ball { radius } => *radius,
            SetKind::Simplex => 0.0,
            SetKind::Shrunk { inner, xi } => (1.0 - xi) * inner.inner_radius(),
        }
    }

    /// Smallest `R` with the set inside `B_R`.
    pub fn outer_radius(&self) -> f64 {
        match &self.kind {
            SetKind::Ball { radius } => *radius,
            SetKind::Simplex => 1.0,
            SetKind::Shrunk { inner, xi } => (1.0 - xi) * inner.outer_radius(),
        }
    }

    /// Diameter `D_K` under `norm` in dimension `d`.
    pub fn diameter(&self, norm: Norm, d: usize) -> f64 {
        match &self.kind {
            SetKind::Ball { radius } => 2.0 * radius * norm.l2_equivalence(d),
            // attained between two vertices: ||e_i - e_j||_r = 2^{1/r}
            SetKind::Simplex => {
                if d < 2 {
                    0.0
                } else if norm.exponent.is_infinite() {
                    1.0
                } else {
                    2f64.powf(1.0 / norm.exponent)
                }
            }
            SetKind::Shrunk { inner, xi } => (1.0 - xi) * inner.diameter(norm, d),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_tol(x, MEMBERSHIP_TOL)
    }

    pub fn contains_tol(&self, x: &[f64], tol: f64) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            SetKind::Ball { radius } => norm2(x) <= radius + tol,
            SetKind::Simplex => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            SetKind::Shrunk { inner, xi } => {
                let s = 1.0 - xi;
                let scaled: Vec<f64> = x.iter().map(|v| v / s).collect();
                inner.contains_tol(&scaled, tol / s)
            }
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            SetKind::Ball { radius } => {
                let n = norm2(x);
                if n <= *radius {
                    x.to_vec()
                } else {
                    x.iter().map(|v| v * (radius / n)).collect()
                }
            }
            SetKind::Simplex => project_simplex(x, 1.0),
            SetKind::Shrunk { inner, xi } => {
                let s = 1.0 - xi;
                let scaled: Vec<f64> = x.iter().map(|v| v / s).collect();
                inner.project(&scaled).into_iter().map(|v| v * s).collect()
            }
        }
    }

    /// `argmin_{x in K} w(x)` for the supported pairings.
    pub fn argmin_omega(&self, map: &MirrorMap, d: usize) -> Result<Vec<f64>> {
        match (map.kind, self.ball_radius(), self.simplex_mass()) {
            (MirrorKind::Euclidean | MirrorKind::Pnorm { .. }, Some(_), _) => Ok(vec![0.0; d]),
            (MirrorKind::Entropic, _, Some(mass)) => Ok(vec![mass / d as f64; d]),
            _ => Err(Error::Unsupported(format!(
                "no closed-form argmin of {:?} over {:?}",
                map.kind, self.kind
            ))),
        }
    }
}

/// Euclidean projection onto `{x >= 0, sum x = mass}` (sort-based).
pub fn project_simplex(x: &[f64], mass: f64) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        cum += v;
        let t = (cum - mass) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    x.iter().map(|v| (v - theta).max(0.0)).collect()
}
