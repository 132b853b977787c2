//! Distance-generating functions, their link maps and Bregman divergences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, sign, Norm};

/// Floor applied to simplex coordinates before taking logarithms.
pub const ENTROPIC_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MirrorKind {
    /// `w(x) = 1/2 ||x||_2^2`
    Euclidean,
    /// `w(x) = sum x_s ln x_s`, on the positive orthant.
    Entropic,
    /// `w(x) = 1/2 ||x||_p^2` with `p` in `(1, 2]`.
    Pnorm { p: f64 },
}

/// A mirror map `w` together with the constants the regret analysis needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorMap {
    pub kind: MirrorKind,
}

impl MirrorMap {
    pub fn euclidean() -> Self {
        MirrorMap {
            kind: MirrorKind::Euclidean,
        }
    }

    pub fn entropic() -> Self {
        MirrorMap {
            kind: MirrorKind::Entropic,
        }
    }

    pub fn pnorm(p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::invalid(format!("p-norm exponent {p} outside (1, 2]")));
        }
        Ok(MirrorMap {
            kind: MirrorKind::Pnorm { p },
        })
    }

    /// `p = ln d / (ln d - 1)`, the exponent whose conjugate is `ln d`.
    pub fn pnorm_for_dimension(d: usize) -> Result<Self> {
        let ln = (d as f64).ln();
        if ln < 2.0 {
            return Err(Error::invalid(format!(
                "dimension {d} too small for the ln(d) exponent rule (needs d >= e^2)"
            )));
        }
        Self::pnorm(ln / (ln - 1.0))
    }

    /// Norm with respect to which `w` is strongly convex.
    pub fn norm(&self) -> Norm {
        match self.kind {
            MirrorKind::Euclidean => Norm::L2,
            MirrorKind::Entropic => Norm::L1,
            MirrorKind::Pnorm { p } => Norm::lp(p),
        }
    }

    pub fn dual_norm(&self) -> Norm {
        self.norm().dual()
    }

    /// Strong-convexity modulus `sigma_w`.
    pub fn sigma(&self) -> f64 {
        match self.kind {
            MirrorKind::Euclidean | MirrorKind::Entropic => 1.0,
            MirrorKind::Pnorm { p } => p - 1.0,
        }
    }

    /// Lipschitz constant `G_w` of the link map.
    ///
    /// The entropic link is only Lipschitz away from the simplex boundary;
    /// with the coordinate floor the constant is `1 / ENTROPIC_FLOOR`. The
    /// p-norm link with `p < 2` is not Lipschitz near coordinate zeros.
    pub fn g_omega(&self) -> f64 {
        match self.kind {
            MirrorKind::Euclidean => 1.0,
            MirrorKind::Entropic => 1.0 / ENTROPIC_FLOOR,
            MirrorKind::Pnorm { p } if p == 2.0 => 1.0,
            MirrorKind::Pnorm { .. } => f64::INFINITY,
        }
    }

    fn check_domain(&self, x: &[f64], strict: bool, what: &str) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("{what} has non-finite entries")));
        }
        if self.kind == MirrorKind::Entropic {
            let bad = if strict {
                x.iter().any(|&v| v <= 0.0)
            } else {
                x.iter().any(|&v| v < 0.0)
            };
            if bad {
                return Err(Error::invalid(format!(
                    "{what} leaves the entropic domain (nonpositive coordinate)"
                )));
            }
        }
        Ok(())
    }

    pub fn omega(&self, x: &[f64]) -> f64 {
        match self.kind {
            MirrorKind::Euclidean => 0.5 * dot(x, x),
            MirrorKind::Entropic => x
                .iter()
                .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
                .sum(),
            MirrorKind::Pnorm { p } => {
                let n = Norm::lp(p).eval(x);
                0.5 * n * n
            }
        }
    }

    /// The gradient map of `w`.
    pub fn link(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            MirrorKind::Euclidean => x.to_vec(),
            MirrorKind::Entropic => x
                .iter()
                .map(|&v| 1.0 + v.max(ENTROPIC_FLOOR).ln())
                .collect(),
            MirrorKind::Pnorm { p } => pnorm_gradient(x, p),
        }
    }

    /// Inverse of [`MirrorMap::link`], i.e. the gradient of the conjugate.
    pub fn inverse_link(&self, v: &[f64]) -> Vec<f64> {
        match self.kind {
            MirrorKind::Euclidean => v.to_vec(),
            MirrorKind::Entropic => v.iter().map(|&s| (s - 1.0).exp()).collect(),
            MirrorKind::Pnorm { p } => {
                let q = Norm::lp(p).dual().exponent;
                pnorm_gradient(v, q)
            }
        }
    }

    /// `V(x, y) = w(x) - w(y) - <grad w(y), x - y>`.
    pub fn bregman(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::invalid("bregman: dimension mismatch"));
        }
        self.check_domain(x, false, "first argument")?;
        self.check_domain(y, true, "second argument")?;
        Ok(self.bregman_unchecked(x, y))
    }

    pub(crate) fn bregman_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let v = match self.kind {
            MirrorKind::Euclidean => {
                0.5 * x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            }
            // general form, reduces to KL on the simplex
            MirrorKind::Entropic => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| {
                    let b = b.max(ENTROPIC_FLOOR);
                    let xlx = if a > 0.0 { a * (a / b).ln() } else { 0.0 };
                    xlx - a + b
                })
                .sum(),
            MirrorKind::Pnorm { .. } => {
                let gy = self.link(y);
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                self.omega(x) - self.omega(y) - dot(&gy, &diff)
            }
        };
        v.max(0.0)
    }
}

/// Gradient of `1/2 ||x||_r^2`: `sign(x_s) |x_s|^{r-1} / ||x||_r^{r-2}`.
/// Zero at the origin by continuity.
fn pnorm_gradient(x: &[f64], r: f64) -> Vec<f64> {
    let n = Norm::lp(r).eval(x);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    // written as n * sign * (|x|/n)^{r-1} for numerical range
    x.iter()
        .map(|&v| sign(v) * n * (v.abs() / n).powf(r - 1.0))
        .collect()
}
