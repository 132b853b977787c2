//! Closed-form regret and disagreement bounds evaluated from realized
//! constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem and network constants entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub g_loss: f64,
    pub g_reg: f64,
    pub sigma: f64,
    pub g_omega: f64,
    pub diameter: f64,
    pub theta: f64,
    pub kappa: f64,
    pub nodes: usize,
    pub dim: usize,
    pub p_bar: f64,
    pub p_star: f64,
    pub outer_radius: f64,
    pub inner_radius: f64,
    /// `sum_i ||x_{i,1}||`
    pub initial_norm_sum: f64,
    /// `sum_i V(x*, x_{i,1})`; for the bandit bound, `V((1 - xi) x*, x_{i,1})`.
    pub initial_divergence_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feedback {
    FullInformation,
    Bandit { delta: f64, xi: f64 },
}

/// Coefficients of `C0/T + C1/(eta T) + C2 eta + C3/T sum sqrt(eta rho)
/// + C4/T sum sqrt(rho/eta) + C5 delta + C6 xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCoefficients(pub [f64; 7]);

impl BoundConstants {
    fn check(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::invalid(format!("kappa = {} must lie in (0, 1)", self.kappa)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        let finite = [
            self.g_loss,
            self.g_reg,
            self.theta,
            self.initial_norm_sum,
            self.initial_divergence_sum,
        ];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("bound constants must be finite and nonnegative"));
        }
        Ok(())
    }

    fn network_factor(&self) -> f64 {
        2.0 * self.theta / (1.0 - self.kappa)
    }

    pub fn coefficients(&self, feedback: Feedback) -> Result<BoundCoefficients> {
        self.check()?;
        let m = self.nodes as f64;
        let (gl, gr, s) = (self.g_loss, self.g_reg, self.sigma);
        let net = self.network_factor();
        let root = (2.0 / s).sqrt();
        let c0 = net * (gl + gr) * self.initial_norm_sum;
        let c1 = self.initial_divergence_sum;
        Ok(BoundCoefficients(match feedback {
            Feedback::FullInformation => [
                c0,
                c1,
                m / s * (0.5 * gl * gl + gr * (gl + gr) + net * (gl + gr).powi(2)),
                m * root * (gl + net * (gl + gr)),
                2.0 * m * root * self.g_omega * self.diameter,
                0.0,
                0.0,
            ],
            Feedback::Bandit { .. } => {
                let est = self.p_bar * self.p_star * self.dim as f64 * gl;
                [
                    c0,
                    c1,
                    m / s * (0.5 * est * est + gr * (est + gr) + net * (gl + gr) * (est + gr)),
                    m * root * (est + net * (gl + gr)),
                    4.0 * m * root * self.p_bar * self.g_omega * self.outer_radius,
                    2.0 * m * gl,
                    m * self.p_bar * (gl + gr) * self.outer_radius,
                ]
            }
        }))
    }
}

/// Right-hand side of the average-regret bound for horizon `rhos.len()`.
pub fn theorem_bounds(c: &BoundConstants, feedback: Feedback, eta: f64, rhos: &[f64]) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::invalid("step size must be positive"));
    }
    let horizon = rhos.len();
    if horizon == 0 {
        return Err(Error::invalid("need at least one round"));
    }
    if rhos.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::invalid("rho sequence must be finite and nonnegative"));
    }
    let k = c.coefficients(feedback)?.0;
    let t = horizon as f64;
    let mut bound = k[0] / t + k[1] / (eta * t) + k[2] * eta;
    if rhos.iter().any(|r| *r > 0.0) {
        if !k[4].is_finite() {
            return Err(Error::invalid(
                "inexact prox needs finite G_omega and diameter (bounded set and Lipschitz link)",
            ));
        }
        let s1: f64 = rhos.iter().map(|r| (eta * r).sqrt()).sum();
        let s2: f64 = rhos.iter().map(|r| (r / eta).sqrt()).sum();
        bound += k[3] / t * s1 + k[4] / t * s2;
    }
    if let Feedback::Bandit { delta, xi } = feedback {
        bound += k[5] * delta + k[6] * xi;
    }
    Ok(bound)
}

/// Aggregate disagreement bound
/// `sum_t sum_i ||x_{i,t} - x_{j,t}||` for any fixed `j`.
pub fn disagreement_bound(c: &BoundConstants, eta: f64, rhos: &[f64]) -> Result<f64> {
    c.check()?;
    let m = c.nodes as f64;
    let net = c.network_factor();
    let t = rhos.len() as f64;
    let s1: f64 = rhos.iter().map(|r| (eta * r).sqrt()).sum();
    Ok(net * c.initial_norm_sum
        + net * m / c.sigma * (c.g_loss + c.g_reg) * eta * t
        + net * m * (2.0 / c.sigma).sqrt() * s1)
}

/// `(G_l + G_r) eta / sigma`: the largest distance of an exact prox step.
pub fn step_bound(g_loss: f64, g_reg: f64, sigma: f64, eta: f64) -> f64 {
    (g_loss + g_reg) * eta / sigma
}

/// `sqrt(2 eta rho / sigma)`: distance of a `rho`-approximate prox from the
/// exact one.
pub fn approximation_bound(eta: f64, rho: f64, sigma: f64) -> f64 {
    (2.0 * eta * rho / sigma).sqrt()
}
