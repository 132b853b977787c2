use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rng::{substream, Domain};

/// Shape of each `l_{i,t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    /// `1/2 (<b, x> - z)^2 + l2_weight / 2 ||x||^2`
    Regression { l2_weight: f64 },
    /// `<b, x> + z`
    Linear,
}

/// Features `b` and response `z` for one `(node, round)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Datum {
    pub b: Vec<f64>,
    pub z: f64,
}

/// The planted model behind generated regression data.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub x0: Vec<f64>,
    pub noise_std: f64,
}

impl GroundTruth {
    /// Ones on the first `floor(d/2)` coordinates, unit Gaussian noise.
    pub fn planted(d: usize) -> Self {
        GroundTruth {
            x0: (0..d).map(|s| if s < d / 2 { 1.0 } else { 0.0 }).collect(),
            noise_std: 1.0,
        }
    }
}

/// Per-node, per-round losses, stored round-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LossStream {
    kind: LossKind,
    m: usize,
    horizon: usize,
    d: usize,
    data: Vec<Datum>,
}

impl LossStream {
    /// `data[(t - 1) * m + i]` is the datum of node `i` at round `t`.
    pub fn from_data(kind: LossKind, m: usize, horizon: usize, data: Vec<Datum>) -> Result<Self> {
        if m == 0 || horizon == 0 {
            return Err(Error::invalid("stream needs m, T >= 1"));
        }
        if data.len() != m * horizon {
            return Err(Error::invalid(format!(
                "expected {} data points, got {}",
                m * horizon,
                data.len()
            )));
        }
        let d = data[0].b.len();
        if d == 0 || data.iter().any(|x| x.b.len() != d) {
            return Err(Error::invalid("feature vectors must share a positive dimension"));
        }
        if data.iter().any(|x| !x.z.is_finite() || x.b.iter().any(|v| !v.is_finite())) {
            return Err(Error::invalid("non-finite stream data"));
        }
        if let LossKind::Regression { l2_weight } = kind {
            if !(l2_weight >= 0.0) || !l2_weight.is_finite() {
                return Err(Error::invalid("l2 weight must be finite and nonnegative"));
            }
        }
        Ok(LossStream {
            kind,
            m,
            horizon,
            d,
            data,
        })
    }

    /// The same datum at every node and round.
    pub fn constant(kind: LossKind, m: usize, horizon: usize, datum: Datum) -> Result<Self> {
        Self::from_data(kind, m, horizon, vec![datum; m * horizon])
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn nodes(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn l2_weight(&self) -> f64 {
        match self.kind {
            LossKind::Regression { l2_weight } => l2_weight,
            LossKind::Linear => 0.0,
        }
    }

    pub fn data(&self) -> &[Datum] {
        &self.data
    }

    /// Datum of node `i` (0-based) at round `t` (1-based).
    pub fn datum(&self, i: usize, t: usize) -> &Datum {
        &self.data[(t - 1) * self.m + i]
    }

    /// The stream restricted to its first `horizon` rounds.
    pub fn truncated(&self, horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon > self.horizon {
            return Err(Error::invalid(format!("cannot truncate to {horizon} rounds")));
        }
        Self::from_data(self.kind, self.m, horizon, self.data[..horizon * self.m].to_vec())
    }

    pub fn value(&self, i: usize, t: usize, x: &[f64]) -> f64 {
        let dt = self.datum(i, t);
        match self.kind {
            LossKind::Regression { l2_weight } => {
                let r = dot(&dt.b, x) - dt.z;
                0.5 * r * r + 0.5 * l2_weight * dot(x, x)
            }
            LossKind::Linear => dot(&dt.b, x) + dt.z,
        }
    }

    pub fn gradient(&self, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
        let dt = self.datum(i, t);
        match self.kind {
            LossKind::Regression { l2_weight } => {
                let r = dot(&dt.b, x) - dt.z;
                dt.b.iter().zip(x).map(|(b, xv)| r * b + l2_weight * xv).collect()
            }
            LossKind::Linear => dt.b.clone(),
        }
    }

    /// `sum_j l_{j,t}(x)`
    pub fn network_value(&self, t: usize, x: &[f64]) -> f64 {
        (0..self.m).map(|j| self.value(j, t, x)).sum()
    }
}

/// Regression stream with uniform `(-1, 1)` features and planted responses.
pub fn generate_regression_stream(
    m: usize,
    d: usize,
    horizon: usize,
    l2_weight: f64,
    seed: u64,
) -> Result<LossStream> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let truth = GroundTruth::planted(d);
    let mut data = Vec::with_capacity(m * horizon);
    for t in 1..=horizon {
        for i in 0..m {
            let mut rng = substream(seed, Domain::Data, i as u64, t as u64);
            let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let eps: f64 = rng.sample(StandardNormal);
            let z = dot(&b, &truth.x0) + truth.noise_std * eps;
            data.push(Datum { b, z });
        }
    }
    LossStream::from_data(LossKind::Regression { l2_weight }, m, horizon, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn central_difference(s: &LossStream, i: usize, t: usize, x: &[f64]) -> Vec<f64> {
        let h = 1e-5;
        (0..x.len())
            .map(|k| {
                let mut p = x.to_vec();
                let mut q = x.to_vec();
                p[k] += h;
                q[k] -= h;
                (s.value(i, t, &p) - s.value(i, t, &q)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn planted_truth() {
        assert_eq!(GroundTruth::planted(5).x0, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(GroundTruth::planted(1).x0, vec![0.0]);
    }

    #[test]
    fn gradient_formula() {
        let s = generate_regression_stream(3, 10, 4, 1.0, 1).unwrap();
        let x: Vec<f64> = (0..10).map(|k| 0.05 * k as f64).collect();
        let dt = s.datum(2, 3);
        let r: f64 = dt.b.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - dt.z;
        let expect: Vec<f64> = dt.b.iter().zip(&x).map(|(b, xv)| r * b + xv).collect();
        assert_eq!(s.gradient(2, 3, &x), expect);
    }

    #[test]
    fn zero_data_gives_zero_gradient() {
        let s = LossStream::constant(
            LossKind::Regression { l2_weight: 0.0 },
            1,
            1,
            Datum {
                b: vec![0.0; 3],
                z: 0.0,
            },
        )
        .unwrap();
        assert_eq!(s.gradient(0, 1, &[0.3, -2.0, 5.0]), vec![0.0; 3]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = generate_regression_stream(2, 6, 3, 1.0, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.4..0.4)).collect();
            for t in 1..=3 {
                let g = s.gradient(1, t, &x);
                let fd = central_difference(&s, 1, t, &x);
                for (a, b) in g.iter().zip(&fd) {
                    assert!((a - b).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn deterministic_and_prefix_stable() {
        let a = generate_regression_stream(4, 5, 10, 1.0, 3).unwrap();
        let b = generate_regression_stream(4, 5, 10, 1.0, 3).unwrap();
        assert_eq!(a, b);
        // more rounds and more nodes leave existing draws untouched
        let c = generate_regression_stream(6, 5, 20, 1.0, 3).unwrap();
        assert_eq!(a.datum(3, 7), c.datum(3, 7));
        assert_eq!(a.truncated(4).unwrap().data(), &a.data()[..16]);
    }

    #[test]
    fn rejects_ragged_data() {
        let data = vec![
            Datum { b: vec![1.0], z: 0.0 },
            Datum {
                b: vec![1.0, 2.0],
                z: 0.0,
            },
        ];
        assert!(LossStream::from_data(LossKind::Linear, 2, 1, data).is_err());
    }
}
