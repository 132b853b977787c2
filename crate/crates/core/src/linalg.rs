//! Small dense-vector helpers and the `l_r` norm family.

use serde::{Deserialize, Serialize};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `sign(v) * max(|v| - threshold, 0)`, with `sign(0) = 0`.
pub fn soft_threshold(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// An `l_r` norm with `r` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub exponent: f64,
}

impl Norm {
    pub const L1: Norm = Norm { exponent: 1.0 };
    pub const L2: Norm = Norm { exponent: 2.0 };
    pub const LINF: Norm = Norm {
        exponent: f64::INFINITY,
    };

    pub fn lp(exponent: f64) -> Self {
        assert!(exponent >= 1.0, "norm exponent must be >= 1");
        Norm { exponent }
    }

    /// Hoelder conjugate: `1/r + 1/r* = 1`.
    pub fn dual(&self) -> Norm {
        let r = self.exponent;
        let q = if r == 1.0 {
            f64::INFINITY
        } else if r.is_infinite() {
            1.0
        } else {
            r / (r - 1.0)
        };
        Norm { exponent: q }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = self.exponent;
        if r == 2.0 {
            norm2(x)
        } else if r == 1.0 {
            x.iter().map(|v| v.abs()).sum()
        } else if r.is_infinite() {
            x.iter().fold(0.0, |m, v| m.max(v.abs()))
        } else {
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                return 0.0;
            }
            // scaled to avoid overflow for large exponents
            peak * x.iter().map(|v| (v.abs() / peak).powf(r)).sum::<f64>().powf(1.0 / r)
        }
    }

    /// Smallest `c` with `||x|| <= c ||x||_2` on `R^d`.
    pub fn l2_equivalence(&self, d: usize) -> f64 {
        let inv = if self.exponent.is_infinite() {
            0.0
        } else {
            1.0 / self.exponent
        };
        (d as f64).powf((inv - 0.5).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_pairs() {
        assert_eq!(Norm::L2.dual(), Norm::L2);
        assert_eq!(Norm::L1.dual(), Norm::LINF);
        assert_eq!(Norm::LINF.dual(), Norm::L1);
        assert!((Norm::lp(1.5).dual().exponent - 3.0).abs() < 1e-12);
    }

    #[test]
    fn norm_values() {
        let x = [3.0, -4.0];
        assert_eq!(Norm::L2.eval(&x), 5.0);
        assert_eq!(Norm::L1.eval(&x), 7.0);
        assert_eq!(Norm::LINF.eval(&x), 4.0);
        let p = Norm::lp(3.0).eval(&x);
        assert!((p - (27.0f64 + 64.0).powf(1.0 / 3.0)).abs() < 1e-12);
    }

    // Brute-force maximization of ||x||_r / ||x||_2 over a fine sweep of
    // directions (d = 2) and random directions (d = 3, 4).
    #[test]
    fn l2_equivalence_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for &r in &[1.0, 1.25, 1.5, 2.0, 3.0, f64::INFINITY] {
            let norm = Norm { exponent: r };
            for d in 2..=4usize {
                let mut best = 0.0f64;
                if d == 2 {
                    for k in 0..=20_000 {
                        let th = k as f64 / 20_000.0 * std::f64::consts::FRAC_PI_2;
                        let v = [th.cos(), th.sin()];
                        best = best.max(norm.eval(&v));
                    }
                } else {
                    // the extremal directions are the all-equal and the axis
                    // vectors; sample around both plus uniformly
                    let mut cands: Vec<Vec<f64>> = vec![vec![1.0; d], {
                        let mut e = vec![0.0; d];
                        e[0] = 1.0;
                        e
                    }];
                    for _ in 0..20_000 {
                        cands.push((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
                    }
                    for v in cands {
                        let n = norm2(&v);
                        if n > 0.0 {
                            best = best.max(norm.eval(&v) / n);
                        }
                    }
                }
                let closed = norm.l2_equivalence(d);
                assert!(closed >= best - 1e-9, "r={r} d={d}: {closed} < {best}");
                assert!(closed - best < 1e-6, "r={r} d={d}: {closed} vs {best}");
            }
        }
    }
}
