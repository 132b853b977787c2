use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::set::ConstraintSet;
use crate::problems::stream::LossStream;

/// What happens when a query point leaves the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    /// Infeasible queries are fatal.
    #[default]
    Strict,
    /// Infeasible queries are counted and answered anyway.
    Permissive,
}

/// Two-evaluation value oracle with query and violation counters.
///
/// Counters are atomic so nodes may query concurrently within a round.
#[derive(Debug)]
pub struct TwoPointOracle<'a> {
    stream: &'a LossStream,
    set: &'a ConstraintSet,
    mode: Feasibility,
    queries: AtomicUsize,
    violations: AtomicUsize,
}

impl<'a> TwoPointOracle<'a> {
    pub fn new(stream: &'a LossStream, set: &'a ConstraintSet, mode: Feasibility) -> Self {
        TwoPointOracle {
            stream,
            set,
            mode,
            queries: AtomicUsize::new(0),
            violations: AtomicUsize::new(0),
        }
    }

    /// `(l_{i,t}(x + delta u), l_{i,t}(x - delta u))`
    pub fn query(&self, i: usize, t: usize, x: &[f64], delta: f64, u: &[f64]) -> Result<(f64, f64)> {
        let plus: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + delta * b).collect();
        let minus: Vec<f64> = x.iter().zip(u).map(|(a, b)| a - delta * b).collect();
        for (q, label) in [(&plus, "x + delta u"), (&minus, "x - delta u")] {
            if !self.set.contains(q) {
                self.violations.fetch_add(1, Ordering::Relaxed);
                if self.mode == Feasibility::Strict {
                    return Err(Error::Infeasible {
                        round: t,
                        node: i,
                        detail: format!("query point {label} outside the feasible set"),
                    });
                }
            }
        }
        self.queries.fetch_add(2, Ordering::Relaxed);
        Ok((self.stream.value(i, t, &plus), self.stream.value(i, t, &minus)))
    }

    pub fn query_count(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn violation_count(&self) -> usize {
        self.violations.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::stream::{Datum, LossKind};

    fn linear(g: Vec<f64>) -> LossStream {
        LossStream::constant(LossKind::Linear, 1, 1, Datum { b: g, z: 0.5 }).unwrap()
    }

    #[test]
    fn zero_radius_gives_equal_values() {
        let s = linear(vec![1.0, -2.0]);
        let k = ConstraintSet::ball(1.0).unwrap();
        let o = TwoPointOracle::new(&s, &k, Feasibility::Strict);
        let (a, b) = o.query(0, 1, &[0.1, 0.2], 0.0, &[1.0, 0.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.query_count(), 2);
    }

    #[test]
    fn linear_difference() {
        let s = linear(vec![1.0, -2.0]);
        let k = ConstraintSet::ball(1.0).unwrap();
        let o = TwoPointOracle::new(&s, &k, Feasibility::Strict);
        let u = [0.6, 0.8];
        let (a, b) = o.query(0, 1, &[0.1, 0.2], 0.1, &u).unwrap();
        let expect = 2.0 * 0.1 * (0.6 - 1.6);
        assert!((a - b - expect).abs() < 1e-15);
    }

    #[test]
    fn infeasible_queries() {
        let s = linear(vec![1.0, 0.0]);
        let k = ConstraintSet::ball(1.0).unwrap();
        let strict = TwoPointOracle::new(&s, &k, Feasibility::Strict);
        assert!(matches!(
            strict.query(0, 1, &[0.95, 0.0], 0.1, &[1.0, 0.0]),
            Err(Error::Infeasible { .. })
        ));
        assert_eq!(strict.violation_count(), 1);

        let loose = TwoPointOracle::new(&s, &k, Feasibility::Permissive);
        assert!(loose.query(0, 1, &[0.95, 0.0], 0.1, &[1.0, 0.0]).is_ok());
        assert_eq!(loose.violation_count(), 1);
        assert_eq!(loose.query_count(), 2);
    }
}
