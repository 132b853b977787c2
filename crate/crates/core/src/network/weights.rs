//! Sparse row-stored weight matrices.

use crate::network::graph::Edge;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    m: usize,
    /// `rows[i]` holds `(j, W_ij)` for the nonzero entries, sorted by `j`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl WeightMatrix {
    pub fn identity(m: usize) -> Self {
        WeightMatrix {
            m,
            rows: (0..m).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn from_dense(w: &[Vec<f64>]) -> Self {
        let rows = w
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect())
            .collect();
        WeightMatrix { m: w.len(), rows }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|(k, _)| *k == j)
            .map_or(0.0, |(_, v)| *v)
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.m]; self.m];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn nonzeros_in_row(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    /// `x_i <- sum_j W_ij y_j`.
    pub fn mix(&self, y: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let d = y.first().map_or(0, Vec::len);
        self.rows
            .iter()
            .map(|row| {
                let mut acc = vec![0.0; d];
                for &(j, w) in row {
                    for (a, v) in acc.iter_mut().zip(&y[j]) {
                        *a += w * v;
                    }
                }
                acc
            })
            .collect()
    }

    /// `self * p` for a dense `p`.
    pub fn left_multiply(&self, p: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.mix(p)
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        let mut cols = vec![0.0; self.m];
        let mut worst = 0.0f64;
        for row in &self.rows {
            let mut s = 0.0;
            for &(j, v) in row {
                s += v;
                cols[j] += v;
            }
            worst = worst.max((s - 1.0).abs());
        }
        cols.iter().fold(worst, |w, c| w.max((c - 1.0).abs()))
    }

    pub fn min_positive(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, v)| *v)
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_entry(&self) -> f64 {
        self.rows.iter().flatten().map(|(_, v)| *v).fold(0.0f64, f64::min)
    }
}

/// `W_ij = 1 / (1 + max(deg_i, deg_j))` on edges, remainder on the diagonal.
pub fn metropolis_weights(m: usize, edges: &[Edge]) -> WeightMatrix {
    let mut deg = vec![0usize; m];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for &(a, b) in edges {
        let w = 1.0 / (1.0 + deg[a].max(deg[b]) as f64);
        rows[a].push((b, w));
        rows[b].push((a, w));
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let off: f64 = row.iter().map(|(_, v)| v).sum();
        row.push((i, 1.0 - off));
        row.sort_by_key(|(j, _)| *j);
    }
    WeightMatrix { m, rows }
}
