//! Undirected edge sets and their generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{substream, Domain};

/// Undirected edge, stored with `i < j`.
pub type Edge = (usize, usize);

pub fn normalize(edges: &[Edge], m: usize) -> Result<Vec<Edge>> {
    let mut out = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        if a == b {
            return Err(Error::invalid(format!("self-loop at node {a}")));
        }
        if a >= m || b >= m {
            return Err(Error::invalid(format!("edge ({a}, {b}) out of range for m = {m}")));
        }
        out.push((a.min(b), a.max(b)));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn ring(m: usize) -> Vec<Edge> {
    match m {
        0 | 1 => vec![],
        2 => vec![(0, 1)],
        _ => {
            let mut e: Vec<Edge> = (0..m).map(|i| (i, (i + 1) % m)).map(|(a, b)| (a.min(b), a.max(b))).collect();
            e.sort_unstable();
            e
        }
    }
}

pub fn complete(m: usize) -> Vec<Edge> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(m: usize) -> Self {
        UnionFind((0..m).collect())
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

/// Whether the union of the given edge sets connects all `m` nodes.
pub fn is_connected<'e>(m: usize, edge_sets: impl IntoIterator<Item = &'e [Edge]>) -> bool {
    if m <= 1 {
        return true;
    }
    let mut uf = UnionFind::new(m);
    let mut components = m;
    for set in edge_sets {
        for &(a, b) in set {
            if uf.union(a, b) {
                components -= 1;
            }
        }
    }
    components == 1
}

/// Erdős–Rényi graph with edge probability `p`, resampled until connected.
pub fn erdos_renyi_connected(m: usize, p: f64, seed: u64) -> Result<Vec<Edge>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::config(format!("edge probability {p} outside (0, 1]")));
    }
    for attempt in 0..100_000u64 {
        let mut rng = substream(seed, Domain::Graph, attempt, 0);
        let edges: Vec<Edge> = complete(m).into_iter().filter(|_| rng.gen::<f64>() < p).collect();
        if is_connected(m, [edges.as_slice()]) {
            return Ok(edges);
        }
    }
    Err(Error::config(format!("no connected graph found for m = {m}, p = {p}")))
}

/// Seeded split of `edges` into two halves (first gets the extra edge).
pub fn split_halves(edges: &[Edge], seed: u64) -> (Vec<Edge>, Vec<Edge>) {
    let mut shuffled = edges.to_vec();
    shuffled.shuffle(&mut substream(seed, Domain::Graph, u64::MAX, 1));
    let cut = shuffled.len().div_ceil(2);
    let mut second = shuffled.split_off(cut);
    shuffled.sort_unstable();
    second.sort_unstable();
    (shuffled, second)
}
