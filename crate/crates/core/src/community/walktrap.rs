//! Walktrap agglomerative clustering (Pons and Latapy, 2005).
//!
//! Nodes are compared through the distribution of a length-`t` random walk
//! started from them; as in the original algorithm every node carries a
//! loop, so the walk is aperiodic. Adjacent communities are merged greedily by the
//! smallest increase of the mean squared walk distance, and the dendrogram
//! is cut where modularity peaks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rayon::prelude::*;
use serde::Serialize;

use super::{modularity_from_sums, CommunityError, Partition};
use crate::graph::UndirectedGraph;

pub const DEFAULT_WALK_LENGTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Id of the new community; singletons are `0..n`, merges continue from `n`.
    pub merged: usize,
    pub delta_sigma: f64,
    /// Modularity after this merge.
    pub modularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub n_nodes: usize,
    /// Modularity of the all-singletons partition.
    pub initial_modularity: f64,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Community id of every node after the first `steps` merges.
    pub fn cut(&self, steps: usize) -> Vec<usize> {
        let mut label: Vec<usize> = (0..self.n_nodes).collect();
        for m in &self.merges[..steps.min(self.merges.len())] {
            for l in label.iter_mut() {
                if *l == m.left || *l == m.right {
                    *l = m.merged;
                }
            }
        }
        label
    }

    pub fn modularity_at(&self, steps: usize) -> f64 {
        match steps {
            0 => self.initial_modularity,
            s => self.merges[s - 1].modularity,
        }
    }

    /// Earliest step with the highest modularity.
    pub fn best_step(&self) -> usize {
        let mut best = 0;
        for s in 1..=self.merges.len() {
            if self.modularity_at(s) > self.modularity_at(best) {
                best = s;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalktrapResult {
    pub walk_length: usize,
    pub best_step: usize,
    pub partition: Partition,
    pub dendrogram: Dendrogram,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    delta_sigma: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // reversed: BinaryHeap pops the smallest (delta_sigma, a, b)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delta_sigma
            .total_cmp(&self.delta_sigma)
            .then(other.a.cmp(&self.a))
            .then(other.b.cmp(&self.b))
    }
}

/// `P^t` row of `source` for the walk on `g` plus one loop per node.
fn walk_distribution(g: &UndirectedGraph, source: usize, t: usize) -> Vec<f64> {
    let n = g.n_nodes();
    let mut p = vec![0.0; n];
    p[source] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..t {
        next.fill(0.0);
        for (j, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let share = mass / (g.degree(j) + 1) as f64;
            next[j] += share;
            for &k in g.neighbors(j) {
                next[k] += share;
            }
        }
        std::mem::swap(&mut p, &mut next);
    }
    p
}

struct State<'g> {
    g: &'g UndirectedGraph,
    inv_degree: Vec<f64>,
    prob: Vec<Vec<f64>>,
    size: Vec<usize>,
    internal: Vec<u64>,
    degree: Vec<u64>,
    neighbors: Vec<BTreeMap<usize, u64>>,
    alive: Vec<bool>,
}

impl State<'_> {
    fn delta_sigma(&self, a: usize, b: usize) -> f64 {
        let r2: f64 = self.prob[a]
            .iter()
            .zip(&self.prob[b])
            .zip(&self.inv_degree)
            .map(|((x, y), w)| (x - y) * (x - y) * w)
            .sum();
        let (sa, sb) = (self.size[a] as f64, self.size[b] as f64);
        sa * sb / (sa + sb) * r2 / self.g.n_nodes() as f64
    }

    fn merge(&mut self, a: usize, b: usize) -> (usize, u64) {
        let c = self.size.len();
        let (sa, sb) = (self.size[a], self.size[b]);
        let total = (sa + sb) as f64;
        let pa = std::mem::take(&mut self.prob[a]);
        let pb = std::mem::take(&mut self.prob[b]);
        let merged: Vec<f64> = pa
            .iter()
            .zip(&pb)
            .map(|(x, y)| (sa as f64 * x + sb as f64 * y) / total)
            .collect();
        let between = self.neighbors[a].get(&b).copied().unwrap_or(0);
        let mut adjacent = std::mem::take(&mut self.neighbors[a]);
        for (x, w) in std::mem::take(&mut self.neighbors[b]) {
            *adjacent.entry(x).or_default() += w;
        }
        adjacent.remove(&a);
        adjacent.remove(&b);
        for (&x, &w) in &adjacent {
            let nx = &mut self.neighbors[x];
            nx.remove(&a);
            nx.remove(&b);
            nx.insert(c, w);
        }
        self.prob.push(merged);
        self.size.push(sa + sb);
        self.internal.push(self.internal[a] + self.internal[b] + between);
        self.degree.push(self.degree[a] + self.degree[b]);
        self.neighbors.push(adjacent);
        self.alive[a] = false;
        self.alive[b] = false;
        self.alive.push(true);
        (c, between)
    }
}

/// Walktrap on the undirected graph `g` with walk length `t`.
///
/// Only adjacent communities merge, so separate components are clustered
/// independently and isolated nodes stay singletons.
pub fn walktrap(g: &UndirectedGraph, t: usize) -> Result<WalktrapResult, CommunityError> {
    let n = g.n_nodes();
    if n == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    if t == 0 {
        return Err(CommunityError::InvalidWalkLength);
    }
    let m = g.n_edges() as u64;
    if m == 0 {
        return Err(CommunityError::NoEdges);
    }
    let prob: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| if g.degree(u) == 0 { Vec::new() } else { walk_distribution(g, u, t) })
        .collect();
    let mut state = State {
        g,
        inv_degree: (0..n).map(|u| 1.0 / (g.degree(u) + 1) as f64).collect(),
        prob,
        size: vec![1; n],
        internal: vec![0; n],
        degree: (0..n).map(|u| g.degree(u) as u64).collect(),
        neighbors: (0..n).map(|u| g.neighbors(u).iter().map(|&v| (v, 1)).collect()).collect(),
        alive: vec![true; n],
    };

    let mut heap = BinaryHeap::new();
    for (a, b) in g.edges() {
        heap.push(Candidate {
            delta_sigma: state.delta_sigma(a, b),
            a,
            b,
        });
    }

    let mut internal_sum = 0u64;
    let mut degree_squares: u128 = state.degree.iter().map(|&d| d as u128 * d as u128).sum();
    let initial_modularity = modularity_from_sums(0, degree_squares, m);
    let mut merges = Vec::with_capacity(n - 1);
    while let Some(Candidate { delta_sigma, a, b }) = heap.pop() {
        if !state.alive[a] || !state.alive[b] {
            continue;
        }
        let (da, db) = (state.degree[a] as u128, state.degree[b] as u128);
        let (c, between) = state.merge(a, b);
        internal_sum += between;
        degree_squares += 2 * da * db;
        merges.push(Merge {
            left: a,
            right: b,
            merged: c,
            delta_sigma,
            modularity: modularity_from_sums(internal_sum, degree_squares, m),
        });
        let adjacent: Vec<usize> = state.neighbors[c].keys().copied().collect();
        for x in adjacent {
            heap.push(Candidate {
                delta_sigma: state.delta_sigma(x, c),
                a: x,
                b: c,
            });
        }
    }

    let dendrogram = Dendrogram {
        n_nodes: n,
        initial_modularity,
        merges,
    };
    let best_step = dendrogram.best_step();
    let partition = Partition::with_modularity(&dendrogram.cut(best_step), dendrogram.modularity_at(best_step));
    Ok(WalktrapResult {
        walk_length: t,
        best_step,
        partition,
        dendrogram,
    })
}
