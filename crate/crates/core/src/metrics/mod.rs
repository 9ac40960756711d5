//! Topology metrics: density, distances, clustering, assortativity,
//! Erdős-Rényi baselines and degree distributions.
//!
//! Distances follow edge direction. Clustering and assortativity are
//! measured on the undirected projection.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Digraph, UndirectedGraph};
use crate::rng;

mod degree;
pub mod powerlaw;

pub use degree::{
    cumulative_degree_series, degree_histogram, degrees, fit_degree_distribution, series_csv, DegreeDistributionFit,
    DegreeKind,
};
pub use powerlaw::{fit_exponential, fit_power_law, ExponentialFit, PowerLawFit, Xmin};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("density needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("no ordered pair of distinct nodes is connected by a directed path")]
    NoReachablePairs,
    #[error("no connected triple in the undirected projection")]
    NoConnectedTriples,
    #[error("endpoint degrees have zero variance")]
    ZeroDegreeVariance,
    #[error("graph has no edges")]
    NoEdges,
    #[error("cannot place {m} distinct directed edges on {n} nodes")]
    InfeasibleEdgeCount { n: usize, m: usize },
    #[error("at least one sample is required")]
    NoSamples,
    #[error("empty network")]
    EmptyNetwork,
    #[error("need at least {need} observations in the fitted tail, have {have}")]
    InsufficientTail { have: usize, need: usize },
    #[error("degenerate fit: every tail value is identical")]
    DegenerateFit,
}

/// `m / (n (n - 1))` for a directed simple graph.
pub fn density_of(n: usize, m: usize) -> Result<f64, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewNodes(n));
    }
    Ok(m as f64 / (n as f64 * (n - 1) as f64))
}

pub fn density(g: &Digraph) -> Result<f64, MetricError> {
    density_of(g.n_nodes(), g.n_edges())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceStats {
    /// Mean shortest-path length over reachable ordered pairs.
    pub average: f64,
    pub diameter: usize,
    pub reachable_pairs: u64,
    pub total_length: u64,
}

fn bfs_from(g: &Digraph, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) -> (u64, u64, usize) {
    dist.fill(usize::MAX);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    let (mut sum, mut count, mut max) = (0u64, 0u64, 0usize);
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        for &v in g.successors(u) {
            if dist[v] == usize::MAX {
                dist[v] = d;
                sum += d as u64;
                count += 1;
                max = max.max(d);
                queue.push_back(v);
            }
        }
    }
    (sum, count, max)
}

/// Directed shortest-path statistics by one BFS per source.
pub fn distance_stats(g: &Digraph) -> Result<DistanceStats, MetricError> {
    let n = g.n_nodes();
    let (sum, count, max) = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], VecDeque::new()),
            |(dist, queue), s| bfs_from(g, s, dist, queue),
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)));
    if count == 0 {
        return Err(MetricError::NoReachablePairs);
    }
    Ok(DistanceStats {
        average: sum as f64 / count as f64,
        diameter: max,
        reachable_pairs: count,
        total_length: sum,
    })
}

pub fn avg_distance(g: &Digraph) -> Result<f64, MetricError> {
    distance_stats(g).map(|s| s.average)
}

pub fn diameter(g: &Digraph) -> Result<usize, MetricError> {
    distance_stats(g).map(|s| s.diameter)
}

/// `(triangles, connected triples)` of an undirected graph.
pub fn triangles_and_triples(g: &UndirectedGraph) -> (u64, u64) {
    let n = g.n_nodes();
    let mut mark = vec![false; n];
    let mut triangles = 0u64;
    let mut triples = 0u64;
    for u in 0..n {
        let d = g.degree(u) as u64;
        triples += d * d.saturating_sub(1) / 2;
        for &v in g.neighbors(u) {
            mark[v] = true;
        }
        for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
            triangles += g
                .neighbors(v)
                .iter()
                .filter(|&&w| w > v && mark[w])
                .count() as u64;
        }
        for &v in g.neighbors(u) {
            mark[v] = false;
        }
    }
    (triangles, triples)
}

/// Global transitivity `3 * triangles / connected triples` of the undirected projection.
pub fn clustering(g: &Digraph) -> Result<f64, MetricError> {
    clustering_undirected(&g.undirected())
}

pub fn clustering_undirected(g: &UndirectedGraph) -> Result<f64, MetricError> {
    let (triangles, triples) = triangles_and_triples(g);
    if triples == 0 {
        return Err(MetricError::NoConnectedTriples);
    }
    Ok(3.0 * triangles as f64 / triples as f64)
}

/// Degree assortativity: Pearson correlation of endpoint degrees over the
/// undirected projection's edges, each edge counted in both orientations.
pub fn assortativity(g: &Digraph) -> Result<f64, MetricError> {
    assortativity_undirected(&g.undirected())
}

pub fn assortativity_undirected(g: &UndirectedGraph) -> Result<f64, MetricError> {
    if g.n_edges() == 0 {
        return Err(MetricError::NoEdges);
    }
    // exact integer moments over the 2m oriented samples
    let (mut s1, mut s2, mut sxy) = (0i128, 0i128, 0i128);
    for (u, v) in g.edges() {
        let (a, b) = (g.degree(u) as i128, g.degree(v) as i128);
        s1 += a + b;
        s2 += a * a + b * b;
        sxy += 2 * a * b;
    }
    let samples = 2 * g.n_edges() as i128;
    let num = samples * sxy - s1 * s1;
    let den = samples * s2 - s1 * s1;
    if den == 0 {
        return Err(MetricError::ZeroDegreeVariance);
    }
    Ok(num as f64 / den as f64)
}

/// Uniform directed G(n, m): `m` distinct ordered pairs without self-loops.
pub fn sample_gnm<R: rand::Rng>(n: usize, m: usize, rng: &mut R) -> Result<Digraph, MetricError> {
    let slots = n.saturating_mul(n.saturating_sub(1));
    if m > slots {
        return Err(MetricError::InfeasibleEdgeCount { n, m });
    }
    let picks = rand::seq::index::sample(rng, slots, m);
    let edges: Vec<(usize, usize)> = picks
        .into_iter()
        .map(|p| {
            let u = p / (n - 1);
            let r = p % (n - 1);
            (u, if r >= u { r + 1 } else { r })
        })
        .collect();
    Ok(Digraph::new(n, edges))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErBaseline {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    /// Mean average distance over samples with a reachable pair.
    pub l_er: f64,
    pub l_samples: usize,
    /// Mean clustering over samples with a connected triple.
    pub c_er: Option<f64>,
    pub c_samples: usize,
}

/// Average distance and clustering of `samples` random G(n, m) digraphs.
///
/// Sample `i` draws from its own stream, so results do not depend on
/// scheduling.
pub fn er_baseline(n: usize, m: usize, samples: usize, seed: u64) -> Result<ErBaseline, MetricError> {
    if samples == 0 {
        return Err(MetricError::NoSamples);
    }
    if m > n.saturating_mul(n.saturating_sub(1)) {
        return Err(MetricError::InfeasibleEdgeCount { n, m });
    }
    let per_sample: Vec<(Option<f64>, Option<f64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, "er-baseline", i as u64);
            let g = sample_gnm(n, m, &mut r).expect("feasibility checked");
            (avg_distance(&g).ok(), clustering(&g).ok())
        })
        .collect();
    let ls: Vec<f64> = per_sample.iter().filter_map(|s| s.0).collect();
    let cs: Vec<f64> = per_sample.iter().filter_map(|s| s.1).collect();
    if ls.is_empty() {
        return Err(MetricError::NoReachablePairs);
    }
    Ok(ErBaseline {
        n,
        m,
        samples,
        seed,
        l_er: ls.iter().sum::<f64>() / ls.len() as f64,
        l_samples: ls.len(),
        c_er: (!cs.is_empty()).then(|| cs.iter().sum::<f64>() / cs.len() as f64),
        c_samples: cs.len(),
    })
}

/// Metric suite of one network; undefined values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: Option<f64>,
    pub avg_distance: Option<f64>,
    pub diameter: Option<usize>,
    pub clustering: Option<f64>,
    pub assortativity: Option<f64>,
    pub l_er: Option<f64>,
    pub c_er: Option<f64>,
    pub l_ratio: Option<f64>,
    pub c_ratio: Option<f64>,
    pub er_samples: usize,
    pub er_l_samples: usize,
    pub er_c_samples: usize,
    pub seed: u64,
}

pub fn topology_report(g: &Digraph, er_samples: usize, seed: u64) -> TopologyReport {
    let distances = distance_stats(g).ok();
    let clustering = clustering(g).ok();
    let er = er_baseline(g.n_nodes(), g.n_edges(), er_samples, seed).ok();
    let l_er = er.as_ref().map(|e| e.l_er);
    let c_er = er.as_ref().and_then(|e| e.c_er);
    let ratio = |x: Option<f64>, base: Option<f64>| match (x, base) {
        (Some(x), Some(b)) if b > 0.0 => Some(x / b),
        _ => None,
    };
    let avg = distances.map(|d| d.average);
    TopologyReport {
        n_nodes: g.n_nodes(),
        n_edges: g.n_edges(),
        density: density(g).ok(),
        avg_distance: avg,
        diameter: distances.map(|d| d.diameter),
        clustering,
        assortativity: assortativity(g).ok(),
        l_er,
        c_er,
        l_ratio: ratio(avg, l_er),
        c_ratio: ratio(clustering, c_er),
        er_samples,
        er_l_samples: er.as_ref().map_or(0, |e| e.l_samples),
        er_c_samples: er.as_ref().map_or(0, |e| e.c_samples),
        seed,
    }
}
