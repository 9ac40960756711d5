//! Brute-force metric references and a zeta sampler.

use rand::Rng;
use svcnet::graph::Digraph;
use svcnet::rng;

pub fn random_digraph(case: u64, max_nodes: usize) -> Digraph {
    let mut r = rng::stream(case, "test/random-digraph", 0);
    let n = r.gen_range(1..=max_nodes);
    let p: f64 = r.gen_range(0.0..0.3);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Digraph::new(n, edges)
}

pub fn floyd_warshall(g: &Digraph) -> Vec<Vec<Option<u64>>> {
    let n = g.n_nodes();
    let mut d = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some(0);
    }
    for (u, v) in g.edges() {
        d[u][v] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn symmetric_adjacency(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n_nodes();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

/// `3 * triangles / triples` by enumerating node triples.
pub fn clustering_oracle(g: &Digraph) -> Option<f64> {
    let adj = symmetric_adjacency(g);
    let n = g.n_nodes();
    let (mut closed, mut connected) = (0u64, 0u64);
    for centre in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                if a != centre && b != centre && adj[centre][a] && adj[centre][b] {
                    connected += 1;
                    if adj[a][b] {
                        closed += 1;
                    }
                }
            }
        }
    }
    (connected > 0).then(|| closed as f64 / connected as f64)
}

/// Textbook Pearson correlation over the list of oriented edge endpoints.
pub fn assortativity_oracle(g: &Digraph) -> Option<f64> {
    let adj = symmetric_adjacency(g);
    let n = g.n_nodes();
    let deg: Vec<f64> = adj.iter().map(|row| row.iter().filter(|&&x| x).count() as f64).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if adj[u][v] {
                xs.push(deg[u]);
                ys.push(deg[v]);
            }
        }
    }
    if xs.is_empty() {
        return None;
    }
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (vx > 1e-12 && vy > 1e-12).then(|| cov / (vx * vy).sqrt())
}

/// Zeta(a) variate by rejection (Devroye, Non-Uniform Random Variate Generation, X.6).
pub fn zeta_variate<R: Rng>(a: f64, rng: &mut R) -> u64 {
    let b = 2f64.powf(a - 1.0);
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let v: f64 = rng.gen();
        let x = u.powf(-1.0 / (a - 1.0)).floor();
        if !x.is_finite() || x > 1e15 {
            continue;
        }
        let t = (1.0 + 1.0 / x).powf(a - 1.0);
        if v * x * (t - 1.0) / (b - 1.0) <= t / b {
            return x as u64;
        }
    }
}
