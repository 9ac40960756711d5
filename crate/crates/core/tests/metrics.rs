use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use svcnet::graph::Digraph;
use svcnet::metrics::{
    assortativity, avg_distance, clustering, cumulative_degree_series, degrees, density, density_of, diameter,
    distance_stats, er_baseline, fit_degree_distribution, fit_power_law, sample_gnm, DegreeKind, MetricError, Xmin,
};
use svcnet::rng;

fn random_digraph(case: u64, max_nodes: usize) -> Digraph {
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

fn floyd_warshall(g: &Digraph) -> Vec<Vec<Option<u64>>> {
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

fn symmetric_adjacency(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n_nodes();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

/// `3 * triangles / triples` by enumerating node triples.
fn clustering_oracle(g: &Digraph) -> Option<f64> {
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
fn assortativity_oracle(g: &Digraph) -> Option<f64> {
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

#[test]
fn table2_densities() {
    for (n, m, want) in [(341, 3426, 0.0295), (369, 2446, 0.0180), (329, 3864, 0.0358), (404, 5832, 0.0358)] {
        let got = density_of(n, m).unwrap();
        assert!((got - want).abs() <= 5e-5, "density({n}, {m}) = {got}");
    }
}

#[test]
fn distances_match_floyd_warshall() {
    let mut checked = 0;
    for case in 0..100 {
        let g = random_digraph(case, 40);
        let d = floyd_warshall(&g);
        let lengths: Vec<u64> = (0..g.n_nodes())
            .flat_map(|u| (0..g.n_nodes()).filter(move |&v| v != u).map(move |v| (u, v)))
            .filter_map(|(u, v)| d[u][v])
            .collect();
        if lengths.is_empty() {
            assert_eq!(distance_stats(&g), Err(MetricError::NoReachablePairs));
            continue;
        }
        checked += 1;
        let stats = distance_stats(&g).unwrap();
        assert_eq!(stats.reachable_pairs, lengths.len() as u64);
        assert_eq!(stats.total_length, lengths.iter().sum::<u64>());
        assert_eq!(stats.average, lengths.iter().sum::<u64>() as f64 / lengths.len() as f64);
        assert_eq!(stats.diameter as u64, *lengths.iter().max().unwrap());
        assert!(stats.average <= stats.diameter as f64);
    }
    assert!(checked > 80);
}

#[test]
fn clustering_and_assortativity_match_oracles() {
    for case in 0..100 {
        let g = random_digraph(1000 + case, 40);
        match clustering_oracle(&g) {
            Some(c) => {
                let got = clustering(&g).unwrap();
                assert!((got - c).abs() < 1e-12, "case {case}: {got} vs {c}");
                assert!((0.0..=1.0).contains(&got));
            }
            None => assert!(clustering(&g).is_err()),
        }
        match assortativity_oracle(&g) {
            Some(r) => {
                let got = assortativity(&g).unwrap();
                assert!((got - r).abs() < 1e-9, "case {case}: {got} vs {r}");
            }
            None => assert!(assortativity(&g).is_err()),
        }
    }
}

#[test]
fn cumulative_series_matches_histogram_oracle() {
    for case in 0..50 {
        let g = random_digraph(2000 + case, 40);
        for which in [DegreeKind::In, DegreeKind::Out, DegreeKind::Total] {
            let ks = degrees(&g, which);
            let mut hist = BTreeMap::new();
            for &k in &ks {
                *hist.entry(k).or_insert(0usize) += 1;
            }
            let want: Vec<(u64, f64)> = hist
                .keys()
                .map(|&k| (k, ks.iter().filter(|&&x| x >= k).count() as f64 / ks.len() as f64))
                .collect();
            let got = cumulative_degree_series(&ks).unwrap();
            assert_eq!(got.len(), want.len());
            for ((k1, p1), (k2, p2)) in got.iter().zip(&want) {
                assert_eq!(k1, k2);
                assert!((p1 - p2).abs() < 1e-12);
            }
            assert_eq!(got[0].1, 1.0);
            assert!(got.windows(2).all(|w| w[1].1 <= w[0].1));
        }
    }
}

#[test]
fn er_baseline_near_closed_form() {
    let er = er_baseline(341, 3426, 32, 7).unwrap();
    let approx = 341f64.ln() / (3426.0f64 / 341.0).ln();
    assert!((approx - 2.53).abs() < 0.01);
    assert!((er.l_er - approx).abs() / approx < 0.15, "L_ER = {}", er.l_er);
    assert_eq!(er.l_samples, 32);
}

#[test]
fn er_generated_graph_is_self_consistent() {
    let mut r = rng::stream(11, "test/er-self", 0);
    let g = sample_gnm(300, 3000, &mut r).unwrap();
    let er = er_baseline(300, 3000, 32, 12).unwrap();
    let ratio = avg_distance(&g).unwrap() / er.l_er;
    assert!((0.85..=1.15).contains(&ratio), "L/L_ER = {ratio}");
}

#[test]
fn density_grows_with_edges() {
    let g1 = Digraph::new(10, [(0, 1), (1, 2)]);
    let g2 = Digraph::new(10, [(0, 1), (1, 2), (2, 3)]);
    assert!(density(&g2).unwrap() > density(&g1).unwrap());
    assert_eq!(diameter(&g2).unwrap(), 3);
}

/// Zeta(a) variate by rejection (Devroye, Non-Uniform Random Variate Generation, X.6).
fn zeta_variate<R: Rng>(a: f64, rng: &mut R) -> u64 {
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

#[test]
fn power_law_exponent_recovery() {
    for (i, gamma) in [2.0, 2.5, 3.0].into_iter().enumerate() {
        let mut r = rng::stream(21, "test/zeta-sample", i as u64);
        let data: Vec<u64> = (0..10_000).map(|_| zeta_variate(gamma, &mut r)).collect();
        let fit = fit_power_law(&data, Xmin::Fixed(1), 0, 0).unwrap();
        assert!((fit.gamma - gamma).abs() <= 0.1, "gamma {gamma}: estimated {}", fit.gamma);
        assert_eq!(fit.n_tail, 10_000);
        assert!(fit.ks_p_value.is_none());
    }
}

/// Under the null the bootstrap p-value is uniform, so about 90% of
/// model-generated samples reach p >= 0.1. A binomial band over 100 trials
/// keeps the check robust to the seed.
#[test]
fn bootstrap_p_values_are_calibrated() {
    let trials = 100u64;
    let mut accepted = 0;
    for trial in 0..trials {
        let mut r = rng::stream(31, "test/calibration", trial);
        let data: Vec<u64> = (0..1_000).map(|_| zeta_variate(2.5, &mut r)).collect();
        let fit = fit_power_law(&data, Xmin::Fixed(1), 100, trial).unwrap();
        if fit.ks_p_value.unwrap() >= 0.1 {
            accepted += 1;
        }
    }
    assert!((80..=98).contains(&accepted), "{accepted}/{trials} trials with p >= 0.1");
}

#[test]
fn degree_fit_on_a_network() {
    let mut r = rng::stream(5, "test/fit-net", 0);
    let g = sample_gnm(200, 1200, &mut r).unwrap();
    let fit = fit_degree_distribution(&g, DegreeKind::Total, Xmin::Fixed(1), 10, 3).unwrap();
    assert!(fit.power_law.gamma > 1.0);
    assert_eq!(fit.in_histogram.iter().map(|h| h.1).sum::<usize>(), 200);
    assert!(fit.exponential.is_some());
    assert_eq!(fit, fit_degree_distribution(&g, DegreeKind::Total, Xmin::Fixed(1), 10, 3).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_ranges(n in 2usize..25, edges in proptest::collection::vec((0usize..25, 0usize..25), 0..120)) {
        let g = Digraph::new(n, edges.into_iter().filter(|&(u, v)| u < n && v < n));
        let d = density(&g).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        if let Ok(s) = distance_stats(&g) {
            prop_assert!(s.average >= 1.0 && s.average <= s.diameter as f64);
        }
        if let Ok(c) = clustering(&g) {
            prop_assert!((0.0..=1.0).contains(&c));
        }
        if let Ok(r) = assortativity(&g) {
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&r));
        }
    }
}
