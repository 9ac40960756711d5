use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::powerlaw::{fit_exponential, fit_power_law, ExponentialFit, PowerLawFit, Xmin};
use super::MetricError;
use crate::graph::Digraph;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    In,
    Out,
    Total,
}

impl std::str::FromStr for DegreeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(DegreeKind::In),
            "out" => Ok(DegreeKind::Out),
            "total" => Ok(DegreeKind::Total),
            other => Err(format!("unknown degree kind `{other}`")),
        }
    }
}

pub fn degrees(g: &Digraph, which: DegreeKind) -> Vec<u64> {
    (0..g.n_nodes())
        .map(|u| match which {
            DegreeKind::In => g.in_degree(u),
            DegreeKind::Out => g.out_degree(u),
            DegreeKind::Total => g.in_degree(u) + g.out_degree(u),
        } as u64)
        .collect()
}

/// `(degree, count)` pairs, ascending.
pub fn degree_histogram(degrees: &[u64]) -> Vec<(u64, usize)> {
    let mut hist = BTreeMap::new();
    for &k in degrees {
        *hist.entry(k).or_insert(0usize) += 1;
    }
    hist.into_iter().collect()
}

/// `(k, P(K >= k))` at every observed degree, ascending in `k`.
pub fn cumulative_degree_series(degrees: &[u64]) -> Result<Vec<(u64, f64)>, MetricError> {
    if degrees.is_empty() {
        return Err(MetricError::EmptyNetwork);
    }
    let n = degrees.len();
    let mut at_least = n;
    let mut out = Vec::new();
    for (k, count) in degree_histogram(degrees) {
        out.push((k, at_least as f64 / n as f64));
        at_least -= count;
    }
    Ok(out)
}

/// CSV with header `k,p_geq_k`.
pub fn series_csv(series: &[(u64, f64)]) -> String {
    let mut out = String::from("k,p_geq_k\n");
    for (k, p) in series {
        let _ = writeln!(out, "{k},{p}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDistributionFit {
    pub which: DegreeKind,
    pub in_histogram: Vec<(u64, usize)>,
    pub out_histogram: Vec<(u64, usize)>,
    pub total_histogram: Vec<(u64, usize)>,
    pub cumulative: Vec<(u64, f64)>,
    pub power_law: PowerLawFit,
    pub exponential: Option<ExponentialFit>,
}

/// Histograms, cumulative tail and power-law/exponential fits of one degree kind.
pub fn fit_degree_distribution(
    g: &Digraph,
    which: DegreeKind,
    xmin: Xmin,
    bootstrap_n: usize,
    seed: u64,
) -> Result<DegreeDistributionFit, MetricError> {
    let data = degrees(g, which);
    let cumulative = cumulative_degree_series(&data)?;
    let power_law = fit_power_law(&data, xmin, bootstrap_n, rng::sub_seed(seed, "power-law"))?;
    let exponential = fit_exponential(&data, power_law.xmin, bootstrap_n, rng::sub_seed(seed, "exponential")).ok();
    Ok(DegreeDistributionFit {
        which,
        in_histogram: degree_histogram(&degrees(g, DegreeKind::In)),
        out_histogram: degree_histogram(&degrees(g, DegreeKind::Out)),
        total_histogram: degree_histogram(&degrees(g, DegreeKind::Total)),
        cumulative,
        power_law,
        exponential,
    })
}
