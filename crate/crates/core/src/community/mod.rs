//! Community structure: modularity, Walktrap, and summaries of a partition.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::graph::UndirectedGraph;

mod walktrap;

pub use walktrap::{walktrap, Dendrogram, Merge, WalktrapResult, DEFAULT_WALK_LENGTH};

/// Domain label given to nodes absent from a labelling.
pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommunityError {
    #[error("assignment covers {got} nodes, graph has {want}")]
    AssignmentLength { got: usize, want: usize },
    #[error("modularity is undefined on a graph without edges")]
    NoEdges,
    #[error("empty graph")]
    EmptyGraph,
    #[error("walk length must be at least 1")]
    InvalidWalkLength,
}

/// Newman-Girvan modularity `sum_c (e_cc - a_c^2)` of `assignment` on `g`.
///
/// `assignment[u]` is an arbitrary community key for node `u`.
pub fn modularity(g: &UndirectedGraph, assignment: &[usize]) -> Result<f64, CommunityError> {
    let n = g.n_nodes();
    if assignment.len() != n {
        return Err(CommunityError::AssignmentLength {
            got: assignment.len(),
            want: n,
        });
    }
    let m = g.n_edges() as u64;
    if m == 0 {
        return Err(CommunityError::NoEdges);
    }
    let mut internal: BTreeMap<usize, u64> = BTreeMap::new();
    let mut degree: BTreeMap<usize, u64> = BTreeMap::new();
    for (u, &c) in assignment.iter().enumerate().take(n) {
        *degree.entry(c).or_default() += g.degree(u) as u64;
    }
    for (u, v) in g.edges() {
        if assignment[u] == assignment[v] {
            *internal.entry(assignment[u]).or_default() += 1;
        }
    }
    let e: u64 = internal.values().sum();
    let a2: u128 = degree.values().map(|&a| a as u128 * a as u128).sum();
    Ok(modularity_from_sums(e, a2, m))
}

/// `e / m - a2 / (2m)^2` from integer sums.
pub(crate) fn modularity_from_sums(internal_edges: u64, degree_squares: u128, m: u64) -> f64 {
    let two_m = 2.0 * m as f64;
    internal_edges as f64 / m as f64 - degree_squares as f64 / (two_m * two_m)
}

/// A partition of a graph's nodes into communities.
///
/// Communities are sorted by size descending, ties by smallest member, and
/// `assignment[u]` indexes into that order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    assignment: Vec<usize>,
    communities: Vec<Vec<usize>>,
    modularity: f64,
}

impl Partition {
    /// Normalise an arbitrary community labelling and score it.
    pub fn from_assignment(g: &UndirectedGraph, assignment: &[usize]) -> Result<Self, CommunityError> {
        let modularity = modularity(g, assignment)?;
        Ok(Self::with_modularity(assignment, modularity))
    }

    pub(crate) fn with_modularity(assignment: &[usize], modularity: f64) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (u, &c) in assignment.iter().enumerate() {
            groups.entry(c).or_default().push(u);
        }
        let mut communities: Vec<Vec<usize>> = groups.into_values().collect();
        communities.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut normalised = vec![0; assignment.len()];
        for (c, members) in communities.iter().enumerate() {
            for &u in members {
                normalised[u] = c;
            }
        }
        Self {
            assignment: normalised,
            communities,
            modularity,
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    pub fn n_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.communities.iter().map(Vec::len).collect()
    }

    /// `{"modularity":Q,"communities":[[label,...],...]}`.
    pub fn to_json(&self, labels: &[String]) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            modularity: f64,
            communities: Vec<Vec<&'a str>>,
        }
        let doc = Doc {
            modularity: self.modularity,
            communities: self
                .communities
                .iter()
                .map(|c| c.iter().map(|&u| labels[u].as_str()).collect())
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("partition serializes");
        out.push('\n');
        out
    }

    /// `node,community` rows in node order.
    pub fn membership_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("node,community\n");
        for (u, c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{},{c}", csv_field(&labels[u]));
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// `(rank, size)` pairs, largest community first, ranks from 1.
pub fn community_size_distribution(partition: &Partition) -> Vec<(usize, usize)> {
    partition.sizes().into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect()
}

pub fn size_distribution_csv(partition: &Partition) -> String {
    let mut out = String::from("rank,size\n");
    for (rank, size) in community_size_distribution(partition) {
        let _ = writeln!(out, "{rank},{size}");
    }
    out
}

/// Fraction of nodes in the `k` largest communities.
pub fn top_k_share(partition: &Partition, k: usize) -> f64 {
    if partition.n_nodes() == 0 {
        return 0.0;
    }
    let top: usize = partition.sizes().into_iter().take(k).sum();
    top as f64 / partition.n_nodes() as f64
}

/// Contingency of communities against externally supplied domains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainMixing {
    /// Distinct domains, sorted.
    pub domains: Vec<String>,
    /// `counts[c][d]`: members of community `c` labelled `domains[d]`.
    pub counts: Vec<Vec<usize>>,
    /// Size-weighted mean of each community's largest domain fraction.
    pub purity: f64,
}

impl DomainMixing {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("community");
        for d in &self.domains {
            out.push(',');
            out.push_str(&csv_field(d));
        }
        out.push('\n');
        for (c, row) in self.counts.iter().enumerate() {
            let _ = write!(out, "{c}");
            for x in row {
                let _ = write!(out, ",{x}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainsError {
    #[error("domains CSV: {0}")]
    Csv(String),
    #[error("domains CSV line {line}: expected `node,domain`, got {fields} fields")]
    FieldCount { line: u64, fields: usize },
    #[error("domains CSV line {line}: empty node or domain")]
    EmptyField { line: u64 },
    #[error("domains CSV line {line}: node `{node}` labelled twice")]
    Duplicate { line: u64, node: String },
}

/// Parse a `node,domain` CSV (with that header row) into a lookup table.
pub fn parse_domains_csv(document: &str) -> Result<HashMap<String, String>, DomainsError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(document.as_bytes());
    let mut out = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| DomainsError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(DomainsError::FieldCount {
                line,
                fields: record.len(),
            });
        }
        let (node, domain) = (&record[0], &record[1]);
        if node.is_empty() || domain.is_empty() {
            return Err(DomainsError::EmptyField { line });
        }
        if out.insert(node.to_owned(), domain.to_owned()).is_some() {
            return Err(DomainsError::Duplicate {
                line,
                node: node.to_owned(),
            });
        }
    }
    Ok(out)
}

/// Domain of every node label, [`UNCLASSIFIED`] when missing.
pub fn domain_labels(nodes: &[String], domains: &HashMap<String, String>) -> Vec<String> {
    nodes
        .iter()
        .map(|n| domains.get(n).cloned().unwrap_or_else(|| UNCLASSIFIED.to_owned()))
        .collect()
}

/// Cross-tabulate `partition` against per-node domain `labels`.
pub fn community_domain_mixing<S: AsRef<str>>(partition: &Partition, labels: &[S]) -> DomainMixing {
    assert_eq!(labels.len(), partition.n_nodes(), "one label per node");
    let mut domains: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
    domains.sort();
    domains.dedup();
    let index: BTreeMap<&str, usize> = domains.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
    let mut counts = vec![vec![0usize; domains.len()]; partition.len()];
    for (u, &c) in partition.assignment().iter().enumerate() {
        counts[c][index[labels[u].as_ref()]] += 1;
    }
    let n = partition.n_nodes();
    let dominant: usize = counts.iter().map(|row| row.iter().copied().max().unwrap_or(0)).sum();
    DomainMixing {
        domains,
        counts,
        purity: if n == 0 { 0.0 } else { dominant as f64 / n as f64 },
    }
}
