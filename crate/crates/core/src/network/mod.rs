//! Interaction networks: operation networks and parameter networks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Digraph;
use crate::ontology::MatchLevel;

mod build;
mod components;
mod export;

pub use build::{build_operation_network, build_parameter_network, BuildOptions};
pub use components::{decompose, hubs_and_authorities, ComponentDecomposition, HubsAuthorities};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Operation,
    Parameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Invocation {
    Full,
    Partial,
}

impl Invocation {
    pub fn as_str(self) -> &'static str {
        match self {
            Invocation::Full => "full",
            Invocation::Partial => "partial",
        }
    }
}

impl fmt::Display for Invocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Invocation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Invocation::Full),
            "partial" => Ok(Invocation::Partial),
            other => Err(format!("unknown invocation mode `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("edge {index}: node index {node} out of range ({n_nodes} nodes)")]
    NodeOutOfRange { index: usize, node: usize, n_nodes: usize },
    #[error("edge {0}: self-loop")]
    SelfLoop(usize),
    #[error("edge {0}: duplicate of an earlier edge")]
    DuplicateEdge(usize),
    #[error("edge {0}: parameter-network edge without operation provenance")]
    MissingProvenance(usize),
    #[error("edge {0}: provenance given on an operation-network edge")]
    UnexpectedProvenance(usize),
    #[error("operation network without an invocation mode")]
    MissingInvocation,
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
}

/// A directed simple graph over operations or parameter concepts.
///
/// Edges are kept sorted by node index; for parameter networks
/// `provenance[e]` lists the operations materialized by edge `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionNetwork {
    kind: NetworkKind,
    match_level: MatchLevel,
    invocation: Option<Invocation>,
    nodes: Vec<String>,
    edges: Vec<(usize, usize)>,
    provenance: Vec<Vec<String>>,
}

impl InteractionNetwork {
    pub(crate) fn from_parts(
        kind: NetworkKind,
        match_level: MatchLevel,
        invocation: Option<Invocation>,
        nodes: Vec<String>,
        mut edges: Vec<((usize, usize), Vec<String>)>,
    ) -> Self {
        edges.sort_by_key(|e| e.0);
        let (edges, provenance) = edges.into_iter().unzip();
        Self {
            kind,
            match_level,
            invocation,
            nodes,
            edges,
            provenance,
        }
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn match_level(&self) -> MatchLevel {
        self.match_level
    }

    pub fn invocation(&self) -> Option<Invocation> {
        self.invocation
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Operations represented by each edge (empty lists on operation networks).
    pub fn provenance(&self) -> &[Vec<String>] {
        &self.provenance
    }

    pub fn graph(&self) -> Digraph {
        Digraph::new(self.nodes.len(), self.edges.iter().copied())
    }

    /// Edges as `(src label, dst label)` pairs.
    pub fn labelled_edges(&self) -> BTreeSet<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(u, v)| (self.nodes[u].as_str(), self.nodes[v].as_str()))
            .collect()
    }

    /// Subnetwork induced by `nodes` (in that order), keeping provenance.
    pub fn induced(&self, nodes: &[usize]) -> InteractionNetwork {
        let mut pos = vec![usize::MAX; self.nodes.len()];
        for (i, &u) in nodes.iter().enumerate() {
            pos[u] = i;
        }
        let edges = self
            .edges
            .iter()
            .zip(&self.provenance)
            .filter(|((u, v), _)| pos[*u] != usize::MAX && pos[*v] != usize::MAX)
            .map(|(&(u, v), p)| ((pos[u], pos[v]), p.clone()))
            .collect();
        Self::from_parts(
            self.kind,
            self.match_level,
            self.invocation,
            nodes.iter().map(|&u| self.nodes[u].clone()).collect(),
            edges,
        )
    }

    /// Short name such as `exact-full` or `parameter`.
    pub fn name(&self) -> String {
        match (self.kind, self.invocation) {
            (NetworkKind::Parameter, _) => "parameter".to_owned(),
            (NetworkKind::Operation, Some(inv)) => format!("{}-{}", self.match_level, inv),
            (NetworkKind::Operation, None) => self.match_level.to_string(),
        }
    }
}
