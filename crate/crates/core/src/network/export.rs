//! TSV edge lists, Graphviz DOT and network JSON.

use std::collections::HashSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{InteractionNetwork, Invocation, NetworkError, NetworkKind};
use crate::ontology::MatchLevel;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDocument {
    kind: NetworkKind,
    match_level: MatchLevel,
    invocation: Option<Invocation>,
    nodes: Vec<String>,
    edges: Vec<EdgeDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDocument {
    src: usize,
    dst: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ops: Option<Vec<String>>,
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl InteractionNetwork {
    /// Edge indices ordered by `(src label, dst label)`.
    fn label_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            let (ua, va) = self.edges[a];
            let (ub, vb) = self.edges[b];
            (self.nodes[ua].as_str(), self.nodes[va].as_str())
                .cmp(&(self.nodes[ub].as_str(), self.nodes[vb].as_str()))
        });
        order
    }

    /// One `src<TAB>dst` line per edge, sorted by label.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in self.label_order() {
            let (u, v) = self.edges[e];
            out.push_str(&self.nodes[u]);
            out.push('\t');
            out.push_str(&self.nodes[v]);
            out.push('\n');
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for label in &self.nodes {
            let _ = writeln!(out, "  {};", dot_quote(label));
        }
        for e in self.label_order() {
            let (u, v) = self.edges[e];
            let _ = writeln!(out, "  {} -> {};", dot_quote(&self.nodes[u]), dot_quote(&self.nodes[v]));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let with_ops = self.kind == NetworkKind::Parameter;
        let doc = NetworkDocument {
            kind: self.kind,
            match_level: self.match_level,
            invocation: self.invocation,
            nodes: self.nodes.clone(),
            edges: self
                .label_order()
                .into_iter()
                .map(|e| EdgeDocument {
                    src: self.edges[e].0,
                    dst: self.edges[e].1,
                    ops: with_ops.then(|| self.provenance[e].clone()),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("network serializes");
        out.push('\n');
        out
    }

    /// Parse and validate a network JSON document.
    pub fn from_json(document: &str) -> Result<Self, NetworkError> {
        let doc: NetworkDocument =
            serde_json::from_str(document).map_err(|e| NetworkError::Malformed(e.to_string()))?;
        let n = doc.nodes.len();
        let mut labels = HashSet::with_capacity(n);
        for label in &doc.nodes {
            if !labels.insert(label.as_str()) {
                return Err(NetworkError::DuplicateNode(label.clone()));
            }
        }
        if doc.kind == NetworkKind::Operation && doc.invocation.is_none() {
            return Err(NetworkError::MissingInvocation);
        }
        let mut seen = HashSet::with_capacity(doc.edges.len());
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (index, e) in doc.edges.into_iter().enumerate() {
            for node in [e.src, e.dst] {
                if node >= n {
                    return Err(NetworkError::NodeOutOfRange { index, node, n_nodes: n });
                }
            }
            if e.src == e.dst {
                return Err(NetworkError::SelfLoop(index));
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(NetworkError::DuplicateEdge(index));
            }
            let ops = match (doc.kind, e.ops) {
                (NetworkKind::Parameter, Some(ops)) if !ops.is_empty() => ops,
                (NetworkKind::Parameter, _) => return Err(NetworkError::MissingProvenance(index)),
                (NetworkKind::Operation, Some(_)) => return Err(NetworkError::UnexpectedProvenance(index)),
                (NetworkKind::Operation, None) => Vec::new(),
            };
            edges.push(((e.src, e.dst), ops));
        }
        let invocation = match doc.kind {
            NetworkKind::Operation => doc.invocation,
            NetworkKind::Parameter => None,
        };
        Ok(Self::from_parts(doc.kind, doc.match_level, invocation, doc.nodes, edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> InteractionNetwork {
        InteractionNetwork::from_parts(
            NetworkKind::Parameter,
            MatchLevel::Exact,
            None,
            vec!["o#b".into(), "o#a".into(), "o#c".into()],
            vec![((1, 0), vec!["s.x".into()]), ((0, 2), vec!["s.y".into(), "s.z".into()])],
        )
    }

    #[test]
    fn tsv_sorted_by_label() {
        assert_eq!(sample().to_tsv(), "o#a\to#b\no#b\to#c\n");
    }

    #[test]
    fn empty_tsv() {
        let net = InteractionNetwork::from_parts(
            NetworkKind::Operation,
            MatchLevel::Exact,
            Some(Invocation::Full),
            vec!["a".into()],
            vec![],
        );
        assert_eq!(net.to_tsv(), "");
    }

    #[test]
    fn dot_quotes_labels() {
        let dot = sample().to_dot();
        assert!(dot.starts_with("digraph {\n"));
        assert!(dot.contains("  \"o#a\" -> \"o#b\";\n"));
        assert_eq!(dot_quote("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }

    #[test]
    fn json_has_provenance_and_round_trips() {
        let net = sample();
        let json = net.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["kind"], "parameter");
        assert_eq!(v["invocation"], serde_json::Value::Null);
        assert_eq!(v["edges"][1]["ops"], serde_json::json!(["s.y", "s.z"]));
        assert_eq!(InteractionNetwork::from_json(&json).unwrap(), net);
    }

    #[test]
    fn json_validation_errors() {
        let bad = |edges: &str| {
            InteractionNetwork::from_json(&format!(
                r#"{{"kind":"parameter","match_level":"exact","invocation":null,"nodes":["a","b"],"edges":{edges}}}"#
            ))
        };
        assert!(matches!(bad(r#"[{"src":0,"dst":5,"ops":["x"]}]"#), Err(NetworkError::NodeOutOfRange { .. })));
        assert!(matches!(bad(r#"[{"src":0,"dst":0,"ops":["x"]}]"#), Err(NetworkError::SelfLoop(0))));
        assert!(matches!(bad(r#"[{"src":0,"dst":1}]"#), Err(NetworkError::MissingProvenance(0))));
        assert!(matches!(
            bad(r#"[{"src":0,"dst":1,"ops":["x"]},{"src":0,"dst":1,"ops":["y"]}]"#),
            Err(NetworkError::DuplicateEdge(1))
        ));
    }
}
