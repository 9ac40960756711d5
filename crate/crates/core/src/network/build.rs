use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{Invocation, InteractionNetwork, NetworkKind};
use crate::model::{Collection, CollectionError, ResolvedOperation};
use crate::ontology::{ConceptId, MatchLevel, OntologyRegistry};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Connect every operation to the operations that take no input at all
    /// (the literal "for each input" reading). Off by default.
    pub allow_vacuous: bool,
}

fn invokes(
    registry: &OntologyRegistry,
    from: &ResolvedOperation,
    to: &ResolvedOperation,
    level: MatchLevel,
    invocation: Invocation,
    opts: BuildOptions,
) -> bool {
    if to.inputs.is_empty() {
        return opts.allow_vacuous;
    }
    let matched = |c_in: &ConceptId| {
        from.outputs
            .iter()
            .any(|&c_out| registry.satisfies_id(c_out, *c_in, level))
    };
    match invocation {
        Invocation::Full => to.inputs.iter().all(matched),
        Invocation::Partial => to.inputs.iter().any(matched),
    }
}

/// Operation network at one match level: nodes are operations in collection
/// order, with an edge `i -> j` when `i` can invoke `j`.
pub fn build_operation_network(
    collection: &Collection,
    registry: &OntologyRegistry,
    level: MatchLevel,
    invocation: Invocation,
    opts: BuildOptions,
) -> Result<InteractionNetwork, CollectionError> {
    let ops = collection.resolve(registry)?;
    let edges: Vec<((usize, usize), Vec<String>)> = (0..ops.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let ops = &ops;
            (0..ops.len())
                .filter(move |&j| j != i && invokes(registry, &ops[i], &ops[j], level, invocation, opts))
                .map(move |j| ((i, j), Vec::new()))
        })
        .collect();
    let nodes = collection.operations().iter().map(|op| op.id.clone()).collect();
    Ok(InteractionNetwork::from_parts(
        NetworkKind::Operation,
        level,
        Some(invocation),
        nodes,
        edges,
    ))
}

/// Parameter network: one node per distinct concept (first-appearance
/// order), an edge `c_in -> c_out` for every input/output pair of an
/// operation, annotated with the operations it stands for.
pub fn build_parameter_network(
    collection: &Collection,
    registry: &OntologyRegistry,
) -> Result<InteractionNetwork, CollectionError> {
    collection.validate(registry)?;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut nodes: Vec<String> = Vec::new();
    let mut node_of = |label: String| -> usize {
        *index.entry(label.clone()).or_insert_with(|| {
            nodes.push(label);
            nodes.len() - 1
        })
    };
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for op in collection.operations() {
        let mut ins: Vec<usize> = op.inputs.iter().map(|c| node_of(c.to_string())).collect();
        let mut outs: Vec<usize> = op.outputs.iter().map(|c| node_of(c.to_string())).collect();
        ins.sort_unstable();
        ins.dedup();
        outs.sort_unstable();
        outs.dedup();
        for &a in &ins {
            for &b in &outs {
                if a != b {
                    edges.entry((a, b)).or_default().push(op.id.clone());
                }
            }
        }
    }
    Ok(InteractionNetwork::from_parts(
        NetworkKind::Parameter,
        MatchLevel::Exact,
        None,
        nodes,
        edges.into_iter().collect(),
    ))
}
