//! Operation-network edges straight from the definition.

use std::collections::BTreeSet;

use svcnet::model::Collection;
use svcnet::network::Invocation;
use svcnet::ontology::{satisfies, MatchLevel, OntologyRegistry};

/// Pairwise oracle straight from the definition, on unresolved references.
pub fn naive_edges(
    coll: &Collection,
    reg: &OntologyRegistry,
    level: MatchLevel,
    invocation: Invocation,
) -> BTreeSet<(String, String)> {
    let ops = coll.operations();
    let mut edges = BTreeSet::new();
    for i in ops {
        for j in ops {
            if i.id == j.id || j.inputs.is_empty() {
                continue;
            }
            let mut matched = 0;
            for c_in in &j.inputs {
                let mut ok = false;
                for c_out in &i.outputs {
                    if satisfies(reg.match_degree(c_out, c_in).unwrap(), level) {
                        ok = true;
                    }
                }
                if ok {
                    matched += 1;
                }
            }
            let linked = match invocation {
                Invocation::Full => matched == j.inputs.len(),
                Invocation::Partial => matched > 0,
            };
            if linked {
                edges.insert((i.id.clone(), j.id.clone()));
            }
        }
    }
    edges
}
