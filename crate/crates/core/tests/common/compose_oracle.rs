//! Composition checks written independently of the search code.

use std::collections::{BTreeMap, BTreeSet};

use svcnet::compose::{CompositionPlan, CompositionRequest, Source};
use svcnet::model::Collection;
use svcnet::ontology::{satisfies, ConceptRef, MatchLevel, OntologyRegistry};

fn sat(reg: &OntologyRegistry, have: &ConceptRef, want: &ConceptRef, level: MatchLevel) -> bool {
    satisfies(reg.match_degree(have, want).unwrap(), level)
}

/// Simulate `plan` from the provided concepts; `Err` names the first violation.
pub fn validate_plan(
    plan: &CompositionPlan,
    req: &CompositionRequest,
    coll: &Collection,
    reg: &OntologyRegistry,
) -> Result<(), String> {
    let ops: BTreeMap<&str, (&[ConceptRef], &[ConceptRef])> = coll
        .operations()
        .iter()
        .map(|o| (o.id.as_str(), (o.inputs.as_slice(), o.outputs.as_slice())))
        .collect();
    let mut done: Vec<&str> = Vec::new();
    let mut chain: BTreeMap<&str, usize> = BTreeMap::new();

    let check = |want: &ConceptRef,
                 binding: Option<&svcnet::compose::Binding>,
                 done: &[&str],
                 chain: &BTreeMap<&str, usize>|
     -> Result<usize, String> {
        let b = binding.ok_or_else(|| format!("no binding for {want}"))?;
        let depth = match &b.source {
            Source::Provided => {
                if !req.provided.contains(&b.concept) {
                    return Err(format!("{} is not provided", b.concept));
                }
                0
            }
            Source::Step(id) => {
                if !done.contains(&id.as_str()) {
                    return Err(format!("{id} used before it runs"));
                }
                if !ops[id.as_str()].1.contains(&b.concept) {
                    return Err(format!("{id} does not output {}", b.concept));
                }
                chain[id.as_str()]
            }
        };
        if !sat(reg, &b.concept, want, req.level) {
            return Err(format!("{} does not satisfy {want} at {}", b.concept, req.level.as_str()));
        }
        Ok(depth)
    };

    for step in &plan.steps {
        let (inputs, _) = *ops.get(step.as_str()).ok_or_else(|| format!("unknown step {step}"))?;
        if done.contains(&step.as_str()) {
            return Err(format!("{step} repeated"));
        }
        let bound = plan.bindings.get(step).ok_or_else(|| format!("{step} has no bindings"))?;
        let mut before = 0;
        for c in inputs {
            before = before.max(check(c, bound.get(&c.to_string()), &done, &chain)?);
        }
        done.push(step.as_str());
        chain.insert(step.as_str(), before + 1);
    }
    for g in &req.goals {
        check(g, plan.goals.get(&g.to_string()), &done, &chain)?;
    }
    let depth = chain.values().copied().max().unwrap_or(0);
    if depth != plan.depth {
        return Err(format!("declared depth {} but chains reach {depth}", plan.depth));
    }
    if depth > req.max_depth {
        return Err(format!("depth {depth} exceeds {}", req.max_depth));
    }
    Ok(())
}

/// Fewest invocation rounds over every subset of operations, if any subset
/// reaches the goals within `max_depth` rounds.
pub fn exhaustive_min_rounds(req: &CompositionRequest, coll: &Collection, reg: &OntologyRegistry) -> Option<usize> {
    let ops = coll.operations();
    assert!(ops.len() <= 16, "exhaustive oracle is exponential");
    let inputs: Vec<BTreeSet<&ConceptRef>> = ops.iter().map(|o| o.inputs.iter().collect()).collect();
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << ops.len()) {
        let mut avail: Vec<ConceptRef> = req.provided.clone();
        let mut fired = vec![false; ops.len()];
        let mut rounds = 0;
        loop {
            let goals_met = req.goals.iter().all(|g| avail.iter().any(|a| sat(reg, a, g, req.level)));
            if goals_met {
                best = Some(best.map_or(rounds, |b: usize| b.min(rounds)));
                break;
            }
            if rounds == req.max_depth {
                break;
            }
            let ready: Vec<usize> = (0..ops.len())
                .filter(|&i| mask & (1 << i) != 0 && !fired[i])
                .filter(|&i| inputs[i].iter().all(|c| avail.iter().any(|a| sat(reg, a, c, req.level))))
                .collect();
            if ready.is_empty() {
                break;
            }
            rounds += 1;
            for i in ready {
                fired[i] = true;
                avail.extend(ops[i].outputs.iter().cloned());
            }
        }
    }
    best
}
